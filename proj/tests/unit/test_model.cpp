#include <gtest/gtest.h>

#include <random>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"
#include "mgt/model/mgt_net.hpp"
#include "test_util.hpp"

using namespace mgt;
using namespace mgt::model;

namespace {

const graph::SkeletonGraph& h36m() {
  static const auto g = graph::SkeletonGraph::human36m();
  return g;
}

ad::Tensor random_sequence(const ModelConfig& c, std::mt19937_64& rng) {
  return testutil::random_tensor({c.joints, 2, c.frames}, rng);
}

}  // namespace

TEST(ModelConfig, PresetsAndValidation) {
  const auto p = paper_default_config();
  EXPECT_EQ(p.layers, 5u);
  EXPECT_EQ(p.heads, 4u);
  EXPECT_EQ(p.features, 256u);
  EXPECT_EQ(p.frames, 243u);
  EXPECT_EQ(gt_ablation_config().features, 128u);
  EXPECT_NO_THROW(toy_config().validate());
  auto bad = toy_config();
  bad.heads = 3;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = toy_config();
  bad.frames = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = toy_config();
  bad.dropout = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Embedding, TimeMajorLayout) {
  // Joint 0 holds x = (1, 2), y = (3, 4) over two frames; joint 1 adds 10.
  const std::vector<double> s = {1, 2, 3, 4, 11, 12, 13, 14};
  const auto idx = time_major_index(2, 2);
  std::vector<double> flat;
  for (auto i : idx) flat.push_back(s[i]);
  EXPECT_EQ(flat, (std::vector<double>{1, 3, 2, 4, 11, 13, 12, 14}));
}

TEST(Embedding, ZeroInputZeroBiasGivesZeros) {
  const MgtNet net(toy_config(), h36m(), 1);
  const auto e = net.embed(ad::Tensor::zeros({17, 2, 3}));
  EXPECT_EQ(e.shape(), (ad::Shape{17, 8}));
  if (!net.embedding().bias().defined()) {
    for (double v : e.data()) EXPECT_EQ(v, 0.0);
  }
}

TEST(MgtNet, ShapesAndDimensionErrors) {
  std::mt19937_64 rng(1);
  auto cfg = toy_config();
  for (std::size_t t : {1u, 3u, 5u}) {
    cfg.frames = t;
    const MgtNet net(cfg, h36m(), 2);
    EXPECT_EQ(net.forward(random_sequence(cfg, rng)).shape(), (ad::Shape{17, 3}));
    EXPECT_THROW(net.forward(ad::Tensor::zeros({17, 2, t + 1})), DimensionError);
  }
}

TEST(MgtNet, DeterministicInitAndInference) {
  std::mt19937_64 rng(1);
  const auto cfg = toy_config();
  const MgtNet a(cfg, h36m(), 9), b(cfg, h36m(), 9), c(cfg, h36m(), 10);
  const auto s = random_sequence(cfg, rng);
  EXPECT_EQ(testutil::values(a.forward(s)), testutil::values(a.forward(s)));
  EXPECT_EQ(testutil::values(a.forward(s)), testutil::values(b.forward(s)));
  EXPECT_NE(testutil::values(a.forward(s)), testutil::values(c.forward(s)));
}

TEST(MgtNet, FrameOrderMatters) {
  std::mt19937_64 rng(4);
  const auto cfg = toy_config();
  const MgtNet net(cfg, h36m(), 3);
  const auto s = random_sequence(cfg, rng);
  std::vector<double> swapped = testutil::values(s);
  for (std::size_t j = 0; j < 17; ++j)
    for (std::size_t c = 0; c < 2; ++c)
      std::swap(swapped[(j * 2 + c) * 3 + 0], swapped[(j * 2 + c) * 3 + 2]);
  const auto y0 = testutil::values(net.forward(s));
  const auto y1 = testutil::values(net.forward(ad::Tensor({17, 2, 3}, swapped)));
  EXPECT_GT(testutil::max_abs_diff(y0, y1), 1e-9);
}

TEST(MgtNet, ParameterNamesAreUniqueAndCountIsConsistent) {
  const MgtNet net(toy_config(), h36m(), 1);
  const auto params = net.parameters();
  std::set<std::string> names;
  std::size_t total = 0;
  for (const auto& p : params) {
    EXPECT_TRUE(names.insert(p.name).second) << p.name;
    EXPECT_TRUE(p.value.requires_grad()) << p.name;
    total += p.value.numel();
  }
  EXPECT_EQ(total, net.param_count());
  auto cfg = toy_config();
  cfg.dropout = 0.3;
  EXPECT_EQ(MgtNet(cfg, h36m(), 5).param_count(), net.param_count());
}

TEST(MgtNet, FramesOnlyGrowTheEmbedding) {
  for (std::size_t k : {0u, 1u, 2u}) {
    auto a = toy_config(), b = toy_config();
    a.max_hops = b.max_hops = k;
    a.frames = 1;
    b.frames = 9;
    const auto delta = MgtNet(b, h36m(), 0).param_count() - MgtNet(a, h36m(), 0).param_count();
    EXPECT_EQ(delta, 2 * (9 - 1) * a.features * (k + 1));
  }
}

TEST(MgtNet, DilatedConvAddsOnlyKernels) {
  auto with = toy_config(), without = toy_config();
  without.dilated_conv = false;
  const auto m = with.kernel_half_width;
  EXPECT_EQ(MgtNet(with, h36m(), 0).param_count() - MgtNet(without, h36m(), 0).param_count(),
            with.layers * 2 * (2 * m + 1) * (2 * m + 1));
}

TEST(MgtNet, NoDeadParameters) {
  std::mt19937_64 rng(6);
  auto cfg = toy_config();
  cfg.dropout = 0.0;
  const MgtNet net(cfg, h36m(), 11);
  const auto target = testutil::random_tensor({17, 3}, rng);
  for (auto p : net.parameters()) p.value.zero_grad();
  for (int rep = 0; rep < 2; ++rep) {
    ad::backward(ad::sum(ad::square(ad::sub(net.forward(random_sequence(cfg, rng)), target))));
  }
  for (const auto& p : net.parameters()) {
    ASSERT_TRUE(p.value.has_grad()) << p.name;
    double norm = 0.0;
    for (double g : p.value.grad()) norm += g * g;
    EXPECT_GT(norm, 0.0) << p.name;
  }
}

TEST(MgtNet, FullGradientCheckOnToyConfig) {
  std::mt19937_64 rng(12);
  auto cfg = toy_config();
  cfg.dropout = 0.0;
  const MgtNet net(cfg, h36m(), 4);
  const auto s = random_sequence(cfg, rng);
  const auto target = testutil::random_tensor({17, 3}, rng);
  ad::GradCheckOptions opts;
  opts.tolerance = 1e-4;
  const auto report = ad::grad_check_parameters(
      [&] { return ad::sum(ad::square(ad::sub(net.forward(s), target))); }, net.parameters(),
      opts);
  EXPECT_TRUE(report.passed) << report.worst_group << " " << report.max_error;
}

TEST(AttentionBlock, ZeroBranchIsTheIdentity) {
  std::mt19937_64 rng(2);
  const auto g = h36m();
  const std::size_t f = 8;
  auto zero = [&](std::size_t r, std::size_t c) { return ad::Tensor::zeros({r, c}, true); };
  nn::MultiHeadSelfAttention msa(
      {{zero(f, 4), zero(f, 4), zero(f, 4)}, {zero(f, 4), zero(f, 4), zero(f, 4)}}, zero(f, f));
  const GraphAttentionBlock block(msa, nn::LamGConv::from_skeleton(g, f, f, rng),
                                  nn::LamGConv::from_skeleton(g, f, f, rng),
                                  ad::Tensor::zeros({f}, true), ad::Tensor::zeros({f}, true), 0.1,
                                  1e-5);
  const auto x = testutil::random_tensor({17, f}, rng);
  EXPECT_EQ(testutil::values(block.forward(x, false, nullptr)), testutil::values(x));
}

TEST(MgtNet, TrainModeDropoutIsSeeded) {
  std::mt19937_64 rng(1);
  const auto cfg = toy_config();
  auto c2 = cfg;
  c2.dropout = 0.5;
  const MgtNet net(c2, h36m(), 1);
  const auto s = random_sequence(c2, rng);
  ad::Rng r1(3), r2(3);
  ForwardOptions o1{true, &r1}, o2{true, &r2};
  EXPECT_EQ(testutil::values(net.forward(s, o1)), testutil::values(net.forward(s, o2)));
  EXPECT_NE(testutil::values(net.forward(s, o1)), testutil::values(net.forward(s)));
}
