#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <sstream>

#include "mgt/error.hpp"
#include "mgt/eval/metrics.hpp"
#include "test_util.hpp"

using namespace mgt;
using namespace mgt::eval;
using ad::Tensor;

namespace {

// s R x + t with a random rotation, scale in [0.5, 2], translation in [-1, 1].
Tensor random_similarity(const Tensor& pose, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const Eigen::Quaterniond q = Eigen::Quaterniond(u(rng), u(rng), u(rng), u(rng)).normalized();
  const Eigen::Matrix3d r = q.toRotationMatrix();
  const double s = 0.5 + 1.5 * (u(rng) + 1) / 2;
  const Eigen::Vector3d t(u(rng), u(rng), u(rng));
  std::vector<double> out(pose.numel());
  for (std::size_t j = 0; j < pose.dim(0); ++j) {
    const Eigen::Vector3d x(pose.at(j, 0), pose.at(j, 1), pose.at(j, 2));
    const Eigen::Vector3d y = s * r * x + t;
    for (int c = 0; c < 3; ++c) out[3 * j + c] = y(c);
  }
  return Tensor(pose.shape(), out);
}

}  // namespace

TEST(Mpjpe, HandCasesAndOracle) {
  std::mt19937_64 rng(1);
  const auto gt = testutil::random_tensor({17, 3}, rng);
  EXPECT_EQ(mpjpe(gt, gt), 0.0);
  std::vector<double> shifted = testutil::values(gt);
  for (std::size_t j = 0; j < 17; ++j) shifted[3 * j + 1] += 10.0;
  EXPECT_NEAR(mpjpe(Tensor({17, 3}, shifted), gt), 10.0, 1e-12);
  const auto pred = testutil::random_tensor({17, 3}, rng);
  EXPECT_NEAR(mpjpe(pred, gt), oracle::mpjpe(testutil::values(pred), testutil::values(gt)), 1e-12);
  EXPECT_THROW(mpjpe(Tensor::zeros({17, 3}), Tensor::zeros({16, 3})), DimensionError);
}

TEST(PaMpjpe, RecoversSimilarityTransforms) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto gt = testutil::random_tensor({17, 3}, rng);
    EXPECT_LT(pa_mpjpe(random_similarity(gt, rng), gt), 1e-9);
  }
}

TEST(PaMpjpe, IdentityFitOnEqualPoses) {
  std::mt19937_64 rng(3);
  const auto gt = testutil::random_tensor({17, 3}, rng);
  const auto tf = procrustes_fit(gt, gt);
  EXPECT_NEAR(tf.scale, 1.0, 1e-12);
  for (int r = 0; r < 3; ++r) {
    EXPECT_NEAR(tf.translation[r], 0.0, 1e-12);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(tf.rotation[r][c], r == c ? 1.0 : 0.0, 1e-12);
  }
}

TEST(PaMpjpe, AgreesWithHornQuaternionOracle) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto gt = testutil::random_tensor({17, 3}, rng);
    const auto pred = testutil::random_tensor({17, 3}, rng);
    EXPECT_NEAR(pa_mpjpe(pred, gt),
                oracle::horn_pa_mpjpe(testutil::values(pred), testutil::values(gt)), 1e-9);
  }
}

TEST(PaMpjpe, NeverWorseThanUnalignedOrRandomTransforms) {
  std::mt19937_64 rng(5);
  const auto gt = testutil::random_tensor({17, 3}, rng);
  const auto pred = testutil::random_tensor({17, 3}, rng);
  const double pa = pa_mpjpe(pred, gt);
  EXPECT_LE(pa, mpjpe(pred, gt));
  // The aligned squared residual is a lower bound over all similarity maps.
  auto sq = [&](const Tensor& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.numel(); ++i) s += (p[i] - gt[i]) * (p[i] - gt[i]);
    return s;
  };
  const double best = sq(procrustes_align(pred, gt));
  for (int i = 0; i < 1000; ++i) EXPECT_LE(best, sq(random_similarity(pred, rng)) + 1e-12);
}

TEST(PaMpjpe, ProperRotationUnlessReflectionAllowed) {
  std::mt19937_64 rng(6);
  const auto gt = testutil::random_tensor({17, 3}, rng);
  std::vector<double> mirrored = testutil::values(gt);
  for (std::size_t j = 0; j < 17; ++j) mirrored[3 * j] = -mirrored[3 * j];
  const Tensor pred({17, 3}, mirrored);
  const auto tf = procrustes_fit(pred, gt);
  const Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>> r(&tf.rotation[0][0]);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  EXPECT_GT(pa_mpjpe(pred, gt), 1e-3);
  EXPECT_LT(pa_mpjpe(pred, gt, {.allow_reflection = true}), 1e-9);
}

TEST(PaMpjpe, DegenerateTargetIsRejected) {
  EXPECT_THROW(pa_mpjpe(Tensor::full({5, 3}, 1.0), Tensor::full({5, 3}, 2.0)), NumericError);
}

TEST(Metrics, InvariantUnderJointPermutation) {
  std::mt19937_64 rng(7);
  const auto gt = testutil::random_tensor({17, 3}, rng);
  const auto pred = testutil::random_tensor({17, 3}, rng);
  std::vector<std::size_t> perm(17);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  auto permute = [&](const Tensor& t) {
    std::vector<double> out(51);
    for (std::size_t j = 0; j < 17; ++j)
      for (int c = 0; c < 3; ++c) out[3 * j + c] = t.at(perm[j], c);
    return Tensor({17, 3}, out);
  };
  EXPECT_NEAR(mpjpe(permute(pred), permute(gt)), mpjpe(pred, gt), 1e-12);
  EXPECT_NEAR(pa_mpjpe(permute(pred), permute(gt)), pa_mpjpe(pred, gt), 1e-9);
}

TEST(Pck, InclusiveThresholdAndHalfDisplaced) {
  const auto gt = Tensor::zeros({4, 3});
  const Tensor at_threshold({4, 3}, {150, 0, 0, 0, 150, 0, 0, 0, 150, 0, 0, -150});
  EXPECT_EQ(pck({gt}, {gt}, 150), 1.0);
  EXPECT_EQ(pck({at_threshold}, {gt}, 150), 1.0);
  const Tensor half({4, 3}, {300, 0, 0, 0, 300, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(pck({half}, {gt}, 150), 0.5);
  EXPECT_THROW(pck({gt}, {gt}, 0.0), ConfigError);
}

TEST(Auc, HandIntegratedStepFunction) {
  // Errors 0, 12, 40, 200 on the grid 0, 5, ..., 150 (31 points).
  const auto gt = Tensor::zeros({4, 3});
  const Tensor pred({4, 3}, {0, 0, 0, 12, 0, 0, 0, 40, 0, 0, 0, 200});
  const auto grid = default_auc_grid();
  ASSERT_EQ(grid.size(), 31u);
  // Thresholds >= 0: 1 joint; >= 15: 2; >= 40: 3. Counts 3 points at 1/4,
  // 5 at 2/4 and 23 at 3/4.
  const double want = (3 * 0.25 + 5 * 0.5 + 23 * 0.75) / 31.0;
  EXPECT_NEAR(auc({pred}, {gt}, grid), want, 1e-12);
  EXPECT_LE(auc({pred}, {gt}, grid), pck({pred}, {gt}, 150));
  EXPECT_EQ(auc({gt}, {gt}, grid), 1.0);
  EXPECT_THROW(auc({gt}, {gt}, {}), ConfigError);
  EXPECT_THROW(auc({gt}, {gt}, {5, 5}), ConfigError);
}

TEST(Units, ThresholdsScaleWithTheDeclaredUnit) {
  EXPECT_DOUBLE_EQ(default_pck_threshold("mm"), 150.0);
  EXPECT_DOUBLE_EQ(default_pck_threshold("m"), 0.15);
  EXPECT_DOUBLE_EQ(auc_grid_for_unit("cm").back(), 15.0);
}

TEST(Evaluate, PerActionRowsAndCsv) {
  std::mt19937_64 rng(9);
  std::vector<Tensor> preds, gts;
  std::vector<std::string> actions{"walk", "sit", "walk"};
  for (int i = 0; i < 3; ++i) {
    preds.push_back(testutil::random_tensor({17, 3}, rng, -100, 100));
    gts.push_back(testutil::random_tensor({17, 3}, rng, -100, 100));
  }
  const auto report = evaluate(preds, gts, actions, "mm", {});
  ASSERT_EQ(report.per_action.size(), 2u);
  EXPECT_EQ(report.per_action[0].action, "sit");
  EXPECT_EQ(report.per_action[1].count, 2u);
  EXPECT_NEAR(report.per_action[1].mpjpe, (mpjpe(preds[0], gts[0]) + mpjpe(preds[2], gts[2])) / 2,
              1e-12);
  EXPECT_EQ(report.overall.count, 3u);
  for (const auto& row : report.per_action) EXPECT_LE(row.pa_mpjpe, row.mpjpe);
  std::ostringstream csv;
  write_csv(csv, report);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "action,mpjpe,pa_mpjpe,pck,auc,n");
  EXPECT_NE(csv.str().find("\nall,"), std::string::npos);
  EXPECT_THROW(evaluate({}, {}, {}, "mm", {}), ValidationError);
}
