#include "mgt/model/mgt_net.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"

namespace mgt::model {

std::string to_string(GConvKind kind) {
  return kind == GConvKind::kMultiHop ? "multi-hop" : "high-order";
}

GConvKind parse_gconv_kind(const std::string& name) {
  if (name == "multi-hop") return GConvKind::kMultiHop;
  if (name == "high-order") return GConvKind::kHighOrder;
  throw ConfigError("unknown graph convolution '" + name +
                    "' (expected \"multi-hop\" or \"high-order\")");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(joints, "joints");
  positive(frames, "frames");
  positive(features, "features");
  positive(layers, "layers");
  positive(heads, "heads");
  positive(dilation, "dilation");
  if (features % heads != 0) {
    throw ConfigError("features (" + std::to_string(features) +
                      ") must be divisible by heads (" + std::to_string(heads) + ")");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1), got " + std::to_string(dropout));
  }
  if (!(layer_norm_eps > 0.0)) throw ConfigError("layer_norm_eps must be positive");
}

ModelConfig paper_default_config() { return ModelConfig{}; }

ModelConfig gt_ablation_config() {
  ModelConfig c;
  c.features = 128;
  return c;
}

ModelConfig toy_config() {
  ModelConfig c;
  c.joints = 17;
  c.frames = 3;
  c.features = 8;
  c.layers = 2;
  c.heads = 2;
  c.max_hops = 2;
  c.dropout = 0.0;
  return c;
}

// --- blocks ----------------------------------------------------------------

GraphAttentionBlock::GraphAttentionBlock(nn::MultiHeadSelfAttention msa, nn::LamGConv gconv1,
                                         nn::LamGConv gconv2, Tensor norm_gain,
                                         Tensor norm_bias, double dropout, double eps)
    : msa_(std::move(msa)),
      gconv1_(std::move(gconv1)),
      gconv2_(std::move(gconv2)),
      norm_gain_(std::move(norm_gain)),
      norm_bias_(std::move(norm_bias)),
      dropout_(dropout),
      eps_(eps) {}

Tensor GraphAttentionBlock::forward(const Tensor& x, bool train, Rng* rng) const {
  Tensor y = msa_.forward(x);
  y = gconv1_.forward(y);
  y = gconv2_.forward(y);
  y = ad::layer_norm(y, norm_gain_, norm_bias_, eps_);
  if (train && dropout_ > 0.0) {
    if (!rng) throw ContractError("training forward with dropout needs an Rng");
    y = ad::dropout(y, dropout_, *rng);
  }
  return ad::add(x, y);
}

void GraphAttentionBlock::collect(const std::string& prefix,
                                  std::vector<NamedParameter>& out) const {
  msa_.collect(prefix + ".msa", out);
  gconv1_.collect(prefix + ".gconv1", out);
  gconv2_.collect(prefix + ".gconv2", out);
  out.push_back({prefix + ".norm.gain", norm_gain_});
  out.push_back({prefix + ".norm.bias", norm_bias_});
}

Tensor MultiHopConvBlock::forward(const Tensor& x) const {
  Tensor y = x;
  for (const auto& sub : subs_) {
    y = sub.gconv.forward(y);
    if (sub.dconv) y = ad::add(y, sub.dconv->forward(y));
  }
  return ad::add(x, y);
}

void MultiHopConvBlock::collect(const std::string& prefix,
                                std::vector<NamedParameter>& out) const {
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    const std::string p = prefix + ".sub" + std::to_string(i);
    subs_[i].gconv.collect(p + ".gconv", out);
    if (subs_[i].dconv) subs_[i].dconv->collect(p + ".dconv", out);
  }
}

// --- network ---------------------------------------------------------------

namespace {

nn::HopConv make_hop_conv(const ModelConfig& c, const graph::SkeletonGraph& skeleton,
                          const graph::DisentangledAdjacencySet& adjacency, std::size_t in,
                          std::size_t out, nn::Activation act, Rng& rng) {
  if (c.gconv == GConvKind::kHighOrder) {
    return nn::HopConv::high_order(skeleton, c.max_hops, in, out, act, true, rng);
  }
  return nn::HopConv::multi_hop(adjacency, in, out, act, true, rng);
}

const ModelConfig& checked(const ModelConfig& c, const graph::SkeletonGraph& skeleton) {
  c.validate();
  if (skeleton.num_joints() != c.joints) {
    throw ConfigError("config expects " + std::to_string(c.joints) +
                      " joints but the skeleton has " + std::to_string(skeleton.num_joints()));
  }
  skeleton.require_connected();
  return c;
}

bool all_finite(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace

MgtNet::MgtNet(ModelConfig config, graph::SkeletonGraph skeleton, std::uint64_t seed)
    : config_(checked(config, skeleton)),
      skeleton_(std::move(skeleton)),
      embedding_(nn::HopConv(nn::HopConv::Supports::kDisentangled, {Tensor::identity(1)},
                             {Tensor::zeros({1, 1})}, Tensor(), nn::Activation::kIdentity)),
      head_(embedding_) {
  Rng rng(seed);
  const auto& c = config_;
  const graph::DisentangledAdjacencySet adjacency(skeleton_, c.max_hops);

  embedding_ = make_hop_conv(c, skeleton_, adjacency, 2 * c.frames, c.features,
                             nn::Activation::kRelu, rng);
  for (std::size_t l = 0; l < c.layers; ++l) {
    auto msa = nn::MultiHeadSelfAttention::random(c.features, c.heads, rng);
    auto g1 = nn::LamGConv::from_skeleton(skeleton_, c.features, c.features, rng);
    auto g2 = nn::LamGConv::from_skeleton(skeleton_, c.features, c.features, rng);
    attention_.emplace_back(std::move(msa), std::move(g1), std::move(g2),
                            Tensor::full({c.features}, 1.0, true),
                            Tensor::zeros({c.features}, true), c.dropout, c.layer_norm_eps);

    auto sub = [&]() {
      MultiHopConvBlock::SubBlock s{make_hop_conv(c, skeleton_, adjacency, c.features,
                                                  c.features, nn::Activation::kRelu, rng),
                                    std::nullopt};
      if (c.dilated_conv) s.dconv = nn::DilatedConv::random(c.kernel_half_width, c.dilation, rng);
      return s;
    };
    auto first = sub();
    auto second = sub();
    conv_.emplace_back(std::array<MultiHopConvBlock::SubBlock, 2>{std::move(first),
                                                                  std::move(second)});
  }
  head_ = make_hop_conv(c, skeleton_, adjacency, c.features, 3, nn::Activation::kIdentity, rng);
}

std::vector<std::size_t> time_major_index(std::size_t joints, std::size_t frames) {
  std::vector<std::size_t> index(joints * 2 * frames);
  for (std::size_t i = 0; i < joints; ++i)
    for (std::size_t t = 0; t < frames; ++t)
      for (std::size_t c = 0; c < 2; ++c)
        index[i * 2 * frames + 2 * t + c] = i * 2 * frames + c * frames + t;
  return index;
}

Tensor MgtNet::embed(const Tensor& sequence) const {
  const auto& c = config_;
  if (sequence.shape() != ad::Shape{c.joints, 2, c.frames}) {
    throw DimensionError("input sequence must be " + ad::to_string({c.joints, 2, c.frames}) +
                         " (N x 2 x T), got " + ad::to_string(sequence.shape()));
  }
  Tensor flat = ad::gather(sequence, time_major_index(c.joints, c.frames),
                           {c.joints, 2 * c.frames});
  return embedding_.forward(flat);
}

Tensor MgtNet::forward(const Tensor& sequence, const ForwardOptions& opts) const {
  auto check = [&](const Tensor& t, const std::string& where) {
    if (opts.check_finite && !all_finite(t)) {
      throw NumericError("non-finite activation after " + where);
    }
  };
  Tensor x = embed(sequence);
  check(x, "embedding");
  for (std::size_t l = 0; l < attention_.size(); ++l) {
    const std::string p = "layer" + std::to_string(l);
    x = attention_[l].forward(x, opts.train, opts.rng);
    check(x, p + ".attention");
    x = conv_[l].forward(x);
    check(x, p + ".conv");
  }
  Tensor y = head_.forward(x);
  check(y, "head");
  return y;
}

std::vector<NamedParameter> MgtNet::parameters() const {
  std::vector<NamedParameter> out;
  embedding_.collect("embedding", out);
  for (std::size_t l = 0; l < attention_.size(); ++l) {
    const std::string p = "layer" + std::to_string(l);
    attention_[l].collect(p + ".attention", out);
    conv_[l].collect(p + ".conv", out);
  }
  head_.collect("head", out);
  return out;
}

std::size_t MgtNet::param_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.value.numel();
  return n;
}

}  // namespace mgt::model
