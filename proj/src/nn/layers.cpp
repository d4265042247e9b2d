#include "mgt/nn/layers.hpp"

#include <cmath>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"

namespace mgt::nn {

namespace {

void require_rows(const char* layer, const Tensor& h, std::size_t rows, std::size_t cols) {
  if (h.rank() != 2 || h.dim(0) != rows || h.dim(1) != cols) {
    throw DimensionError(std::string(layer) + ": expected input " +
                         ad::to_string({rows, cols}) + ", got " + ad::to_string(h.shape()));
  }
}

Tensor trainable(Tensor t) { return t.clone(true); }

}  // namespace

Tensor activate(const Tensor& x, Activation act) {
  return act == Activation::kRelu ? ad::relu(x) : x;
}

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return Tensor::uniform({fan_in, fan_out}, -limit, limit, rng, true);
}

namespace {

// The K + 1 per-hop weights act like one (K + 1) * in -> out matrix applied
// to the concatenated supports, so they share that matrix's Glorot range.
std::vector<Tensor> hop_weights(std::size_t hops, std::size_t in, std::size_t out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>((hops + 1) * in + out));
  std::vector<Tensor> weights;
  for (std::size_t k = 0; k <= hops; ++k) {
    weights.push_back(Tensor::uniform({in, out}, -limit, limit, rng, true));
  }
  return weights;
}

}  // namespace

// --- GcnLayer --------------------------------------------------------------

GcnLayer::GcnLayer(Tensor adjacency, Tensor weight, Activation act)
    : adjacency_(std::move(adjacency)), weight_(std::move(weight)), act_(act) {
  if (adjacency_.rank() != 2 || adjacency_.dim(0) != adjacency_.dim(1)) {
    throw DimensionError("GcnLayer: adjacency must be square, got " +
                         ad::to_string(adjacency_.shape()));
  }
}

Tensor GcnLayer::forward(const Tensor& h) const {
  require_rows("GcnLayer", h, adjacency_.dim(0), weight_.dim(0));
  return activate(ad::matmul(ad::matmul(adjacency_, h), weight_), act_);
}

// --- HopConv ---------------------------------------------------------------

HopConv::HopConv(Supports kind, std::vector<Tensor> supports, std::vector<Tensor> weights,
                 Tensor bias, Activation act)
    : kind_(kind),
      supports_(std::move(supports)),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      act_(act) {
  if (supports_.empty()) throw ConfigError("HopConv: needs at least the k = 0 support");
  if (weights_.size() != supports_.size()) {
    throw ConfigError("HopConv: " + std::to_string(weights_.size()) +
                      " weight matrices for " + std::to_string(supports_.size()) +
                      " supports (K = " + std::to_string(supports_.size() - 1) + ")");
  }
  const auto& w0 = weights_.front().shape();
  for (const auto& w : weights_) {
    if (w.shape() != w0 || w.rank() != 2) {
      throw DimensionError("HopConv: weight shapes differ, " + ad::to_string(w0) + " vs " +
                           ad::to_string(w.shape()));
    }
  }
  const auto& s0 = supports_.front().shape();
  for (const auto& s : supports_) {
    if (s.rank() != 2 || s.dim(0) != s.dim(1) || s.shape() != s0) {
      throw DimensionError("HopConv: supports must be equally sized square matrices");
    }
  }
  if (bias_.defined() && bias_.numel() != w0[1]) {
    throw DimensionError("HopConv: bias " + ad::to_string(bias_.shape()) +
                         " does not match output width " + std::to_string(w0[1]));
  }
}

HopConv HopConv::multi_hop(const graph::DisentangledAdjacencySet& adjacency,
                           std::size_t in_features, std::size_t out_features,
                           Activation act, bool with_bias, Rng& rng) {
  auto weights = hop_weights(adjacency.max_hops(), in_features, out_features, rng);
  Tensor bias = with_bias ? Tensor::zeros({out_features}, true) : Tensor();
  return HopConv(Supports::kDisentangled, adjacency.normalized(), std::move(weights),
                 std::move(bias), act);
}

HopConv HopConv::high_order(const graph::SkeletonGraph& skeleton, std::size_t max_hops,
                            std::size_t in_features, std::size_t out_features,
                            Activation act, bool with_bias, Rng& rng) {
  auto weights = hop_weights(max_hops, in_features, out_features, rng);
  Tensor bias = with_bias ? Tensor::zeros({out_features}, true) : Tensor();
  return HopConv(Supports::kPowers, graph::normalized_adjacency_powers(skeleton, max_hops),
                 std::move(weights), std::move(bias), act);
}

Tensor HopConv::forward(const Tensor& h) const {
  require_rows("HopConv", h, supports_.front().dim(0), in_features());
  Tensor acc;
  for (std::size_t k = 0; k < supports_.size(); ++k) {
    Tensor term = ad::matmul(ad::matmul(supports_[k], h), weights_[k]);
    acc = acc.defined() ? ad::add(acc, term) : term;
  }
  if (bias_.defined()) acc = ad::add_row_vector(acc, bias_);
  return activate(acc, act_);
}

void HopConv::collect(const std::string& prefix, std::vector<NamedParameter>& out) const {
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    out.push_back({prefix + ".w" + std::to_string(k), weights_[k]});
  }
  if (bias_.defined()) out.push_back({prefix + ".bias", bias_});
}

// --- LamGConv --------------------------------------------------------------

LamGConv::LamGConv(Tensor adjacency, Tensor weight, Activation act)
    : adjacency_(std::move(adjacency)), weight_(std::move(weight)), act_(act) {
  if (adjacency_.rank() != 2 || adjacency_.dim(0) != adjacency_.dim(1)) {
    throw DimensionError("LamGConv: adjacency must be square, got " +
                         ad::to_string(adjacency_.shape()));
  }
}

LamGConv LamGConv::from_skeleton(const graph::SkeletonGraph& skeleton,
                                 std::size_t in_features, std::size_t out_features,
                                 Rng& rng) {
  const std::size_t n = skeleton.num_joints();
  Tensor a_hat =
      graph::normalize_adjacency(ad::add(skeleton.adjacency(), Tensor::identity(n)));
  return LamGConv(trainable(a_hat), glorot(in_features, out_features, rng));
}

Tensor LamGConv::forward(const Tensor& h) const {
  require_rows("LamGConv", h, adjacency_.dim(0), weight_.dim(0));
  return activate(ad::matmul(ad::matmul(adjacency_, h), weight_), act_);
}

void LamGConv::collect(const std::string& prefix, std::vector<NamedParameter>& out) const {
  out.push_back({prefix + ".adjacency", adjacency_});
  out.push_back({prefix + ".weight", weight_});
}

// --- MultiHeadSelfAttention ------------------------------------------------

MultiHeadSelfAttention::MultiHeadSelfAttention(std::vector<Head> heads, Tensor wo)
    : heads_(std::move(heads)), wo_(std::move(wo)) {
  if (heads_.empty()) throw ConfigError("MultiHeadSelfAttention: needs at least one head");
  const std::size_t f = wo_.dim(0);
  if (wo_.rank() != 2 || wo_.dim(1) != f) {
    throw DimensionError("MultiHeadSelfAttention: W_o must be F x F, got " +
                         ad::to_string(wo_.shape()));
  }
  if (f % heads_.size() != 0) {
    throw ConfigError("MultiHeadSelfAttention: F = " + std::to_string(f) +
                      " is not divisible by h = " + std::to_string(heads_.size()));
  }
  const ad::Shape expect{f, f / heads_.size()};
  for (const auto& hd : heads_) {
    for (const Tensor* w : {&hd.wq, &hd.wk, &hd.wv}) {
      if (w->shape() != expect) {
        throw DimensionError("MultiHeadSelfAttention: head projection " +
                             ad::to_string(w->shape()) + ", expected " + ad::to_string(expect));
      }
    }
  }
}

MultiHeadSelfAttention MultiHeadSelfAttention::random(std::size_t features,
                                                      std::size_t num_heads, Rng& rng) {
  if (num_heads == 0 || features % num_heads != 0) {
    throw ConfigError("MultiHeadSelfAttention: F = " + std::to_string(features) +
                      " is not divisible by h = " + std::to_string(num_heads));
  }
  const std::size_t dk = features / num_heads;
  std::vector<Head> heads;
  for (std::size_t i = 0; i < num_heads; ++i) {
    Tensor wq = glorot(features, dk, rng);
    Tensor wk = glorot(features, dk, rng);
    Tensor wv = glorot(features, dk, rng);
    heads.push_back({wq, wk, wv});
  }
  return MultiHeadSelfAttention(std::move(heads), glorot(features, features, rng));
}

Tensor MultiHeadSelfAttention::forward(const Tensor& x, std::vector<Tensor>* attention) const {
  if (x.rank() != 2 || x.dim(1) != features()) {
    throw DimensionError("MultiHeadSelfAttention: expected N x " + std::to_string(features()) +
                         " input, got " + ad::to_string(x.shape()));
  }
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(head_dim()));
  std::vector<Tensor> outputs;
  outputs.reserve(heads_.size());
  if (attention) attention->clear();
  for (const auto& hd : heads_) {
    Tensor q = ad::matmul(x, hd.wq);
    Tensor k = ad::matmul(x, hd.wk);
    Tensor v = ad::matmul(x, hd.wv);
    Tensor weights = ad::softmax_rows(ad::scale(ad::matmul(q, ad::transpose(k)), inv_sqrt_dk));
    if (attention) attention->push_back(weights);
    outputs.push_back(ad::matmul(weights, v));
  }
  Tensor y = outputs.size() == 1 ? outputs.front() : ad::concat_cols(outputs);
  return ad::matmul(y, wo_);
}

void MultiHeadSelfAttention::collect(const std::string& prefix,
                                     std::vector<NamedParameter>& out) const {
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    const std::string p = prefix + ".head" + std::to_string(i);
    out.push_back({p + ".wq", heads_[i].wq});
    out.push_back({p + ".wk", heads_[i].wk});
    out.push_back({p + ".wv", heads_[i].wv});
  }
  out.push_back({prefix + ".wo", wo_});
}

// --- DilatedConv -----------------------------------------------------------

DilatedConv::DilatedConv(Tensor kernel, std::size_t dilation)
    : kernel_(std::move(kernel)), dilation_(dilation) {
  if (kernel_.rank() != 2 || kernel_.dim(0) != kernel_.dim(1) || kernel_.dim(0) % 2 == 0) {
    throw DimensionError("DilatedConv: kernel must be (2m+1) x (2m+1), got " +
                         ad::to_string(kernel_.shape()));
  }
  if (dilation_ == 0) throw ConfigError("DilatedConv: dilation must be >= 1");
}

DilatedConv DilatedConv::random(std::size_t half_width, std::size_t dilation, Rng& rng) {
  const std::size_t side = 2 * half_width + 1;
  const double limit = 1.0 / static_cast<double>(side);
  return DilatedConv(Tensor::uniform({side, side}, -limit, limit, rng, true), dilation);
}

Tensor DilatedConv::forward(const Tensor& x) const {
  return ad::dilated_conv2d(x, kernel_, dilation_);
}

void DilatedConv::collect(const std::string& prefix, std::vector<NamedParameter>& out) const {
  out.push_back({prefix + ".kernel", kernel_});
}

std::size_t receptive_field(std::size_t half_width, std::size_t dilation) {
  if (dilation == 0) throw ConfigError("receptive_field: dilation must be >= 1");
  return 2 * dilation * half_width + 1;
}

}  // namespace mgt::nn
