#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mgt/ad/grad_check.hpp"
#include "mgt/ad/tensor.hpp"
#include "mgt/graph/skeleton.hpp"

namespace mgt::nn {

using ad::NamedParameter;
using ad::Rng;
using ad::Tensor;

enum class Activation { kRelu, kIdentity };

Tensor activate(const Tensor& x, Activation act);

// Uniform Glorot initialization for a fan_in x fan_out matrix.
Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Vanilla graph convolution sigma(A H W) over a fixed normalized adjacency.
class GcnLayer {
 public:
  GcnLayer(Tensor adjacency, Tensor weight, Activation act = Activation::kRelu);

  Tensor forward(const Tensor& h) const;
  const Tensor& adjacency() const { return adjacency_; }
  const Tensor& weight() const { return weight_; }

 private:
  Tensor adjacency_;
  Tensor weight_;
  Activation act_;
};

// Sum over k of S_k H W_k (+ b), then the activation. With the normalized
// k-adjacency stack as supports this is the multi-hop graph convolution; with
// powers of the normalized adjacency it is the high-order baseline.
class HopConv {
 public:
  enum class Supports { kDisentangled, kPowers };

  HopConv(Supports kind, std::vector<Tensor> supports, std::vector<Tensor> weights,
          Tensor bias, Activation act);

  static HopConv multi_hop(const graph::DisentangledAdjacencySet& adjacency,
                           std::size_t in_features, std::size_t out_features,
                           Activation act, bool with_bias, Rng& rng);
  static HopConv high_order(const graph::SkeletonGraph& skeleton, std::size_t max_hops,
                            std::size_t in_features, std::size_t out_features,
                            Activation act, bool with_bias, Rng& rng);

  Tensor forward(const Tensor& h) const;

  Supports kind() const { return kind_; }
  std::size_t max_hops() const { return supports_.size() - 1; }
  std::size_t in_features() const { return weights_.front().dim(0); }
  std::size_t out_features() const { return weights_.front().dim(1); }
  const std::vector<Tensor>& supports() const { return supports_; }
  const std::vector<Tensor>& weights() const { return weights_; }
  const Tensor& bias() const { return bias_; }
  Activation activation() const { return act_; }

  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  Supports kind_;
  std::vector<Tensor> supports_;
  std::vector<Tensor> weights_;
  Tensor bias_;  // undefined when the layer has no bias
  Activation act_;
};

// Graph convolution whose N x N adjacency is itself trainable. It starts from
// the skeleton's normalized adjacency and is left unconstrained afterwards.
class LamGConv {
 public:
  LamGConv(Tensor adjacency, Tensor weight, Activation act = Activation::kRelu);

  static LamGConv from_skeleton(const graph::SkeletonGraph& skeleton, std::size_t in_features,
                                std::size_t out_features, Rng& rng);

  Tensor forward(const Tensor& h) const;

  const Tensor& adjacency() const { return adjacency_; }
  const Tensor& weight() const { return weight_; }
  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  Tensor adjacency_;
  Tensor weight_;
  Activation act_;
};

// Multi-head scaled dot-product self-attention over the N joint tokens:
// head i computes softmax(Q_i K_i^T / sqrt(d_k)) V_i with d_k = F / h, and the
// concatenated heads are projected by W_o. Heads keep separate projection
// matrices.
class MultiHeadSelfAttention {
 public:
  struct Head {
    Tensor wq, wk, wv;  // F x d_k each
  };

  MultiHeadSelfAttention(std::vector<Head> heads, Tensor wo);
  static MultiHeadSelfAttention random(std::size_t features, std::size_t num_heads, Rng& rng);

  // When `attention` is non-null it receives one N x N weight matrix per head.
  Tensor forward(const Tensor& x, std::vector<Tensor>* attention = nullptr) const;

  std::size_t num_heads() const { return heads_.size(); }
  std::size_t features() const { return wo_.dim(0); }
  std::size_t head_dim() const { return heads_.front().wq.dim(1); }
  const std::vector<Head>& heads() const { return heads_; }
  const Tensor& wo() const { return wo_; }
  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  std::vector<Head> heads_;
  Tensor wo_;
};

// Single-channel dilated convolution over the N x F feature grid with zero
// padding, so the output has the input's shape.
class DilatedConv {
 public:
  DilatedConv(Tensor kernel, std::size_t dilation);
  static DilatedConv random(std::size_t half_width, std::size_t dilation, Rng& rng);

  Tensor forward(const Tensor& x) const;

  std::size_t half_width() const { return kernel_.dim(0) / 2; }
  std::size_t dilation() const { return dilation_; }
  const Tensor& kernel() const { return kernel_; }
  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  Tensor kernel_;
  std::size_t dilation_;
};

// Span of a dilated kernel along one axis: 2*d*m + 1.
std::size_t receptive_field(std::size_t half_width, std::size_t dilation);

}  // namespace mgt::nn
