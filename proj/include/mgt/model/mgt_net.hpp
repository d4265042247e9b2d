#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgt/ad/tensor.hpp"
#include "mgt/graph/skeleton.hpp"
#include "mgt/nn/layers.hpp"

namespace mgt::model {

using ad::NamedParameter;
using ad::Rng;
using ad::Tensor;

enum class GConvKind { kMultiHop, kHighOrder };

std::string to_string(GConvKind kind);
GConvKind parse_gconv_kind(const std::string& name);

struct ModelConfig {
  std::size_t joints = 17;
  std::size_t frames = 243;
  std::size_t features = 256;
  std::size_t layers = 5;
  std::size_t heads = 4;
  std::size_t max_hops = 2;
  double dropout = 0.1;
  std::size_t dilation = 2;
  std::size_t kernel_half_width = 1;
  bool dilated_conv = true;
  GConvKind gconv = GConvKind::kMultiHop;
  double layer_norm_eps = 1e-5;

  // Throws ConfigError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// L = 5, h = 4, F = 256, T = 243, K = 2.
ModelConfig paper_default_config();
// The ground-truth-input ablation setting: F = 128, otherwise as above.
ModelConfig gt_ablation_config();
// N = 17, T = 3, F = 8, L = 2, h = 2, K = 2, no dropout. Small enough for
// finite-difference checks of the whole network.
ModelConfig toy_config();

struct ForwardOptions {
  bool train = false;
  Rng* rng = nullptr;  // required when train is set and dropout > 0
#ifdef NDEBUG
  bool check_finite = false;
#else
  bool check_finite = true;
#endif
};

// x + Dropout(LayerNorm(GConv2(GConv1(MSA(x))))) with learnable-adjacency
// graph convolutions.
class GraphAttentionBlock {
 public:
  GraphAttentionBlock(nn::MultiHeadSelfAttention msa, nn::LamGConv gconv1, nn::LamGConv gconv2,
                      Tensor norm_gain, Tensor norm_bias, double dropout, double eps);

  Tensor forward(const Tensor& x, bool train, Rng* rng) const;

  const nn::MultiHeadSelfAttention& attention() const { return msa_; }
  const nn::LamGConv& gconv1() const { return gconv1_; }
  const nn::LamGConv& gconv2() const { return gconv2_; }
  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  nn::MultiHeadSelfAttention msa_;
  nn::LamGConv gconv1_;
  nn::LamGConv gconv2_;
  Tensor norm_gain_;
  Tensor norm_bias_;
  double dropout_;
  double eps_;
};

// Two sub-blocks, each a hop convolution F -> F followed by an optional
// dilated convolution added back onto its input: z = g(x); y = z + dconv(z).
// The block as a whole is residual: x + sub2(sub1(x)).
class MultiHopConvBlock {
 public:
  struct SubBlock {
    nn::HopConv gconv;
    std::optional<nn::DilatedConv> dconv;
  };

  explicit MultiHopConvBlock(std::array<SubBlock, 2> subs) : subs_(std::move(subs)) {}

  Tensor forward(const Tensor& x) const;
  const std::array<SubBlock, 2>& sub_blocks() const { return subs_; }
  void collect(const std::string& prefix, std::vector<NamedParameter>& out) const;

 private:
  std::array<SubBlock, 2> subs_;
};

class MgtNet {
 public:
  MgtNet(ModelConfig config, graph::SkeletonGraph skeleton, std::uint64_t seed);

  // Flattens S [N x 2 x T] to [N x 2T] with each joint's row laid out frame by
  // frame (x_0, y_0, x_1, y_1, ...), then applies the embedding hop
  // convolution to give [N x F].
  Tensor embed(const Tensor& sequence) const;

  // S [N x 2 x T] -> root-relative pose [N x 3].
  Tensor forward(const Tensor& sequence, const ForwardOptions& opts = {}) const;

  // Stable, deterministic order; names are unique.
  std::vector<NamedParameter> parameters() const;
  std::size_t param_count() const;

  const ModelConfig& config() const { return config_; }
  const graph::SkeletonGraph& skeleton() const { return skeleton_; }
  const nn::HopConv& embedding() const { return embedding_; }
  const nn::HopConv& head() const { return head_; }
  const std::vector<GraphAttentionBlock>& attention_blocks() const { return attention_; }
  const std::vector<MultiHopConvBlock>& conv_blocks() const { return conv_; }

 private:
  ModelConfig config_;
  graph::SkeletonGraph skeleton_;
  nn::HopConv embedding_;
  std::vector<GraphAttentionBlock> attention_;
  std::vector<MultiHopConvBlock> conv_;
  nn::HopConv head_;
};

// Index map used by MgtNet::embed: flat position in [N x 2T] -> flat
// position in [N x 2 x T].
std::vector<std::size_t> time_major_index(std::size_t joints, std::size_t frames);

}  // namespace mgt::model
