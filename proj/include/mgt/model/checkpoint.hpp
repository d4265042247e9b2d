#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgt/data/keyvalue.hpp"
#include "mgt/data/standardizer.hpp"
#include "mgt/model/mgt_net.hpp"

namespace mgt::model {

// Key/value spelling of a ModelConfig (joints, frames, features, layers,
// heads, max_hops, dropout, dilation, kernel_half_width, dilated_conv, gconv,
// layer_norm_eps).
data::KvDocument to_document(const ModelConfig& config);
// Applies one entry; false when the key is not a model key.
bool apply_model_key(ModelConfig& config, const data::KvEntry& entry);

struct Checkpoint {
  MgtNet net;
  data::Standardizer standardizer;
  std::string unit;
};

// "MGTC" u32 version=1
//   u32 len + config document   u32 len + skeleton document   u32 len + unit
//   u32 S, S f64 means, S f64 stddevs      (S = 2, or 0 when not standardized)
//   u32 P, then per parameter: u32 len + name, u32 rank, rank x u32 dims,
//                              numel x f64 (row-major)
std::vector<std::uint8_t> encode_checkpoint(const MgtNet& net,
                                            const data::Standardizer& standardizer,
                                            const std::string& unit);
// Rebuilds the network from the stored config and skeleton, then copies
// every parameter in by name. Shape mismatches, unknown names and missing
// names are FormatErrors.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const MgtNet& net,
                     const data::Standardizer& standardizer, const std::string& unit);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mgt::model
