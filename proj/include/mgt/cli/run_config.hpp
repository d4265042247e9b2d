#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mgt/data/keyvalue.hpp"
#include "mgt/model/mgt_net.hpp"
#include "mgt/train/trainer.hpp"

namespace mgt::cli {

// Everything one run needs: model + training hyperparameters, paths and the
// preset they were derived from.
struct RunConfig {
  std::string preset = "paper-default";
  model::ModelConfig model = model::paper_default_config();
  train::TrainConfig train;
  bool standardize = true;
  std::string data;  // pose file
  std::string out;   // output directory

  void validate() const;
};

// "paper-default": L=5, h=4, F=256, T=243, K=2, alpha 0.01, lr 0.005 decayed
//   by 0.9 every 4 epochs, batch 128, 30 epochs.
// "gt-ablation":   same with F=128.
// "toy":           N=17, T=3, F=8, L=2, h=2, K=2, no dropout; lr 0.005
//   constant, batch 8, 300 epochs.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

// `preset` (if present) selects the starting point, every other key
// overrides one field. Unknown keys and mistyped values are ConfigErrors
// naming the key and line.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::string& path);

// Round-trips through parse_run_config.
data::KvDocument to_document(const RunConfig& config);

std::string to_string(train::LossReduction r);
train::LossReduction parse_loss_reduction(const std::string& name);

}  // namespace mgt::cli
