#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mgt/data/dataset.hpp"
#include "mgt/data/standardizer.hpp"
#include "mgt/model/mgt_net.hpp"
#include "mgt/train/amsgrad.hpp"
#include "mgt/train/loss.hpp"

namespace mgt::train {

struct TrainConfig {
  double alpha = 0.01;
  double lr0 = 0.005;
  double decay = 0.9;
  std::size_t decay_every = 4;
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  LossReduction reduction = LossReduction::kPerPose;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// lr0 * decay^floor(epoch / decay_every), epochs counted from 0.
double lr_at(const TrainConfig& config, std::size_t epoch);

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;  // pose-weighted mean of the batch losses
  double eval_mpjpe = 0.0;
  double eval_pa_mpjpe = 0.0;
};

std::string history_csv_header();
std::string history_csv_row(const EpochRecord& r);

struct TrainOptions {
  // Scored after every epoch in eval mode; the training set when null.
  const data::PoseDataset* eval_set = nullptr;
  // Written after the last epoch when non-empty.
  std::string checkpoint_path;
  // Stored in the checkpoint; inputs must already be transformed by it.
  data::Standardizer standardizer;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Seeded shuffled mini-batches (last partial batch kept), elastic loss,
// AMSGrad. A non-finite loss or gradient throws DivergenceError carrying
// the epoch and batch index.
std::vector<EpochRecord> train(model::MgtNet& net, const data::PoseDataset& dataset,
                               const TrainConfig& config, const TrainOptions& opts = {});

// Eval-mode predictions for every sample.
std::vector<ad::Tensor> predict(const model::MgtNet& net, const data::PoseDataset& dataset);

struct FitScore {
  double mpjpe = 0.0;
  double pa_mpjpe = 0.0;
};
FitScore score(const model::MgtNet& net, const data::PoseDataset& dataset);

}  // namespace mgt::train
