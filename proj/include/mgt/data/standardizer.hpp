#pragma once

#include <cstddef>
#include <vector>

#include "mgt/data/dataset.hpp"

namespace mgt::data {

// Mean and standard deviation of the x and y input coordinates, each pooled
// over joints, frames and samples of a training split. Pooling over joints
// keeps where each joint sits relative to the others, which the shared
// graph weights need to tell joints apart. A coordinate with zero spread is
// centered but left unscaled. An empty standardizer is the identity.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> mean, std::vector<double> stddev);

  static Standardizer fit(const PoseDataset& train);

  bool empty() const { return mean_.empty(); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return stddev_; }
  // Coordinates (0 = x, 1 = y) that are centered only.
  std::vector<std::size_t> unscaled() const;

  Tensor apply(const Tensor& input) const;
  Tensor invert(const Tensor& input) const;
  // Inputs transformed, targets untouched.
  PoseDataset apply(const PoseDataset& ds) const;
  PoseDataset invert(const PoseDataset& ds) const;

 private:
  double scale(std::size_t k) const;

  std::vector<double> mean_;
  std::vector<double> stddev_;
};

}  // namespace mgt::data
