#pragma once

#include "mgt/ad/tensor.hpp"

namespace mgt::train {

using ad::Tensor;

enum class LossReduction {
  kPerPose,   // joint errors summed per pose, averaged over the batch
  kPerJoint,  // additionally divided by N
};

// (1 - alpha) * sum ||y - y_hat||_2^2 + alpha * sum ||y - y_hat||_1, summed
// over joints and averaged over the B poses of a [B x N x 3] batch.
Tensor elastic_loss(const Tensor& pred, const Tensor& target, double alpha,
                    LossReduction reduction = LossReduction::kPerPose);

}  // namespace mgt::train
