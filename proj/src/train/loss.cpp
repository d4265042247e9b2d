#include "mgt/train/loss.hpp"

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"

namespace mgt::train {

Tensor elastic_loss(const Tensor& pred, const Tensor& target, double alpha,
                    LossReduction reduction) {
  if (pred.shape() != target.shape()) {
    throw DimensionError("elastic_loss: prediction " + ad::to_string(pred.shape()) +
                         " vs target " + ad::to_string(target.shape()));
  }
  if (pred.rank() != 3 || pred.dim(2) != 3) {
    throw DimensionError("elastic_loss: expected [B x N x 3], got " +
                         ad::to_string(pred.shape()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("elastic_loss: alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  double denom = static_cast<double>(pred.dim(0));
  if (reduction == LossReduction::kPerJoint) denom *= static_cast<double>(pred.dim(1));

  const Tensor diff = ad::sub(pred, target);
  const Tensor sq = ad::scale(ad::sum(ad::square(diff)), (1.0 - alpha) / denom);
  const Tensor l1 = ad::scale(ad::sum(ad::abs(diff)), alpha / denom);
  return ad::add(sq, l1);
}

}  // namespace mgt::train
