#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mgt/ad/grad_check.hpp"

namespace mgt::train {

struct AmsGradOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers, one entry per parameter tensor in the order they are
// passed to amsgrad_step. Sized lazily on the first step.
struct AmsGradState {
  AmsGradOptions options;
  std::size_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::vector<std::vector<double>> v_max;
};

// One bias-corrected AMSGrad update of every parameter from its accumulated
// gradient (parameters without a gradient are treated as having a zero
// one):
//   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2;  v_max = max(v_max, v)
//   p -= lr / (1-b1^t) * m / (sqrt(v_max) / sqrt(1-b2^t) + eps)
// A non-finite gradient throws NumericError naming the parameter before
// anything is modified.
void amsgrad_step(AmsGradState& state, std::span<const ad::NamedParameter> params, double lr);

}  // namespace mgt::train
