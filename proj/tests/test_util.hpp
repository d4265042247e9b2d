#pragma once

#include <random>
#include <vector>

#include "mgt/ad/tensor.hpp"
#include "oracles/oracles.hpp"

namespace testutil {

using mgt::ad::Tensor;

inline oracle::Mat to_mat(const Tensor& t) {
  return oracle::Mat(t.dim(0), t.dim(1), std::vector<double>(t.data().begin(), t.data().end()));
}

inline Tensor to_tensor(const oracle::Mat& m, bool requires_grad = false) {
  return Tensor({m.rows, m.cols}, m.v, requires_grad);
}

inline std::vector<double> values(const Tensor& t) {
  return std::vector<double>(t.data().begin(), t.data().end());
}

inline Tensor random_tensor(mgt::ad::Shape shape, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0, bool requires_grad = false) {
  return Tensor::uniform(std::move(shape), lo, hi, rng, requires_grad);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : 1e300;
}

}  // namespace testutil
