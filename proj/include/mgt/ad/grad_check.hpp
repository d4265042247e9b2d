#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mgt/ad/tensor.hpp"

namespace mgt::ad {

// Relative error between an analytic and a numeric derivative:
//   |a - n| / max(|a|, |n|, floor)
// The floor keeps derivatives that are zero up to round-off from reporting
// huge relative errors.
double relative_error(double analytic, double numeric, double floor);

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-5;
  double floor = 1e-3;
};

struct GradCheckReport {
  std::vector<double> analytic;
  std::vector<double> numeric;
  std::vector<double> errors;  // per element
  double max_error = 0.0;
  std::size_t worst_index = 0;
  bool passed = true;
};

// Compares the backward-pass gradient of f at x with central differences.
// A non-scalar f(x) is reduced by summation. Throws NumericError when f(x)
// is not finite.
GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           const GradCheckOptions& opts = {});

struct NamedParameter {
  std::string name;
  Tensor value;
};

struct ParameterGroupError {
  std::string name;
  std::size_t size = 0;
  double max_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct ParameterCheckReport {
  std::vector<ParameterGroupError> groups;
  double max_error = 0.0;
  std::string worst_group;
  bool passed = true;
};

// Same check over a set of leaf parameters perturbed in place. `loss` must
// rebuild the graph from the current parameter values on every call and
// return a scalar.
ParameterCheckReport grad_check_parameters(const std::function<Tensor()>& loss,
                                           std::vector<NamedParameter> params,
                                           const GradCheckOptions& opts = {});

}  // namespace mgt::ad
