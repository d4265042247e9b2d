#include "mgt/ad/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"

namespace mgt::ad {

namespace {

double finite_scalar(const Tensor& y) {
  const double v = y.numel() == 1 ? y.item() : sum(y.detach()).item();
  if (!std::isfinite(v)) throw NumericError("grad_check: function value is not finite");
  return v;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                           const GradCheckOptions& opts) {
  Tensor leaf = x.clone(true);
  Tensor y = f(leaf);
  finite_scalar(y);
  if (y.requires_grad()) backward(y.numel() == 1 ? y : sum(y));

  GradCheckReport report;
  const std::size_t n = leaf.numel();
  report.analytic.assign(n, 0.0);
  if (leaf.has_grad()) {
    std::copy(leaf.grad().begin(), leaf.grad().end(), report.analytic.begin());
  }
  report.numeric.resize(n);
  report.errors.resize(n);

  std::vector<double> base(x.data().begin(), x.data().end());
  for (std::size_t i = 0; i < n; ++i) {
    auto probe = base;
    probe[i] = base[i] + opts.step;
    const double up = finite_scalar(f(Tensor(x.shape(), probe)));
    probe[i] = base[i] - opts.step;
    const double down = finite_scalar(f(Tensor(x.shape(), probe)));
    report.numeric[i] = (up - down) / (2.0 * opts.step);
    report.errors[i] = relative_error(report.analytic[i], report.numeric[i], opts.floor);
    if (i == 0 || report.errors[i] > report.max_error) {
      report.max_error = report.errors[i];
      report.worst_index = i;
    }
  }
  report.passed = report.max_error < opts.tolerance;
  return report;
}

ParameterCheckReport grad_check_parameters(const std::function<Tensor()>& loss,
                                           std::vector<NamedParameter> params,
                                           const GradCheckOptions& opts) {
  for (auto& p : params) {
    if (!p.value.is_leaf() || !p.value.requires_grad()) {
      throw ContractError("grad_check_parameters: '" + p.name +
                          "' is not a trainable leaf");
    }
    p.value.zero_grad();
  }
  {
    Tensor l = loss();
    finite_scalar(l);
    backward(l);
  }

  ParameterCheckReport report;
  for (auto& p : params) {
    ParameterGroupError group;
    group.name = p.name;
    group.size = p.value.numel();
    std::vector<double> analytic(group.size, 0.0);
    if (p.value.has_grad()) {
      std::copy(p.value.grad().begin(), p.value.grad().end(), analytic.begin());
    }
    auto values = p.value.mutable_data();
    for (std::size_t i = 0; i < group.size; ++i) {
      const double saved = values[i];
      values[i] = saved + opts.step;
      const double up = finite_scalar(loss());
      values[i] = saved - opts.step;
      const double down = finite_scalar(loss());
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * opts.step);
      const double err = relative_error(analytic[i], numeric, opts.floor);
      if (i == 0 || err > group.max_error) {
        group.max_error = err;
        group.worst_index = i;
        group.analytic = analytic[i];
        group.numeric = numeric;
      }
    }
    if (report.groups.empty() || group.max_error > report.max_error) {
      report.max_error = group.max_error;
      report.worst_group = group.name;
    }
    report.groups.push_back(std::move(group));
  }
  report.passed = report.max_error < opts.tolerance;
  return report;
}

}  // namespace mgt::ad
