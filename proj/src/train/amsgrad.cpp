#include "mgt/train/amsgrad.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/error.hpp"

namespace mgt::train {

void amsgrad_step(AmsGradState& s, std::span<const ad::NamedParameter> params, double lr) {
  if (s.m.empty()) {
    for (const auto& p : params) {
      s.m.emplace_back(p.value.numel(), 0.0);
      s.v.emplace_back(p.value.numel(), 0.0);
      s.v_max.emplace_back(p.value.numel(), 0.0);
    }
  }
  if (s.m.size() != params.size()) {
    throw ContractError("amsgrad_step: state holds " + std::to_string(s.m.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (s.m[i].size() != p.value.numel()) {
      throw ContractError("amsgrad_step: parameter '" + p.name + "' changed size");
    }
    if (!p.value.has_grad()) continue;
    const auto g = p.value.grad();
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isfinite(g[k])) {
        throw NumericError("non-finite gradient in parameter '" + p.name + "' at index " +
                           std::to_string(k));
      }
    }
  }

  ++s.step;
  const auto& o = s.options;
  const double t = static_cast<double>(s.step);
  const double step_size = lr / (1.0 - std::pow(o.beta1, t));
  const double bias2 = std::sqrt(1.0 - std::pow(o.beta2, t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.value.has_grad()) continue;
    auto g = p.value.grad();
    auto x = ad::Tensor(p.value).mutable_data();
    auto &m = s.m[i], &v = s.v[i], &vm = s.v_max[i];
    for (std::size_t k = 0; k < g.size(); ++k) {
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      vm[k] = std::max(vm[k], v[k]);
      x[k] -= step_size * m[k] / (std::sqrt(vm[k]) / bias2 + o.eps);
    }
  }
}

}  // namespace mgt::train
