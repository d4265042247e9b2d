#include "mgt/data/standardizer.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "mgt/error.hpp"

namespace mgt::data {

namespace {
constexpr double kMinStd = 1e-12;
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> stddev)
    : mean_(std::move(mean)), stddev_(std::move(stddev)) {
  if (mean_.size() != 2 || stddev_.size() != 2) {
    throw DimensionError("standardizer: expected 2 means and 2 stddevs, got " +
                         std::to_string(mean_.size()) + " and " + std::to_string(stddev_.size()));
  }
}

Standardizer Standardizer::fit(const PoseDataset& train) {
  if (train.empty()) throw ValidationError("standardizer: empty training split");
  const std::size_t n = train.joints(), t = train.frames;
  // Channel c of element (j, c, f) lives at (j * 2 + c) * t + f.
  double sum[2] = {0.0, 0.0}, sq[2] = {0.0, 0.0};
  for (const auto& s : train.samples) {
    auto v = s.input.data();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t f = 0; f < t; ++f) sum[c] += v[(j * 2 + c) * t + f];
  }
  const double count = static_cast<double>(train.size() * n * t);
  std::vector<double> mean{sum[0] / count, sum[1] / count};
  for (const auto& s : train.samples) {
    auto v = s.input.data();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t f = 0; f < t; ++f) {
          const double d = v[(j * 2 + c) * t + f] - mean[c];
          sq[c] += d * d;
        }
  }
  std::vector<double> stddev{std::sqrt(sq[0] / count), std::sqrt(sq[1] / count)};

  Standardizer st(std::move(mean), std::move(stddev));
  for (auto c : st.unscaled()) {
    spdlog::warn("standardizer: input coordinate {} has zero spread and is left unscaled",
                 c == 0 ? "x" : "y");
  }
  return st;
}

std::vector<std::size_t> Standardizer::unscaled() const {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < stddev_.size(); ++k) {
    if (!(stddev_[k] > kMinStd)) idx.push_back(k);
  }
  return idx;
}

double Standardizer::scale(std::size_t k) const {
  return stddev_[k] > kMinStd ? stddev_[k] : 1.0;
}

Tensor Standardizer::apply(const Tensor& input) const {
  if (empty()) return input;
  if (input.rank() != 3 || input.dim(1) != 2) {
    throw DimensionError("standardizer expects N x 2 x T input, got " +
                         ad::to_string(input.shape()));
  }
  const std::size_t t = input.dim(2);
  auto v = input.data();
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t c = (k / t) % 2;
    out[k] = (v[k] - mean_[c]) / scale(c);
  }
  return Tensor(input.shape(), std::move(out));
}

Tensor Standardizer::invert(const Tensor& input) const {
  if (empty()) return input;
  if (input.rank() != 3 || input.dim(1) != 2) {
    throw DimensionError("standardizer expects N x 2 x T input, got " +
                         ad::to_string(input.shape()));
  }
  const std::size_t t = input.dim(2);
  auto v = input.data();
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::size_t c = (k / t) % 2;
    out[k] = v[k] * scale(c) + mean_[c];
  }
  return Tensor(input.shape(), std::move(out));
}

PoseDataset Standardizer::apply(const PoseDataset& ds) const {
  PoseDataset out = ds;
  for (auto& s : out.samples) s.input = apply(s.input);
  return out;
}

PoseDataset Standardizer::invert(const PoseDataset& ds) const {
  PoseDataset out = ds;
  for (auto& s : out.samples) s.input = invert(s.input);
  return out;
}

}  // namespace mgt::data
