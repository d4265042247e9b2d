#include "mgt/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgt/error.hpp"

namespace mgt::ad {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + to_string(a.shape()) +
                         " vs " + to_string(b.shape()));
  }
}

void require_matrix(const char* op, const Tensor& x) {
  if (x.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got " +
                         to_string(x.shape()));
  }
}

// c[m x n] += a[m x k] * b[k x n]
void gemm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
              std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m x k] += g[m x n] * b[k x n]^T
void gemm_acc_bt(const double* g, const double* b, double* c, std::size_t m,
                 std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      c[i * k + p] += acc;
    }
  }
}

// c[k x n] += a[m x k]^T * g[m x n]
void gemm_acc_at(const double* a, const double* g, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

template <class Fwd, class Deriv>
Tensor unary(const char* op, const Tensor& x, Fwd fwd, Deriv deriv) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return record_op(op, x.shape(), std::move(out), {x}, [deriv](BackwardContext& ctx) {
    auto gx = ctx.input_grad(0);
    auto g = ctx.grad_output();
    auto xv = ctx.input(0);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * deriv(xv[i]);
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix("matmul", a);
  require_matrix("matmul", b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " + to_string(a.shape()) +
                         " . " + to_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  gemm_acc(a.data().data(), b.data().data(), out.data(), m, k, n);
  return record_op("matmul", {m, n}, std::move(out), {a, b},
                   [m, k, n](BackwardContext& ctx) {
                     const double* g = ctx.grad_output().data();
                     if (auto ga = ctx.input_grad(0); !ga.empty()) {
                       gemm_acc_bt(g, ctx.input(1).data(), ga.data(), m, n, k);
                     }
                     if (auto gb = ctx.input_grad(1); !gb.empty()) {
                       gemm_acc_at(ctx.input(0).data(), g, gb.data(), m, k, n);
                     }
                   });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  auto x = a.data(), y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return record_op("add", a.shape(), std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    for (std::size_t k = 0; k < 2; ++k) {
      auto gi = ctx.input_grad(k);
      for (std::size_t i = 0; i < gi.size(); ++i) gi[i] += g[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  auto x = a.data(), y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return record_op("sub", a.shape(), std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    auto ga = ctx.input_grad(0);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
    auto gb = ctx.input_grad(1);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  auto x = a.data(), y = b.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return record_op("mul", a.shape(), std::move(out), {a, b}, [](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    auto x = ctx.input(0), y = ctx.input(1);
    auto ga = ctx.input_grad(0);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * y[i];
    auto gb = ctx.input_grad(1);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * x[i];
  });
}

Tensor scale(const Tensor& x, double factor) {
  auto in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * in[i];
  return record_op("scale", x.shape(), std::move(out), {x}, [factor](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    auto gx = ctx.input_grad(0);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += factor * g[i];
  });
}

Tensor add_row_vector(const Tensor& x, const Tensor& row) {
  require_matrix("add_row_vector", x);
  const std::size_t n = x.dim(0), f = x.dim(1);
  if (row.numel() != f) {
    throw DimensionError("add_row_vector: " + to_string(x.shape()) + " + " +
                         to_string(row.shape()));
  }
  auto xv = x.data(), rv = row.data();
  std::vector<double> out(n * f);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) out[i * f + j] = xv[i * f + j] + rv[j];
  return record_op("add_row_vector", x.shape(), std::move(out), {x, row},
                   [n, f](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto gx = ctx.input_grad(0);
                     for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
                     auto gr = ctx.input_grad(1);
                     if (gr.empty()) return;
                     for (std::size_t i = 0; i < n; ++i)
                       for (std::size_t j = 0; j < f; ++j) gr[j] += g[i * f + j];
                   });
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor abs(const Tensor& x) {
  // Subgradient 0 at the kink.
  return unary(
      "abs", x, [](double v) { return std::fabs(v); },
      [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor square(const Tensor& x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return record_op("sum", {}, {s}, {x}, [](BackwardContext& ctx) {
    const double g = ctx.grad_output()[0];
    for (auto& gx : ctx.input_grad(0)) gx += g;
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor softmax_rows(const Tensor& x) {
  require_matrix("softmax_rows", x);
  const std::size_t m = x.dim(0), n = x.dim(1);
  auto in = x.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = in.data() + i * n;
    double* o = out.data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += (o[j] = std::exp(row[j] - mx));
    for (std::size_t j = 0; j < n; ++j) o[j] /= z;
  }
  return record_op("softmax_rows", {m, n}, std::move(out), {x},
                   [m, n](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto y = ctx.output();
                     auto gx = ctx.input_grad(0);
                     for (std::size_t i = 0; i < m; ++i) {
                       double dot = 0.0;
                       for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * y[i * n + j];
                       for (std::size_t j = 0; j < n; ++j)
                         gx[i * n + j] += y[i * n + j] * (g[i * n + j] - dot);
                     }
                   });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  require_matrix("layer_norm", x);
  const std::size_t n = x.dim(0), f = x.dim(1);
  if (f == 0) throw DimensionError("layer_norm: feature dimension is zero");
  if (gain.numel() != f || bias.numel() != f) {
    throw DimensionError("layer_norm: gain " + to_string(gain.shape()) + " / bias " +
                         to_string(bias.shape()) + " do not match " +
                         to_string(x.shape()));
  }
  auto xv = x.data(), gv = gain.data(), bv = bias.data();
  std::vector<double> xhat(n * f), inv_std(n), out(n * f);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = xv.data() + i * f;
    double mu = 0.0;
    for (std::size_t j = 0; j < f; ++j) mu += row[j];
    mu /= static_cast<double>(f);
    double var = 0.0;
    for (std::size_t j = 0; j < f; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(f);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < f; ++j) {
      xhat[i * f + j] = (row[j] - mu) * inv_std[i];
      out[i * f + j] = xhat[i * f + j] * gv[j] + bv[j];
    }
  }
  return record_op(
      "layer_norm", {n, f}, std::move(out), {x, gain, bias},
      [n, f, xhat = std::move(xhat), inv_std = std::move(inv_std)](BackwardContext& ctx) {
        auto g = ctx.grad_output();
        auto gv = ctx.input(1);
        if (auto gg = ctx.input_grad(1); !gg.empty()) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < f; ++j) gg[j] += g[i * f + j] * xhat[i * f + j];
        }
        if (auto gb = ctx.input_grad(2); !gb.empty()) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < f; ++j) gb[j] += g[i * f + j];
        }
        auto gx = ctx.input_grad(0);
        if (gx.empty()) return;
        const double inv_f = 1.0 / static_cast<double>(f);
        for (std::size_t i = 0; i < n; ++i) {
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t j = 0; j < f; ++j) {
            const double d = g[i * f + j] * gv[j];
            mean_d += d;
            mean_dx += d * xhat[i * f + j];
          }
          mean_d *= inv_f;
          mean_dx *= inv_f;
          for (std::size_t j = 0; j < f; ++j) {
            const double d = g[i * f + j] * gv[j];
            gx[i * f + j] += inv_std[i] * (d - mean_d - xhat[i * f + j] * mean_dx);
          }
        }
      });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t m = parts.front().dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_matrix("concat_cols", p);
    if (p.dim(0) != m) {
      throw DimensionError("concat_cols: row counts differ, " +
                           to_string(parts.front().shape()) + " vs " + to_string(p.shape()));
    }
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto v = parts[k].data();
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(v.data() + i * widths[k], widths[k], out.data() + i * total + offset);
    offset += widths[k];
  }
  return record_op("concat_cols", {m, total}, std::move(out), parts,
                   [m, total, widths](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     std::size_t offset = 0;
                     for (std::size_t k = 0; k < widths.size(); ++k) {
                       auto gk = ctx.input_grad(k);
                       if (!gk.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < widths[k]; ++j)
                             gk[i * widths[k] + j] += g[i * total + offset + j];
                       }
                       offset += widths[k];
                     }
                   });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_matrix("slice_cols", x);
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (begin > end || end > n) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + "," +
                         std::to_string(end) + ") invalid for " + to_string(x.shape()));
  }
  const std::size_t w = end - begin;
  auto v = x.data();
  std::vector<double> out(m * w);
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(v.data() + i * n + begin, w, out.data() + i * w);
  return record_op("slice_cols", {m, w}, std::move(out), {x},
                   [m, n, w, begin](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto gx = ctx.input_grad(0);
                     for (std::size_t i = 0; i < m; ++i)
                       for (std::size_t j = 0; j < w; ++j) gx[i * n + begin + j] += g[i * w + j];
                   });
}

Tensor stack(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("stack: no inputs");
  const Shape& inner = parts.front().shape();
  const std::size_t block = ad::numel(inner);
  std::vector<double> out;
  out.reserve(block * parts.size());
  for (const auto& p : parts) {
    if (p.shape() != inner) {
      throw DimensionError("stack: shape mismatch " + to_string(inner) + " vs " +
                           to_string(p.shape()));
    }
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  Shape shape{parts.size()};
  shape.insert(shape.end(), inner.begin(), inner.end());
  const std::size_t count = parts.size();
  return record_op("stack", std::move(shape), std::move(out), parts,
                   [block, count](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     for (std::size_t k = 0; k < count; ++k) {
                       auto gk = ctx.input_grad(k);
                       for (std::size_t i = 0; i < gk.size(); ++i) gk[i] += g[k * block + i];
                     }
                   });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (ad::numel(shape) != x.numel()) {
    throw DimensionError("reshape: cannot view " + to_string(x.shape()) + " as " +
                         to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return record_op("reshape", std::move(shape), std::move(out), {x}, [](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    auto gx = ctx.input_grad(0);
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
  });
}

Tensor gather(const Tensor& x, std::vector<std::size_t> index, Shape shape) {
  if (ad::numel(shape) != index.size()) {
    throw DimensionError("gather: " + std::to_string(index.size()) + " indices for shape " +
                         to_string(shape));
  }
  auto v = x.data();
  std::vector<double> out(index.size());
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (index[k] >= v.size()) {
      throw DimensionError("gather: index " + std::to_string(index[k]) + " out of range for " +
                           to_string(x.shape()));
    }
    out[k] = v[index[k]];
  }
  return record_op("gather", std::move(shape), std::move(out), {x},
                   [index = std::move(index)](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto gx = ctx.input_grad(0);
                     for (std::size_t k = 0; k < index.size(); ++k) gx[index[k]] += g[k];
                   });
}

Tensor transpose(const Tensor& x) {
  require_matrix("transpose", x);
  const std::size_t m = x.dim(0), n = x.dim(1);
  auto v = x.data();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = v[i * n + j];
  return record_op("transpose", {n, m}, std::move(out), {x}, [m, n](BackwardContext& ctx) {
    auto g = ctx.grad_output();
    auto gx = ctx.input_grad(0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[j * m + i];
  });
}

Tensor dropout(const Tensor& x, double p, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("dropout probability must lie in [0, 1), got " + std::to_string(p));
  }
  if (p == 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  const double s = 1.0 / (1.0 - p);
  std::vector<double> mask(x.numel());
  for (auto& m : mask) m = keep(rng) ? s : 0.0;
  auto v = x.data();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] * mask[i];
  return record_op("dropout", x.shape(), std::move(out), {x},
                   [mask = std::move(mask)](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto gx = ctx.input_grad(0);
                     for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * mask[i];
                   });
}

Tensor dilated_conv2d(const Tensor& x, const Tensor& kernel, std::size_t dilation) {
  require_matrix("dilated_conv2d", x);
  require_matrix("dilated_conv2d", kernel);
  const std::size_t ks = kernel.dim(0);
  if (kernel.dim(1) != ks || ks % 2 == 0) {
    throw DimensionError("dilated_conv2d: kernel must be square with odd side, got " +
                         to_string(kernel.shape()));
  }
  if (dilation == 0) throw ConfigError("dilated_conv2d: dilation must be >= 1");
  const auto rows = static_cast<long>(x.dim(0));
  const auto cols = static_cast<long>(x.dim(1));
  const long m = static_cast<long>(ks / 2);
  const long d = static_cast<long>(dilation);
  auto xv = x.data(), wv = kernel.data();

  // Visits every (output cell, kernel tap, input cell) triple that falls
  // inside the zero-padded grid.
  auto for_each_tap = [=](auto&& fn) {
    for (long i = 0; i < rows; ++i)
      for (long j = 0; j < cols; ++j)
        for (long r = -m; r <= m; ++r) {
          const long ii = i + d * r;
          if (ii < 0 || ii >= rows) continue;
          for (long s = -m; s <= m; ++s) {
            const long jj = j + d * s;
            if (jj < 0 || jj >= cols) continue;
            fn(static_cast<std::size_t>(i * cols + j),
               static_cast<std::size_t>((r + m) * static_cast<long>(ks) + (s + m)),
               static_cast<std::size_t>(ii * cols + jj));
          }
        }
  };

  std::vector<double> out(static_cast<std::size_t>(rows * cols), 0.0);
  for_each_tap([&](std::size_t o, std::size_t w, std::size_t in) { out[o] += xv[in] * wv[w]; });
  return record_op("dilated_conv2d", x.shape(), std::move(out), {x, kernel},
                   [for_each_tap](BackwardContext& ctx) {
                     auto g = ctx.grad_output();
                     auto xin = ctx.input(0), w = ctx.input(1);
                     auto gx = ctx.input_grad(0);
                     auto gw = ctx.input_grad(1);
                     for_each_tap([&](std::size_t o, std::size_t k, std::size_t in) {
                       if (!gx.empty()) gx[in] += g[o] * w[k];
                       if (!gw.empty()) gw[k] += g[o] * xin[in];
                     });
                   });
}

}  // namespace mgt::ad
