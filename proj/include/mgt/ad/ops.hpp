#pragma once

#include <cstddef>
#include <vector>

#include "mgt/ad/tensor.hpp"

// Differentiable operations. Unless stated otherwise, operands must have
// identical shapes; there is no implicit broadcasting.
namespace mgt::ad {

// [m x k] . [k x n] -> [m x n]
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

// [N x F] + [F], the bias broadcast every layer needs.
Tensor add_row_vector(const Tensor& x, const Tensor& row);

Tensor relu(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor square(const Tensor& x);

// Reductions over all elements to a scalar.
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Row-wise softmax with the row maximum subtracted first.
Tensor softmax_rows(const Tensor& x);

// Normalizes each row of [N x F] to zero mean and unit (population)
// variance, then applies gain and bias elementwise.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

// Concatenates matrices with equal row counts along columns.
Tensor concat_cols(const std::vector<Tensor>& parts);
// Columns [begin, end) of a matrix.
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
// Stacks equally shaped tensors along a new leading axis.
Tensor stack(const std::vector<Tensor>& parts);

Tensor reshape(const Tensor& x, Shape shape);
// out.flat[k] = x.flat[index[k]]; the backward pass scatter-adds.
Tensor gather(const Tensor& x, std::vector<std::size_t> index, Shape shape);
Tensor transpose(const Tensor& x);

// Inverted dropout: survivors are scaled by 1/(1-p). p == 0 returns x.
Tensor dropout(const Tensor& x, double p, Rng& rng);

// Single-channel 2D correlation of x [H x W] with a (2m+1)x(2m+1) kernel whose
// taps are `dilation` cells apart; zero padding keeps the output H x W:
//   y(i, j) = sum_{r,s=-m..m} x(i + d*r, j + d*s) * w(r, s)
Tensor dilated_conv2d(const Tensor& x, const Tensor& kernel, std::size_t dilation);

}  // namespace mgt::ad
