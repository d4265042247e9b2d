#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mgt::ad {

using Shape = std::vector<std::size_t>;

// Every stochastic op takes one of these by reference. There is no global
// generator.
using Rng = std::mt19937_64;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

namespace detail {
struct Node;
}

// Dense row-major float64 array. A Tensor is a cheap handle; copies share
// the same node. Values are fixed once created (parameters are the one
// exception and are updated through mutable_data() by the optimizer),
// while the gradient buffer accumulates during backward().
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor identity(std::size_t n);
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);
  static Tensor uniform(Shape shape, double lo, double hi, Rng& rng,
                        bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  double operator[](std::size_t flat) const { return data()[flat]; }
  double at(std::size_t row, std::size_t col) const;
  double item() const;

  // Leaves only: the optimizer and finite-difference checks write here.
  std::span<double> mutable_data();

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  // Same values, no history, no grad tracking.
  Tensor detach() const;
  // Fresh leaf with its own copy of the values.
  Tensor clone(bool requires_grad) const;

  std::string_view op_name() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend class BackwardContext;
  friend class ComputationTape;
  friend Tensor record_op(std::string_view, Shape, std::vector<double>,
                          std::vector<Tensor>,
                          std::function<void(class BackwardContext&)>);
};

// View handed to a backward rule while the tape is replayed.
class BackwardContext {
 public:
  std::span<const double> grad_output() const;
  std::span<const double> output() const;
  std::span<const double> input(std::size_t i) const;
  const Shape& input_shape(std::size_t i) const;
  bool needs_grad(std::size_t i) const;
  // Gradient buffer of input i; empty span when the input needs no gradient.
  std::span<double> input_grad(std::size_t i) const;

 private:
  explicit BackwardContext(detail::Node& node) : node_(node) {}
  detail::Node& node_;
  friend class ComputationTape;
};

using BackwardRule = std::function<void(BackwardContext&)>;

// Creates the result of an operation. When any input requires a gradient the
// result remembers its inputs and backward rule; otherwise it is a plain
// constant. In debug builds a non-finite result from finite inputs throws.
Tensor record_op(std::string_view op, Shape shape, std::vector<double> data,
                 std::vector<Tensor> inputs, BackwardRule rule);

// Nodes reachable from a scalar loss, ordered so that replaying front to
// back runs every backward rule after all of its consumers.
class ComputationTape {
 public:
  explicit ComputationTape(const Tensor& loss);

  std::size_t size() const { return order_.size(); }
  std::vector<std::string_view> replay_order() const;

  // Seeds d(loss)/d(loss) = 1 and runs every backward rule once. Leaf
  // gradients accumulate across calls; interior ones are reset first.
  void backward();

 private:
  Tensor loss_;
  std::vector<detail::Node*> order_;
};

void backward(const Tensor& loss);

}  // namespace mgt::ad
