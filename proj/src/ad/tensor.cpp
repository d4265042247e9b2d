#include "mgt/ad/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "mgt/error.hpp"

namespace mgt::ad {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardRule rule;
  std::uint64_t seq = 0;
  std::string_view op = "leaf";
};

namespace {
std::atomic<std::uint64_t> next_seq{1};
}  // namespace

std::shared_ptr<Node> make_node(Shape shape, std::vector<double> data,
                                bool requires_grad) {
  if (numel(shape) != data.size()) {
    throw DimensionError("tensor shape " + to_string(shape) + " holds " +
                         std::to_string(numel(shape)) + " values, got " +
                         std::to_string(data.size()));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  node->seq = next_seq.fetch_add(1, std::memory_order_relaxed);
  return node;
}

}  // namespace detail

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad)
    : node_(detail::make_node(std::move(shape), std::move(data), requires_grad)) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = ad::numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor({}, {value}, requires_grad);
}

Tensor Tensor::identity(std::size_t n) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  return Tensor({n, n}, std::move(v));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows,
                      bool requires_grad) {
  const std::size_t m = rows.size();
  const std::size_t n = m ? rows.begin()->size() : 0;
  std::vector<double> v;
  v.reserve(m * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw DimensionError("ragged matrix literal");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor({m, n}, std::move(v), requires_grad);
}

Tensor Tensor::uniform(Shape shape, double lo, double hi, Rng& rng,
                       bool requires_grad) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(ad::numel(shape));
  for (auto& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

const Shape& Tensor::shape() const {
  if (!node_) throw ContractError("use of an undefined tensor");
  return node_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " +
                         to_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return node_ ? node_->data.size() : 0; }

std::span<const double> Tensor::data() const {
  if (!node_) return {};
  return node_->data;
}

double Tensor::at(std::size_t row, std::size_t col) const {
  const auto& s = shape();
  if (s.size() != 2 || row >= s[0] || col >= s[1]) {
    throw DimensionError("index (" + std::to_string(row) + "," +
                         std::to_string(col) + ") invalid for " + to_string(s));
  }
  return node_->data[row * s[1] + col];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on tensor of shape " + to_string(shape()));
  }
  return node_->data[0];
}

std::span<double> Tensor::mutable_data() {
  if (!is_leaf()) throw ContractError("mutable_data() on a non-leaf tensor");
  return node_->data;
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

bool Tensor::is_leaf() const { return node_ && node_->inputs.empty(); }

bool Tensor::has_grad() const { return node_ && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const {
  if (!node_) return {};
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return Tensor(shape(), node_->data, false); }

Tensor Tensor::clone(bool requires_grad) const {
  return Tensor(shape(), node_->data, requires_grad);
}

std::string_view Tensor::op_name() const { return node_ ? node_->op : "undefined"; }

// ---------------------------------------------------------------------------

std::span<const double> BackwardContext::grad_output() const { return node_.grad; }

std::span<const double> BackwardContext::output() const { return node_.data; }

std::span<const double> BackwardContext::input(std::size_t i) const {
  return node_.inputs.at(i)->data;
}

const Shape& BackwardContext::input_shape(std::size_t i) const {
  return node_.inputs.at(i)->shape;
}

bool BackwardContext::needs_grad(std::size_t i) const {
  return node_.inputs.at(i)->requires_grad;
}

std::span<double> BackwardContext::input_grad(std::size_t i) const {
  auto& in = *node_.inputs.at(i);
  if (!in.requires_grad) return {};
  if (in.grad.size() != in.data.size()) in.grad.assign(in.data.size(), 0.0);
  return in.grad;
}

Tensor record_op(std::string_view op, Shape shape, std::vector<double> data,
                 std::vector<Tensor> inputs, BackwardRule rule) {
#ifndef NDEBUG
  const bool inputs_finite = std::all_of(inputs.begin(), inputs.end(), [](const Tensor& t) {
    return std::all_of(t.data().begin(), t.data().end(),
                       [](double v) { return std::isfinite(v); });
  });
  if (inputs_finite && !std::all_of(data.begin(), data.end(),
                                    [](double v) { return std::isfinite(v); })) {
    throw NumericError(std::string("non-finite output from op '") + std::string(op) +
                       "' on finite inputs");
  }
#endif
  const bool tracked = std::any_of(inputs.begin(), inputs.end(),
                                   [](const Tensor& t) { return t.requires_grad(); });
  auto node = detail::make_node(std::move(shape), std::move(data), tracked);
  node->op = op;
  if (tracked) {
    node->inputs.reserve(inputs.size());
    for (auto& t : inputs) node->inputs.push_back(t.node_);
    node->rule = std::move(rule);
  }
  return Tensor(std::move(node));
}

// ---------------------------------------------------------------------------

ComputationTape::ComputationTape(const Tensor& loss) : loss_(loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? to_string(loss.shape()) : "undefined"));
  }
  if (!loss.requires_grad()) return;

  std::unordered_set<const detail::Node*> seen;
  std::vector<detail::Node*> stack{loss.node_.get()};
  while (!stack.empty()) {
    auto* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    order_.push_back(n);
    for (auto& in : n->inputs) {
      if (in->requires_grad) stack.push_back(in.get());
    }
  }
  // Inputs are always created before their consumers, so descending creation
  // order is a valid reverse topological order.
  std::sort(order_.begin(), order_.end(),
            [](const detail::Node* a, const detail::Node* b) { return a->seq > b->seq; });
}

std::vector<std::string_view> ComputationTape::replay_order() const {
  std::vector<std::string_view> names;
  names.reserve(order_.size());
  for (auto* n : order_) names.push_back(n->op);
  return names;
}

void ComputationTape::backward() {
  if (order_.empty()) return;
  for (auto* n : order_) {
    if (!n->inputs.empty()) n->grad.assign(n->data.size(), 0.0);
  }
  auto* root = order_.front();
  if (root->grad.size() != 1) root->grad.assign(1, 0.0);
  root->grad[0] += 1.0;
  for (auto* n : order_) {
    if (n->inputs.empty() || !n->rule) continue;
    BackwardContext ctx(*n);
    n->rule(ctx);
  }
}

void backward(const Tensor& loss) {
  ComputationTape tape(loss);
  tape.backward();
}

}  // namespace mgt::ad
