#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mgt/ad/tensor.hpp"

namespace mgt::graph {

using ad::Tensor;
using Edge = std::pair<std::size_t, std::size_t>;

// Undirected body-joint graph. Construction validates indices, self-edges,
// and duplicates; connectivity is checked separately because some
// diagnostics are meaningful on disconnected graphs.
class SkeletonGraph {
 public:
  SkeletonGraph(std::vector<std::string> joint_names, std::vector<Edge> edges,
                std::size_t root);

  // Conventional 17-joint Human3.6M topology rooted at the pelvis.
  static SkeletonGraph human36m();

  std::size_t num_joints() const { return joint_names_.size(); }
  const std::vector<std::string>& joint_names() const { return joint_names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t root() const { return root_; }

  bool is_connected() const;
  // Throws ValidationError naming an unreachable joint.
  void require_connected() const;

  // Binary adjacency A (no self-loops).
  Tensor adjacency() const;
  std::vector<std::vector<std::size_t>> neighbors() const;

  friend bool operator==(const SkeletonGraph&, const SkeletonGraph&) = default;

 private:
  std::vector<std::string> joint_names_;
  std::vector<Edge> edges_;
  std::size_t root_;
};

// Skeleton document: {"joints": [...], "edges": [[i, j], ...], "root": r}.
// Errors carry the line/column of syntax problems or the path of the
// offending field.
SkeletonGraph parse_skeleton(std::string_view text);
SkeletonGraph load_skeleton(const std::string& path);
std::string to_document(const SkeletonGraph& g);

// All-pairs shortest hop counts. Unreachable pairs hold kUnreachable.
class HopDistanceMatrix {
 public:
  static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

  explicit HopDistanceMatrix(std::size_t n) : n_(n), d_(n * n, kUnreachable) {}

  std::size_t size() const { return n_; }
  std::size_t operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::size_t& operator()(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

  // Largest finite distance; kUnreachable-free graphs only make sense here.
  std::size_t diameter() const;
  std::size_t eccentricity(std::size_t node) const;

 private:
  std::size_t n_;
  std::vector<std::size_t> d_;
};

HopDistanceMatrix hop_distances(const SkeletonGraph& g);

// [A_k]_ij = 1 if d_ij == k or i == j, else 0.
Tensor k_adjacency(const HopDistanceMatrix& d, std::size_t k);

// D^{-1/2} A D^{-1/2} with D = diag(A 1). Throws ContractError on a zero
// row sum.
Tensor normalize_adjacency(const Tensor& a);

// a^k by repeated products; a^0 = I.
Tensor adjacency_power(const Tensor& a, std::size_t k);

// Frozen stack of k-adjacency matrices for k = 0..K together with their
// normalized forms.
class DisentangledAdjacencySet {
 public:
  DisentangledAdjacencySet(const SkeletonGraph& g, std::size_t max_hops);

  std::size_t max_hops() const { return raw_.size() - 1; }
  const HopDistanceMatrix& distances() const { return distances_; }
  const std::vector<Tensor>& raw() const { return raw_; }
  const std::vector<Tensor>& normalized() const { return normalized_; }

 private:
  HopDistanceMatrix distances_;
  std::vector<Tensor> raw_;
  std::vector<Tensor> normalized_;
};

// Powers of the normalized adjacency with self-loops, k = 0..K (the
// high-order aggregation supports).
std::vector<Tensor> normalized_adjacency_powers(const SkeletonGraph& g, std::size_t max_hops);

std::size_t count_nonzero(const Tensor& a, double tol = 0.0);

struct SparsityRow {
  std::size_t k = 0;
  std::size_t nnz_power = 0;      // nnz((A + I)^k)
  std::size_t nnz_k_adjacency = 0;  // nnz(A_k)
};

std::vector<SparsityRow> sparsity_report(const SkeletonGraph& g, std::size_t k_max);

// Eigenvalue range of a symmetric matrix.
std::pair<double, double> eigenvalue_range(const Tensor& symmetric);

}  // namespace mgt::graph
