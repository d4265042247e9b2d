#include "mgt/graph/skeleton.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"

namespace mgt::graph {

using nlohmann::json;

SkeletonGraph::SkeletonGraph(std::vector<std::string> joint_names, std::vector<Edge> edges,
                             std::size_t root)
    : joint_names_(std::move(joint_names)), edges_(std::move(edges)), root_(root) {
  const std::size_t n = joint_names_.size();
  if (n == 0) throw ValidationError("skeleton has no joints");
  if (root_ >= n) {
    throw ValidationError("root index " + std::to_string(root_) + " out of range for " +
                          std::to_string(n) + " joints");
  }
  std::set<Edge> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto [i, j] = edges_[e];
    const std::string where = "edges[" + std::to_string(e) + "]";
    if (i >= n || j >= n) {
      throw ValidationError(where + ": joint index " + std::to_string(std::max(i, j)) +
                            " out of range for " + std::to_string(n) + " joints");
    }
    if (i == j) throw ValidationError(where + ": self-edge on joint " + std::to_string(i));
    if (!seen.insert(std::minmax(i, j)).second) {
      throw ValidationError(where + ": duplicate edge (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
    }
  }
}

SkeletonGraph SkeletonGraph::human36m() {
  return SkeletonGraph(
      {"pelvis", "r_hip", "r_knee", "r_ankle", "l_hip", "l_knee", "l_ankle", "spine",
       "thorax", "neck", "head", "l_shoulder", "l_elbow", "l_wrist", "r_shoulder",
       "r_elbow", "r_wrist"},
      {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 5}, {5, 6}, {0, 7}, {7, 8},
       {8, 9}, {9, 10}, {8, 11}, {11, 12}, {12, 13}, {8, 14}, {14, 15}, {15, 16}},
      0);
}

std::vector<std::vector<std::size_t>> SkeletonGraph::neighbors() const {
  std::vector<std::vector<std::size_t>> adj(num_joints());
  for (auto [i, j] : edges_) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

bool SkeletonGraph::is_connected() const {
  const auto d = hop_distances(*this);
  for (std::size_t j = 0; j < num_joints(); ++j) {
    if (d(root_, j) == HopDistanceMatrix::kUnreachable) return false;
  }
  return true;
}

void SkeletonGraph::require_connected() const {
  const auto d = hop_distances(*this);
  for (std::size_t j = 0; j < num_joints(); ++j) {
    if (d(root_, j) == HopDistanceMatrix::kUnreachable) {
      throw ValidationError("skeleton is disconnected: joint " + std::to_string(j) + " ('" +
                            joint_names_[j] + "') is unreachable from the root");
    }
  }
}

Tensor SkeletonGraph::adjacency() const {
  const std::size_t n = num_joints();
  std::vector<double> a(n * n, 0.0);
  for (auto [i, j] : edges_) a[i * n + j] = a[j * n + i] = 1.0;
  return Tensor({n, n}, std::move(a));
}

// ---------------------------------------------------------------------------

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::size_t as_index(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ValidationError(path + ": expected an integer index");
  const auto i = v.get<long long>();
  if (i < 0) throw ValidationError(path + ": negative index " + std::to_string(i));
  return static_cast<std::size_t>(i);
}

}  // namespace

SkeletonGraph parse_skeleton(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ValidationError("skeleton document: syntax error at line " + std::to_string(line) +
                          ", column " + std::to_string(col));
  }
  if (!doc.is_object()) throw ValidationError("skeleton document: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "joints" && key != "edges" && key != "root") {
      throw ValidationError("skeleton document: unknown field '" + key + "'");
    }
  }
  for (const char* key : {"joints", "edges", "root"}) {
    if (!doc.contains(key)) {
      throw ValidationError(std::string("skeleton document: missing field '") + key + "'");
    }
  }

  const auto& jv = doc["joints"];
  if (!jv.is_array()) throw ValidationError("joints: expected an array of names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    if (!jv[i].is_string()) {
      throw ValidationError("joints[" + std::to_string(i) + "]: expected a string");
    }
    names.push_back(jv[i].get<std::string>());
  }

  const auto& ev = doc["edges"];
  if (!ev.is_array()) throw ValidationError("edges: expected an array of [i, j] pairs");
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < ev.size(); ++e) {
    const std::string path = "edges[" + std::to_string(e) + "]";
    if (!ev[e].is_array() || ev[e].size() != 2) {
      throw ValidationError(path + ": expected a pair [i, j]");
    }
    edges.emplace_back(as_index(ev[e][0], path + "[0]"), as_index(ev[e][1], path + "[1]"));
  }
  return SkeletonGraph(std::move(names), std::move(edges), as_index(doc["root"], "root"));
}

SkeletonGraph load_skeleton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open skeleton file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_skeleton(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string to_document(const SkeletonGraph& g) {
  json doc;
  doc["joints"] = g.joint_names();
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i, j});
  doc["edges"] = std::move(edges);
  doc["root"] = g.root();
  return doc.dump();
}

// ---------------------------------------------------------------------------

std::size_t HopDistanceMatrix::eccentricity(std::size_t node) const {
  std::size_t best = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    const auto v = (*this)(node, j);
    if (v != kUnreachable) best = std::max(best, v);
  }
  return best;
}

std::size_t HopDistanceMatrix::diameter() const {
  std::size_t best = 0;
  for (std::size_t i = 0; i < n_; ++i) best = std::max(best, eccentricity(i));
  return best;
}

HopDistanceMatrix hop_distances(const SkeletonGraph& g) {
  const std::size_t n = g.num_joints();
  const auto adj = g.neighbors();
  HopDistanceMatrix d(n);
  for (std::size_t src = 0; src < n; ++src) {
    std::queue<std::size_t> frontier;
    d(src, src) = 0;
    frontier.push(src);
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop();
      for (auto v : adj[u]) {
        if (d(src, v) == HopDistanceMatrix::kUnreachable) {
          d(src, v) = d(src, u) + 1;
          frontier.push(v);
        }
      }
    }
  }
  return d;
}

Tensor k_adjacency(const HopDistanceMatrix& d, std::size_t k) {
  const std::size_t n = d.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i == j || d(i, j) == k) a[i * n + j] = 1.0;
  return Tensor({n, n}, std::move(a));
}

Tensor normalize_adjacency(const Tensor& a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
    throw DimensionError("normalize_adjacency: expected a square matrix, got " +
                         ad::to_string(a.shape()));
  }
  const std::size_t n = a.dim(0);
  auto v = a.data();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += v[i * n + j];
    if (!(deg > 0.0)) {
      throw ContractError("normalize_adjacency: row " + std::to_string(i) +
                          " has non-positive degree");
    }
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  std::vector<double> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = inv_sqrt[i] * v[i * n + j] * inv_sqrt[j];
  return Tensor({n, n}, std::move(out));
}

Tensor adjacency_power(const Tensor& a, std::size_t k) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1)) {
    throw DimensionError("adjacency_power: expected a square matrix, got " +
                         ad::to_string(a.shape()));
  }
  Tensor result = Tensor::identity(a.dim(0));
  const Tensor base = a.detach();
  for (std::size_t i = 0; i < k; ++i) result = ad::matmul(result, base);
  return result;
}

DisentangledAdjacencySet::DisentangledAdjacencySet(const SkeletonGraph& g,
                                                   std::size_t max_hops)
    : distances_(hop_distances(g)) {
  for (std::size_t k = 0; k <= max_hops; ++k) {
    raw_.push_back(k_adjacency(distances_, k));
    normalized_.push_back(normalize_adjacency(raw_.back()));
  }
}

std::vector<Tensor> normalized_adjacency_powers(const SkeletonGraph& g,
                                                std::size_t max_hops) {
  const std::size_t n = g.num_joints();
  const Tensor with_loops = ad::add(g.adjacency(), Tensor::identity(n));
  const Tensor a_hat = normalize_adjacency(with_loops);
  std::vector<Tensor> powers;
  for (std::size_t k = 0; k <= max_hops; ++k) powers.push_back(adjacency_power(a_hat, k));
  return powers;
}

std::size_t count_nonzero(const Tensor& a, double tol) {
  return static_cast<std::size_t>(std::count_if(a.data().begin(), a.data().end(),
                                                [tol](double v) { return std::fabs(v) > tol; }));
}

std::vector<SparsityRow> sparsity_report(const SkeletonGraph& g, std::size_t k_max) {
  if (k_max < 1) throw ConfigError("sparsity_report: k_max must be >= 1");
  const std::size_t n = g.num_joints();
  const Tensor with_loops = ad::add(g.adjacency(), Tensor::identity(n));
  const auto d = hop_distances(g);
  std::vector<SparsityRow> rows;
  Tensor power = with_loops;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (k > 1) power = ad::matmul(power, with_loops);
    rows.push_back({k, count_nonzero(power), count_nonzero(k_adjacency(d, k))});
  }
  return rows;
}

std::pair<double, double> eigenvalue_range(const Tensor& symmetric) {
  const std::size_t n = symmetric.dim(0);
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = symmetric.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace mgt::graph
