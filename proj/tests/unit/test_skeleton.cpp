#include <gtest/gtest.h>

#include <random>

#include "mgt/ad/ops.hpp"
#include "mgt/error.hpp"
#include "mgt/graph/skeleton.hpp"
#include "test_util.hpp"

using namespace mgt;
using namespace mgt::graph;

namespace {

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("j" + std::to_string(i));
  return out;
}

SkeletonGraph chain(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return SkeletonGraph(names(n), e, 0);
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Skeleton, Human36mTopology) {
  const auto g = SkeletonGraph::human36m();
  EXPECT_EQ(g.num_joints(), 17u);
  EXPECT_EQ(g.edges().size(), 16u);
  EXPECT_TRUE(g.is_connected());
  const auto d = hop_distances(g);
  EXPECT_EQ(d.eccentricity(g.root()), 5u);
  EXPECT_EQ(d.diameter(), 8u);
}

TEST(Skeleton, ConstructionRejectsBadEdges) {
  EXPECT_NE(error_of([] { SkeletonGraph(names(3), {{0, 3}}, 0); }).find("3"), std::string::npos);
  EXPECT_NE(error_of([] { SkeletonGraph(names(3), {{1, 1}}, 0); }).find("self-edge"),
            std::string::npos);
  EXPECT_NE(error_of([] { SkeletonGraph(names(3), {{0, 1}, {1, 0}}, 0); }).find("duplicate"),
            std::string::npos);
  EXPECT_THROW(SkeletonGraph(names(3), {{0, 1}}, 5), ValidationError);
}

TEST(Skeleton, DisconnectedGraphNamesTheUnreachableJoint) {
  const SkeletonGraph g(names(4), {{0, 1}, {2, 3}}, 0);
  EXPECT_FALSE(g.is_connected());
  const auto msg = error_of([&] { g.require_connected(); });
  EXPECT_NE(msg.find("j2"), std::string::npos) << msg;
}

TEST(Skeleton, DocumentRoundTrip) {
  const auto g = SkeletonGraph::human36m();
  EXPECT_EQ(parse_skeleton(to_document(g)), g);
}

TEST(Skeleton, DocumentErrorsAreLocated) {
  EXPECT_NE(error_of([] { parse_skeleton("{\"joints\": [\"a\",\n \"b\"],, }"); }).find("line 2"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_skeleton(R"({"joints": ["a", "b"], "edges": [[0, 1]]})"); })
                .find("'root'"),
            std::string::npos);
  EXPECT_NE(
      error_of([] { parse_skeleton(R"({"joints": ["a", "b"], "edges": [[0, "x"]], "root": 0})"); })
          .find("edges[0]"),
      std::string::npos);
  EXPECT_NE(error_of([] {
              parse_skeleton(R"({"joints": ["a"], "edges": [], "root": 0, "bones": 1})");
            }).find("'bones'"),
            std::string::npos);
}

TEST(HopDistance, MatchesFloydWarshallOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 19;
    const auto edges = oracle::random_connected_graph(n, rng() % 6, rng);
    const SkeletonGraph g(names(n), edges, 0);
    const auto d = hop_distances(g);
    const auto ref = oracle::floyd_warshall(n, edges);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) ASSERT_EQ(static_cast<int>(d(i, j)), ref[i][j]);
  }
}

TEST(HopDistance, UnreachablePairsAreMarked) {
  const SkeletonGraph g(names(3), {{0, 1}}, 0);
  EXPECT_EQ(hop_distances(g)(0, 2), HopDistanceMatrix::kUnreachable);
}

TEST(KAdjacency, MatchesOracleAndSupportsAreDisjoint) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng() % 15;
    const auto edges = oracle::random_connected_graph(n, rng() % 5, rng);
    const SkeletonGraph g(names(n), edges, 0);
    const DisentangledAdjacencySet set(g, 4);
    const auto ref = oracle::floyd_warshall(n, edges);
    std::vector<int> covered(n * n, 0);
    for (std::size_t k = 0; k <= 4; ++k) {
      const auto want = oracle::k_adjacency(ref, static_cast<int>(k));
      EXPECT_EQ(testutil::values(set.raw()[k]), want.v);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && set.raw()[k].at(i, j) != 0.0) ++covered[i * n + j];
    }
    for (int c : covered) EXPECT_LE(c, 1);
  }
}

TEST(KAdjacency, ZeroHopIsIdentity) {
  const auto g = chain(5);
  EXPECT_EQ(testutil::values(k_adjacency(hop_distances(g), 0)),
            testutil::values(ad::Tensor::identity(5)));
}

TEST(Normalize, MatchesOracleAndIsSymmetric) {
  const auto g = SkeletonGraph::human36m();
  const DisentangledAdjacencySet set(g, 3);
  for (std::size_t k = 0; k <= 3; ++k) {
    const auto ref = oracle::normalize(testutil::to_mat(set.raw()[k]));
    EXPECT_LT(testutil::max_abs_diff(testutil::values(set.normalized()[k]), ref.v), 1e-15);
    const auto& a = set.normalized()[k];
    for (std::size_t i = 0; i < 17; ++i)
      for (std::size_t j = 0; j < 17; ++j) EXPECT_EQ(a.at(i, j), a.at(j, i));
  }
  // Eigenvalues of D^-1/2 (A+I) D^-1/2 lie in (-1, 1].
  const auto [lo, hi] = eigenvalue_range(set.normalized()[1]);
  EXPECT_GT(lo, -1.0);
  EXPECT_NEAR(hi, 1.0, 1e-12);
}

TEST(Normalize, ZeroRowIsAContractError) {
  EXPECT_THROW(normalize_adjacency(ad::Tensor::zeros({2, 2})), ContractError);
}

TEST(Sparsity, PowersAgreeWithWalkEnumeration) {
  const auto g = SkeletonGraph::human36m();
  const auto rows = sparsity_report(g, 5);
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.nnz_power, oracle::walk_pairs(17, g.edges(), r.k)) << "k=" << r.k;
    EXPECT_LE(r.nnz_k_adjacency, r.nnz_power);
  }
  EXPECT_EQ(rows[1].nnz_k_adjacency, 55u);
  EXPECT_EQ(rows[1].nnz_power, 87u);
  EXPECT_THROW(sparsity_report(g, 0), ConfigError);
}

TEST(Sparsity, HighOrderPowersMatchRepeatedProducts) {
  const auto g = chain(6);
  const auto powers = normalized_adjacency_powers(g, 3);
  ASSERT_EQ(powers.size(), 4u);
  const auto base = oracle::normalize(testutil::to_mat(
      ad::add(g.adjacency(), ad::Tensor::identity(6))));
  oracle::Mat acc = testutil::to_mat(ad::Tensor::identity(6));
  for (std::size_t k = 0; k <= 3; ++k) {
    EXPECT_LT(testutil::max_abs_diff(testutil::values(powers[k]), acc.v), 1e-14);
    acc = oracle::matmul(acc, base);
  }
}
