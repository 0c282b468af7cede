#include <gtest/gtest.h>

#include <algorithm>

#include "netest/digraph.hpp"
#include "netest/error.hpp"
#include "netest/observability.hpp"
#include "test_support.hpp"

namespace netest {
namespace {

StructuredMatrix chain3() {
  // 0 -> 1 -> 2 with self-loops.
  return StructuredMatrix(3, 3, {{0, 0}, {1, 1}, {2, 2}, {1, 0}, {2, 1}});
}

TEST(OutputConnectivity, Examples) {
  const std::size_t two[] = {2}, zero[] = {0};
  auto r = output_connected(chain3(), two);
  EXPECT_TRUE(r.connected);
  EXPECT_TRUE(r.unreached.empty());
  auto s = output_connected(StructuredMatrix::identity(2), zero);
  EXPECT_FALSE(s.connected);
  EXPECT_EQ(s.unreached, std::vector<std::size_t>{1});
}

TEST(StructuralRank, Examples) {
  EXPECT_EQ(structural_rank(StructuredMatrix::identity(5)), 5u);
  EXPECT_EQ(structural_rank(StructuredMatrix(2, 2, {{0, 0}, {1, 0}})), 1u);
  EXPECT_EQ(structural_rank(StructuredMatrix(2, 4, {{0, 3}, {1, 3}, {1, 2}})), 2u);
}

// Maximum matching by exhaustive search over row assignments.
std::size_t matching_oracle(const StructuredMatrix& m) {
  std::vector<bool> used(m.cols(), false);
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t row, std::size_t size) -> void {
    if (row == m.rows()) {
      best = std::max(best, size);
      return;
    }
    self(self, row + 1, size);
    for (std::size_t c : m.row_support(row)) {
      if (!used[c]) {
        used[c] = true;
        self(self, row + 1, size + 1);
        used[c] = false;
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

TEST(StructuralRank, MatchesExhaustiveMatching) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 7, cols = 1 + rng() % 7;
    std::bernoulli_distribution coin(0.3);
    std::vector<Position> pos;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (coin(rng)) pos.push_back({i, j});
      }
    }
    StructuredMatrix m(rows, cols, pos);
    EXPECT_EQ(structural_rank(m), matching_oracle(m));
  }
}

TEST(StructuralObservability, Examples) {
  // Strongly connected self-damped system: one measurement suffices.
  StructuredMatrix ring(3, 3, {{0, 0}, {1, 1}, {2, 2}, {1, 0}, {2, 1}, {0, 2}});
  const std::size_t one[] = {1};
  EXPECT_TRUE(is_structurally_observable(ring, one).observable);

  // Two parents {1}, {2} fed by {0}; only {1} measured.
  StructuredMatrix fork(3, 3, {{0, 0}, {1, 1}, {2, 2}, {1, 0}, {2, 0}});
  auto r = is_structurally_observable(fork, one);
  EXPECT_FALSE(r.observable);
  EXPECT_FALSE(r.output_connected);
  EXPECT_EQ(r.unreached_nodes, std::vector<std::size_t>{2});

  StructuredMatrix not_damped(2, 2, {{0, 1}});
  auto s = is_structurally_observable(not_damped, one);
  EXPECT_FALSE(s.observable);
  EXPECT_EQ(s.structural_rank, 1u);
}

TEST(ParentCoverage, Examples) {
  const std::size_t zero[] = {0};
  EXPECT_TRUE(parent_scc_coverage(StructuredMatrix::identity(1), zero).covered);
  StructuredMatrix fork(3, 3, {{0, 0}, {1, 1}, {2, 2}, {1, 0}, {2, 0}});
  const std::size_t one[] = {1};
  auto c = parent_scc_coverage(fork, one);
  EXPECT_FALSE(c.covered);
  EXPECT_EQ(c.uncovered_parents, std::vector<std::size_t>{2});
}

TEST(ParentCoverage, RequiresSelfDamping) {
  const std::size_t zero[] = {0};
  try {
    parent_scc_coverage(StructuredMatrix(2, 2, {{0, 1}, {0, 0}}), zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupportedStructure);
  }
}

TEST(ParentCoverage, EquivalentToTwoConditionTest) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    auto a = testing::random_pattern(n, 0.12, rng);
    auto measured = testing::random_subset(n, 0.25, rng);
    EXPECT_EQ(parent_scc_coverage(a, measured).covered,
              is_structurally_observable(a, measured).observable);
  }
}

TEST(ParentCoverage, MonotoneInMeasurements) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    auto a = testing::random_pattern(n, 0.15, rng);
    auto measured = testing::random_subset(n, 0.3, rng);
    if (!parent_scc_coverage(a, measured).covered) continue;
    measured.push_back(rng() % n);
    std::sort(measured.begin(), measured.end());
    measured.erase(std::unique(measured.begin(), measured.end()), measured.end());
    EXPECT_TRUE(parent_scc_coverage(a, measured).covered);
  }
}

// Five agents, one per parent of a star-shaped system; tree links.
struct StarCase {
  StructuredMatrix a;
  StructuredMatrix c;
  std::vector<Edge> tree;
};

StarCase star_case() {
  std::vector<Position> pos;
  for (std::size_t v = 0; v < 6; ++v) pos.push_back({v, v});
  for (std::size_t p = 1; p < 6; ++p) pos.push_back({p, 0});  // 0 feeds every parent
  StarCase s{StructuredMatrix(6, 6, pos), {}, {{0, 4}, {1, 4}, {2, 4}, {1, 3}}};
  std::vector<Position> c;
  for (std::size_t i = 0; i < 5; ++i) c.push_back({i, i + 1});
  s.c = StructuredMatrix(5, 6, c);
  return s;
}

StructuredMatrix tree_pattern(std::size_t agents, const std::vector<Edge>& edges) {
  std::vector<Position> pos;
  for (std::size_t i = 0; i < agents; ++i) pos.push_back({i, i});
  for (auto [a, b] : edges) {
    pos.push_back({a, b});
    pos.push_back({b, a});
  }
  return StructuredMatrix(agents, agents, pos);
}

TEST(Networked, SingleAgentReducesToPair) {
  StructuredMatrix c(1, 3, {{0, 2}});
  EXPECT_TRUE(is_networked_observable(chain3(), c, StructuredMatrix::identity(1)));
  StructuredMatrix c0(1, 3, {{0, 0}});
  EXPECT_FALSE(is_networked_observable(chain3(), c0, StructuredMatrix::identity(1)));
}

TEST(Networked, SpanningTreeObservableAndEachEdgeCritical) {
  auto s = star_case();
  auto full = check_networked_observability(s.a, s.c, tree_pattern(5, s.tree));
  EXPECT_TRUE(full.observable);
  EXPECT_EQ(full.method, CheckMethod::kKronecker);
  for (std::size_t drop = 0; drop < s.tree.size(); ++drop) {
    auto edges = s.tree;
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(drop));
    EXPECT_FALSE(is_networked_observable(s.a, s.c, tree_pattern(5, edges)));
  }
}

TEST(Networked, ProductReachabilityAgreesWithKronecker) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 1 + rng() % 7, agents = 1 + rng() % 5;
    auto a = testing::random_pattern(n, 0.2, rng);
    auto u = testing::random_pattern(agents, 0.3, rng);
    std::vector<Position> cpos;
    for (std::size_t i = 0; i < agents; ++i) {
      for (std::size_t m : testing::random_subset(n, 0.2, rng)) cpos.push_back({i, m});
    }
    if (cpos.empty()) cpos.push_back({0, 0});
    StructuredMatrix c(agents, n, cpos);
    auto kron = check_networked_observability(a, c, u);
    auto implicit = check_networked_observability(a, c, u, 0);
    EXPECT_EQ(kron.method, CheckMethod::kKronecker);
    EXPECT_EQ(implicit.method, CheckMethod::kProductReachability);
    EXPECT_EQ(kron.observable, implicit.observable);
    EXPECT_EQ(kron.output_connected, implicit.output_connected);
    EXPECT_EQ(kron.unreached_nodes, implicit.unreached_nodes);
  }
}

TEST(Networked, RejectsNonSelfDamped) {
  StructuredMatrix a(2, 2, {{0, 1}, {0, 0}});
  EXPECT_THROW(check_networked_observability(a, StructuredMatrix(1, 2, {{0, 0}}),
                                             StructuredMatrix::identity(1)),
               Error);
}

TEST(Oracle, IdentityFullyMeasured) {
  const std::size_t all[] = {0, 1, 2};
  auto t = generic_rank_oracle(StructuredMatrix::identity(3), all, 10, 1);
  EXPECT_EQ(t.observable_trials, 10u);
  EXPECT_EQ(t.trials, 10u);
}

TEST(Oracle, UnobservableNeverFullRank) {
  StructuredMatrix fork(3, 3, {{0, 0}, {1, 1}, {2, 2}, {1, 0}, {2, 0}});
  const std::size_t one[] = {1};
  EXPECT_EQ(generic_rank_oracle(fork, one, 50, 2).observable_trials, 0u);
}

TEST(Oracle, DeterministicForSeed) {
  std::mt19937_64 rng(4);
  auto a = testing::random_pattern(8, 0.2, rng);
  const std::size_t m[] = {0, 3};
  auto x = generic_rank_oracle(a, m, 30, 99);
  auto y = generic_rank_oracle(a, m, 30, 99);
  EXPECT_EQ(x.observable_trials, y.observable_trials);
}

TEST(Oracle, RankOfKnownPair) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 1, 1;
  Eigen::MatrixXd c(1, 2);
  c << 0, 1;
  EXPECT_EQ(observability_rank(a, c), 2u);
  c << 1, 0;
  // x1 is driven by x0 but not vice versa; measuring x0 misses x1.
  EXPECT_EQ(observability_rank(a, c), 1u);
}

}  // namespace
}  // namespace netest
