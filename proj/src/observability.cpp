#include "netest/observability.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>
#include <string>

#include "netest/digraph.hpp"
#include "netest/error.hpp"

namespace netest {

std::string_view to_string(CheckMethod method) {
  switch (method) {
    case CheckMethod::kDirect:
      return "direct";
    case CheckMethod::kKronecker:
      return "kronecker";
    case CheckMethod::kProductReachability:
      return "product-reachability";
    case CheckMethod::kSingleAgent:
      return "single-agent";
  }
  return "unknown";
}

namespace {

void check_measured(std::size_t n, std::span<const std::size_t> measured) {
  for (std::size_t s : measured) {
    if (s >= n) {
      throw Error(ErrorKind::kInvalidInput,
                  "measured state " + std::to_string(s) + " out of range for " +
                      std::to_string(n) + " states");
    }
  }
}

// Rows not listed in `reached` (both ascending).
std::vector<std::size_t> complement(std::size_t n,
                                    const std::vector<std::size_t>& reached) {
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (k < reached.size() && reached[k] == v) {
      ++k;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

}  // namespace

OutputConnectivity output_connected(const StructuredMatrix& a_pattern,
                                    std::span<const std::size_t> measured) {
  Digraph g = system_digraph(a_pattern);
  check_measured(g.node_count(), measured);
  OutputConnectivity result;
  result.unreached =
      complement(g.node_count(), reverse_reachable(g, measured));
  result.connected = result.unreached.empty();
  return result;
}

std::size_t structural_rank(const StructuredMatrix& pattern) {
  const std::size_t rows = pattern.rows(), cols = pattern.cols();
  if (rows == 0 || cols == 0) return 0;
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> offsets(rows + 1, 0), adj;
  for (const auto& p : pattern.positions()) ++offsets[p.row + 1];
  for (std::size_t r = 0; r < rows; ++r) offsets[r + 1] += offsets[r];
  adj.resize(pattern.nonzeros());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& p : pattern.positions()) adj[cursor[p.row]++] = p.col;
  }

  std::vector<std::size_t> match_row(rows, kNone), match_col(cols, kNone);
  std::vector<std::size_t> dist(rows);
  std::size_t matching = 0;

  auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found_free = false;
    for (std::size_t r = 0; r < rows; ++r) {
      if (match_row[r] == kNone) {
        dist[r] = 0;
        q.push(r);
      } else {
        dist[r] = kInf;
      }
    }
    while (!q.empty()) {
      std::size_t r = q.front();
      q.pop();
      for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) {
        std::size_t mate = match_col[adj[k]];
        if (mate == kNone) {
          found_free = true;
        } else if (dist[mate] == kInf) {
          dist[mate] = dist[r] + 1;
          q.push(mate);
        }
      }
    }
    return found_free;
  };

  // Iterative layered DFS; `it` keeps each row's adjacency cursor.
  std::vector<std::size_t> it(rows);
  std::vector<std::size_t> path;
  auto dfs = [&](std::size_t root) {
    path.assign(1, root);
    while (!path.empty()) {
      std::size_t r = path.back();
      if (it[r] == offsets[r + 1]) {
        dist[r] = kInf;
        path.pop_back();
        if (!path.empty()) ++it[path.back()];
        continue;
      }
      std::size_t c = adj[it[r]];
      std::size_t mate = match_col[c];
      if (mate == kNone) {
        for (std::size_t row : path) {
          std::size_t col = adj[it[row]];
          match_col[col] = row;
          match_row[row] = col;
        }
        return true;
      }
      if (dist[mate] == dist[r] + 1) {
        path.push_back(mate);
      } else {
        ++it[r];
      }
    }
    return false;
  };

  while (bfs()) {
    for (std::size_t r = 0; r < rows; ++r) it[r] = offsets[r];
    for (std::size_t r = 0; r < rows; ++r) {
      if (match_row[r] == kNone && dfs(r)) ++matching;
    }
  }
  return matching;
}

namespace {

StructuredMatrix stack_measurement_rows(const StructuredMatrix& a_pattern,
                                        std::span<const std::size_t> measured) {
  const std::size_t n = a_pattern.rows();
  std::vector<Position> positions(a_pattern.positions().begin(),
                                  a_pattern.positions().end());
  std::vector<std::size_t> rows(measured.begin(), measured.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    positions.push_back({n + k, rows[k]});
  }
  return StructuredMatrix(n + std::max<std::size_t>(rows.size(), 1), n,
                          std::move(positions));
}

}  // namespace

ObservabilityReport is_structurally_observable(
    const StructuredMatrix& a_pattern, std::span<const std::size_t> measured) {
  auto connectivity = output_connected(a_pattern, measured);
  ObservabilityReport report;
  report.output_connected = connectivity.connected;
  report.unreached_nodes = std::move(connectivity.unreached);
  report.structural_rank =
      structural_rank(stack_measurement_rows(a_pattern, measured));
  report.structurally_full_rank = report.structural_rank == a_pattern.rows();
  report.observable = report.output_connected && report.structurally_full_rank;
  report.method = CheckMethod::kDirect;
  return report;
}

namespace {

void require_self_damped(const StructuredMatrix& a_pattern) {
  auto missing = missing_self_loops(a_pattern);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t k = 0; k < missing.size() && k < 16; ++k) {
    if (k) list += ", ";
    list += std::to_string(missing[k]);
  }
  if (missing.size() > 16) list += ", ...";
  throw Error(ErrorKind::kUnsupportedStructure,
              "system is not self-damped; missing self-loops on states [" +
                  list + "]");
}

}  // namespace

ParentCoverage parent_scc_coverage(const StructuredMatrix& a_pattern,
                                   std::span<const std::size_t> measured) {
  require_self_damped(a_pattern);
  Digraph g = system_digraph(a_pattern);
  check_measured(g.node_count(), measured);
  SccDecomposition dec = scc_decompose(g);
  std::vector<bool> hit(dec.component_count(), false);
  for (std::size_t s : measured) hit[dec.component_of[s]] = true;
  ParentCoverage out;
  for (std::size_t p : parent_sccs(dec)) {
    if (!hit[p]) out.uncovered_parents.push_back(p);
  }
  out.covered = out.uncovered_parents.empty();
  return out;
}

std::vector<std::size_t> dc_measured_states(const NetworkedStructure& net) {
  std::vector<std::size_t> out;
  for (const auto& p : net.dc_pattern.positions()) {
    if (p.row == p.col) out.push_back(p.row);
  }
  return out;
}

namespace {

// Exact networked test without materializing U (x) A. With self-loops on
// both factors, product state (i, p) reaches (k, s) iff k is reachable from
// i in U's digraph and s from p in A's digraph.
ObservabilityReport product_reachability_check(
    const StructuredMatrix& a_pattern, const MeasurementStructure& measurements,
    const StructuredMatrix& u_pattern) {
  const std::size_t n = a_pattern.rows();
  const std::size_t agents = u_pattern.rows();
  Digraph a_graph = system_digraph(a_pattern);
  Digraph u_graph = system_digraph(u_pattern);
  auto hoods = agent_neighborhoods(u_pattern);

  // Measured states visible in each agent's block of D_C.
  std::vector<std::vector<std::size_t>> block_measured(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j : hoods[i]) {
      auto sup = measurements.row_support(j);
      block_measured[i].insert(block_measured[i].end(), sup.begin(), sup.end());
    }
  }

  ObservabilityReport report;
  report.method = CheckMethod::kProductReachability;
  report.structural_rank = agents * n;
  report.structurally_full_rank = true;
  for (std::size_t i = 0; i < agents; ++i) {
    std::size_t seed[] = {i};
    std::vector<std::size_t> targets;
    for (std::size_t k : forward_reachable(u_graph, seed)) {
      targets.insert(targets.end(), block_measured[k].begin(),
                     block_measured[k].end());
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (std::size_t p : complement(n, reverse_reachable(a_graph, targets))) {
      report.unreached_nodes.push_back(i * n + p);
    }
  }
  report.output_connected = report.unreached_nodes.empty();
  report.observable = report.output_connected;
  return report;
}

}  // namespace

ObservabilityReport check_networked_observability(
    const StructuredMatrix& a_pattern, const MeasurementStructure& measurements,
    const StructuredMatrix& u_pattern, std::size_t kronecker_limit) {
  if (!a_pattern.is_square() || !u_pattern.is_square()) {
    throw Error(ErrorKind::kInvalidInput,
                "system and network patterns must be square");
  }
  if (measurements.rows() != u_pattern.rows() ||
      measurements.cols() != a_pattern.rows()) {
    throw Error(ErrorKind::kInvalidInput,
                "measurement structure is " +
                    std::to_string(measurements.rows()) + "x" +
                    std::to_string(measurements.cols()) + ", expected " +
                    std::to_string(u_pattern.rows()) + "x" +
                    std::to_string(a_pattern.rows()));
  }
  require_self_damped(a_pattern);
  StructuredMatrix u = u_pattern.with_diagonal();
  const std::size_t product_states = u.rows() * a_pattern.rows();
  if (product_states > kronecker_limit) {
    return product_reachability_check(a_pattern, measurements, u);
  }

  NetworkedStructure net = build_networked_structure(a_pattern, measurements, u);
  std::vector<std::size_t> measured = dc_measured_states(net);
  auto connectivity = output_connected(net.kron_pattern, measured);

  std::vector<Position> stacked(net.kron_pattern.positions().begin(),
                                net.kron_pattern.positions().end());
  for (const auto& p : net.dc_pattern.positions()) {
    stacked.push_back({product_states + p.row, p.col});
  }
  StructuredMatrix augmented(2 * product_states, product_states,
                             std::move(stacked));

  ObservabilityReport report;
  report.method = CheckMethod::kKronecker;
  report.output_connected = connectivity.connected;
  report.unreached_nodes = std::move(connectivity.unreached);
  report.structural_rank = structural_rank(augmented);
  report.structurally_full_rank = report.structural_rank == product_states;
  report.observable = report.output_connected && report.structurally_full_rank;
  return report;
}

bool is_networked_observable(const StructuredMatrix& a_pattern,
                             const MeasurementStructure& measurements,
                             const StructuredMatrix& u_pattern) {
  return check_networked_observability(a_pattern, measurements, u_pattern)
      .observable;
}

namespace {

// Orthonormal row basis of `m` using the relative cut n * eps * sigma_max.
}  // namespace

std::size_t observability_rank(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& c) {
  if (a.rows() != a.cols() || c.cols() != a.rows()) {
    throw Error(ErrorKind::kInvalidInput,
                "observability pair has inconsistent dimensions");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  const double tol = std::sqrt(std::numeric_limits<double>::epsilon());
  // Block Arnoldi on the rows of C: every accepted direction q queues q*A.
  // Gram-Schmidt only forms linear combinations, so a column that is exactly
  // zero in every C A^k stays exactly zero and cannot add spurious rank.
  std::vector<Eigen::RowVectorXd> basis;
  std::deque<Eigen::RowVectorXd> pending;
  for (Eigen::Index r = 0; r < c.rows(); ++r) pending.push_back(c.row(r));
  while (!pending.empty() && basis.size() < n) {
    Eigen::RowVectorXd v = std::move(pending.front());
    pending.pop_front();
    const double norm = v.norm();
    if (!(norm > 0.0)) continue;
    v /= norm;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= v.dot(q) * q;
    }
    const double residual = v.norm();
    if (residual <= tol) continue;
    v /= residual;
    pending.push_back(v * a);
    basis.push_back(std::move(v));
  }
  return basis.size();
}

OracleTally generic_rank_oracle(const StructuredMatrix& pattern,
                                std::span<const std::size_t> measured,
                                std::size_t trials, std::uint64_t seed) {
  if (!pattern.is_square()) {
    throw Error(ErrorKind::kInvalidInput, "oracle pattern must be square");
  }
  if (trials == 0) {
    throw Error(ErrorKind::kInvalidInput, "oracle needs at least one trial");
  }
  const std::size_t n = pattern.rows();
  check_measured(n, measured);
  std::vector<std::size_t> rows(measured.begin(), measured.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(rows[k])) = 1.0;
  }

  OracleTally tally;
  tally.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t),
                      static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> magnitude(0.5, 1.5);
    std::bernoulli_distribution negative(0.5);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (const auto& p : pattern.positions()) {
      double w = magnitude(rng);
      if (negative(rng)) w = -w;
      a(static_cast<Eigen::Index>(p.row), static_cast<Eigen::Index>(p.col)) = w;
    }
    if (observability_rank(a, c) == n) ++tally.observable_trials;
  }
  return tally;
}

}  // namespace netest
