#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

#include "netest/digraph.hpp"
#include "netest/sysmodel.hpp"

namespace netest {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNoState = std::numeric_limits<std::size_t>::max();

/// delta(i, m): cost for agent i to measure state m; +inf when impossible.
struct MeasurementCosts {
  Eigen::MatrixXd delta;

  std::size_t agent_count() const noexcept {
    return static_cast<std::size_t>(delta.rows());
  }
  std::size_t state_count() const noexcept {
    return static_cast<std::size_t>(delta.cols());
  }

  /// Throws Error(kInvalidInput) on NaN or negative entries.
  void validate() const;
};

/// Agent versus parent-SCC costs. Column j stands for parent component
/// parent_components[j]; padded columns (surplus agents) have cost zero and
/// kNoState as their argmin.
struct ReducedCosts {
  Eigen::MatrixXd delta_cap;
  std::vector<std::vector<std::size_t>> argmin_state;  // [agent][column]
  std::vector<std::size_t> parent_components;
  std::size_t padded_columns = 0;
};

struct ReduceOptions {
  /// Accept more agents than parent SCCs by padding with zero-cost dummy
  /// columns; surplus agents then take no measurement.
  bool allow_extra_agents = false;
};

/// Minimum cost per (agent, parent SCC), ties to the smallest state.
/// Throws Error(kInvalidInput) on an agent-count mismatch and
/// Error(kInfeasible) when no agent can measure some parent SCC.
ReducedCosts reduce_costs(const MeasurementCosts& costs,
                          const SccDecomposition& dec,
                          const ReduceOptions& options = {});

/// A permutation solution with the dual potentials that certify it.
struct Assignment {
  std::vector<std::size_t> column_of_row;
  double total_cost = 0.0;
  std::vector<double> row_potential;
  std::vector<double> column_potential;

  std::size_t size() const noexcept { return column_of_row.size(); }
  /// 0-1 matrix z with z(i, column_of_row[i]) = 1.
  Eigen::MatrixXi z() const;
};

/// Shortest-augmenting-path Hungarian method with potentials, O(N^3).
/// Among optimal permutations the lexicographically smallest (by row) is
/// returned. Infinite entries are forbidden cells. Throws Error(kInfeasible)
/// naming a set of rows whose finite columns are too few.
Assignment hungarian(const Eigen::MatrixXd& cost);

/// Sum of cost(i, perm[i]) accumulated in row order.
double permutation_cost(const Eigen::MatrixXd& cost,
                        const std::vector<std::size_t>& perm);

struct DualCheck {
  bool feasible = false;       // u_i + v_j <= c_ij everywhere (finite cells)
  bool complementary = false;  // equality on assigned cells
  double worst_violation = 0.0;
};

/// Post-hoc certificate check with absolute tolerance
/// tol * max(1, max finite |c|).
DualCheck check_dual_certificate(const Eigen::MatrixXd& cost,
                                 const Assignment& assignment,
                                 double tol = 1e-9);

struct BruteForceAssignment {
  double cost = 0.0;
  std::vector<std::size_t> column_of_row;
};

inline constexpr std::size_t kBruteForceAssignmentLimit = 9;

/// Enumerates all N! permutations in lexicographic order and keeps the
/// first strict minimum. Throws Error(kSizeGuard) for N > 9 and
/// Error(kInfeasible) when every permutation is infinite.
BruteForceAssignment brute_force_assignment(const Eigen::MatrixXd& cost);

/// Measurement pattern (N x n): agent i measures the argmin state of its
/// assigned parent SCC; agents on padded columns get an empty row.
MeasurementStructure assignment_to_measurement(const Assignment& z,
                                               const ReducedCosts& reduced,
                                               std::size_t state_count);

}  // namespace netest
