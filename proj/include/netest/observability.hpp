#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netest/sysmodel.hpp"

namespace netest {

/// How a verdict was reached.
enum class CheckMethod {
  kDirect,               // two-condition test on the given pair
  kKronecker,            // materialized (U (x) A, D_C) pattern
  kProductReachability,  // same test evaluated on the product graph implicitly
  kSingleAgent,          // one agent observes the system alone
};

std::string_view to_string(CheckMethod method);

struct ObservabilityReport {
  bool output_connected = false;
  std::vector<std::size_t> unreached_nodes;
  bool structurally_full_rank = false;
  std::size_t structural_rank = 0;
  bool observable = false;
  CheckMethod method = CheckMethod::kDirect;
};

struct OutputConnectivity {
  bool connected = false;
  std::vector<std::size_t> unreached;
};

/// Every state must reach a measured state in the system digraph.
OutputConnectivity output_connected(const StructuredMatrix& a_pattern,
                                    std::span<const std::size_t> measured);

/// Maximum bipartite matching between rows and columns (Hopcroft-Karp).
/// Works for rectangular patterns.
std::size_t structural_rank(const StructuredMatrix& pattern);

/// Output connectivity on A's digraph plus full structural rank of the
/// stacked pattern [A; C], where C has a unit row per measured state.
ObservabilityReport is_structurally_observable(
    const StructuredMatrix& a_pattern, std::span<const std::size_t> measured);

struct ParentCoverage {
  bool covered = false;
  std::vector<std::size_t> uncovered_parents;  // component indices
};

/// Whether every parent SCC holds a measured state. Throws
/// Error(kUnsupportedStructure) for patterns lacking a self-loop.
ParentCoverage parent_scc_coverage(const StructuredMatrix& a_pattern,
                                   std::span<const std::size_t> measured);

/// Patterns with at most this many product states are checked on the
/// materialized Kronecker pattern.
inline constexpr std::size_t kKroneckerStateLimit = 5000;

/// Observability of (U (x) A, D_C). Agents always use their own
/// information, so the diagonal of U is implied. Requires a self-damped A.
ObservabilityReport check_networked_observability(
    const StructuredMatrix& a_pattern, const MeasurementStructure& measurements,
    const StructuredMatrix& u_pattern,
    std::size_t kronecker_limit = kKroneckerStateLimit);

bool is_networked_observable(const StructuredMatrix& a_pattern,
                             const MeasurementStructure& measurements,
                             const StructuredMatrix& u_pattern);

/// Row-space dimension of [C; CA; ...; CA^{n-1}], built by Gram-Schmidt
/// over the Krylov rows. A candidate direction counts when its residual
/// after orthogonalization exceeds sqrt(eps) of its norm.
std::size_t observability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c);

struct OracleTally {
  std::size_t observable_trials = 0;
  std::size_t trials = 0;
};

/// Monte-Carlo generic rank: every pattern entry gets an independent weight
/// with magnitude uniform on [0.5, 1.5] and a random sign; measured states
/// become unit rows. Deterministic for a given seed.
OracleTally generic_rank_oracle(const StructuredMatrix& pattern,
                                std::span<const std::size_t> measured,
                                std::size_t trials, std::uint64_t seed);

/// Measured product states of a networked structure: the nonzero diagonal
/// of D_C.
std::vector<std::size_t> dc_measured_states(const NetworkedStructure& net);

}  // namespace netest
