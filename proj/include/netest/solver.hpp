#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netest/mccn.hpp"
#include "netest/mcss.hpp"
#include "netest/observability.hpp"
#include "netest/sysmodel.hpp"

namespace netest {

struct SolveOptions {
  /// Pad the assignment with zero-cost dummy SCCs when agents outnumber
  /// parent SCCs. Surplus agents take no measurement but join the tree.
  bool allow_extra_agents = false;
};

struct SccSummary {
  std::size_t state_count = 0;
  std::size_t component_count = 0;
  std::vector<std::vector<std::size_t>> parent_members;  // states per parent
  std::vector<std::size_t> parent_components;
  std::size_t min_agents = 0;
};

/// One agent's measurement in the design.
struct AgentMeasurement {
  std::size_t agent = 0;
  std::optional<std::size_t> parent_component;  // none for padded agents
  std::optional<std::size_t> state;
  double cost = 0.0;
};

struct DesignSolution {
  std::size_t agent_count = 0;
  std::size_t state_count = 0;
  MeasurementStructure measurement_pattern;
  StructuredMatrix network_pattern;
  Eigen::MatrixXd delta_cap;
  std::vector<std::size_t> column_of_agent;  // empty for single-agent designs
  std::vector<AgentMeasurement> measurements;
  std::vector<Link> links;
  double measurement_cost = 0.0;
  double communication_cost = 0.0;
  double total_cost = 0.0;
  ObservabilityReport verification;
  SccSummary analysis;
  std::vector<std::string> notes;
};

SccSummary summarize_sccs(const StructuredMatrix& a_pattern);

/// Full pipeline: SCCs, cost reduction, Hungarian assignment, spanning tree,
/// then a mandatory networked observability check. Throws
/// Error(kUnsupportedStructure) for non-self-damped systems or asymmetric
/// link costs, Error(kInvalidInput) on agent-count mismatch,
/// Error(kInfeasible) for unmeasurable SCCs or a disconnected link graph,
/// and Error(kVerification) if the design fails its own check.
DesignSolution solve_mcne(const StructuredMatrix& a_pattern,
                          const MeasurementCosts& costs,
                          const CommunicationCosts& comm,
                          const SolveOptions& options = {});

struct VerificationResult {
  ObservabilityReport report;
  std::optional<OracleTally> oracle;
};

/// Re-checks a design. Designs whose network has no links and a single
/// measuring agent are checked as one agent observing the system alone.
VerificationResult verify_solution(const StructuredMatrix& a_pattern,
                                   const MeasurementStructure& measurements,
                                   const StructuredMatrix& network,
                                   std::size_t oracle_trials = 0,
                                   std::uint64_t seed = 0);

VerificationResult verify_solution(const StructuredMatrix& a_pattern,
                                   const DesignSolution& solution,
                                   std::size_t oracle_trials = 0,
                                   std::uint64_t seed = 0);

}  // namespace netest
