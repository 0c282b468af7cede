#include "netest/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netest/digraph.hpp"
#include "netest/error.hpp"

namespace netest {

namespace {

// Product-state budget for the numeric oracle on networked designs.
constexpr std::size_t kOracleStateLimit = 600;

void require_self_damped_system(const StructuredMatrix& a_pattern) {
  auto missing = missing_self_loops(a_pattern);
  if (missing.empty()) return;
  std::string list;
  for (std::size_t k = 0; k < missing.size() && k < 16; ++k) {
    if (k) list += ", ";
    list += std::to_string(missing[k]);
  }
  if (missing.size() > 16) list += ", ...";
  throw Error(ErrorKind::kUnsupportedStructure,
              "the design pipeline requires a self-damped system (a self-loop "
              "on every state); missing on states [" +
                  list + "]");
}

SccSummary summarize(const SccDecomposition& dec) {
  SccSummary s;
  s.state_count = dec.node_count();
  s.component_count = dec.component_count();
  s.parent_components = parent_sccs(dec);
  for (std::size_t p : s.parent_components) {
    s.parent_members.push_back(dec.components[p]);
  }
  s.min_agents = s.parent_components.size();
  return s;
}

// One agent suffices for a strongly connected system; pick the cheapest
// (agent, state) pair, smallest indices on ties.
DesignSolution single_agent_design(const StructuredMatrix& a_pattern,
                                   const MeasurementCosts& costs,
                                   const SccSummary& summary) {
  const std::size_t agents = costs.agent_count();
  const std::size_t n = costs.state_count();
  double best = kInfiniteCost;
  std::size_t best_agent = 0, best_state = 0;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t m = 0; m < n; ++m) {
      const double c = costs.delta(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(m));
      if (c < best) {
        best = c;
        best_agent = i;
        best_state = m;
      }
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorKind::kInfeasible,
                "parent SCC " + std::to_string(summary.parent_components[0]) +
                    " cannot be measured by any agent (all costs infinite)");
  }
  DesignSolution sol;
  sol.agent_count = agents;
  sol.state_count = n;
  sol.analysis = summary;
  sol.measurement_pattern =
      StructuredMatrix(agents, n, {Position{best_agent, best_state}});
  sol.network_pattern = StructuredMatrix::identity(agents);
  sol.delta_cap = Eigen::MatrixXd(static_cast<Eigen::Index>(agents), 1);
  for (std::size_t i = 0; i < agents; ++i) {
    double row_best = kInfiniteCost;
    for (std::size_t m = 0; m < n; ++m) {
      row_best = std::min(row_best, costs.delta(static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(m)));
    }
    sol.delta_cap(static_cast<Eigen::Index>(i), 0) = row_best;
  }
  for (std::size_t i = 0; i < agents; ++i) {
    AgentMeasurement am;
    am.agent = i;
    if (i == best_agent) {
      am.parent_component = summary.parent_components[0];
      am.state = best_state;
      am.cost = best;
    }
    sol.measurements.push_back(am);
  }
  sol.measurement_cost = best;
  sol.communication_cost = 0.0;
  sol.total_cost = best;
  sol.notes.push_back(
      "strongly connected system: agent " + std::to_string(best_agent) +
      " observes it alone, no communication network needed");
  sol.verification =
      verify_solution(a_pattern, sol.measurement_pattern, sol.network_pattern)
          .report;
  return sol;
}

}  // namespace

SccSummary summarize_sccs(const StructuredMatrix& a_pattern) {
  return summarize(scc_decompose(system_digraph(a_pattern)));
}

DesignSolution solve_mcne(const StructuredMatrix& a_pattern,
                          const MeasurementCosts& costs,
                          const CommunicationCosts& comm,
                          const SolveOptions& options) {
  if (!a_pattern.is_square()) {
    throw Error(ErrorKind::kInvalidInput, "system pattern must be square");
  }
  require_self_damped_system(a_pattern);
  costs.validate();
  const std::size_t n = a_pattern.rows();
  const std::size_t agents = costs.agent_count();
  if (costs.state_count() != n) {
    throw Error(ErrorKind::kInvalidInput,
                "measurement costs cover " +
                    std::to_string(costs.state_count()) +
                    " states, system has " + std::to_string(n));
  }
  if (comm.agent_count() != agents ||
      comm.eta.cols() != static_cast<Eigen::Index>(agents)) {
    throw Error(ErrorKind::kInvalidInput,
                "communication costs must be " + std::to_string(agents) + "x" +
                    std::to_string(agents));
  }

  SccDecomposition dec = scc_decompose(system_digraph(a_pattern));
  SccSummary summary = summarize(dec);

  if (summary.min_agents == 1 && agents > 1 && !options.allow_extra_agents) {
    return single_agent_design(a_pattern, costs, summary);
  }

  ReducedCosts reduced =
      reduce_costs(costs, dec, {.allow_extra_agents = options.allow_extra_agents});
  Assignment assignment = hungarian(reduced.delta_cap);
  NetworkDesign tree = minimum_spanning_tree(comm);

  DesignSolution sol;
  sol.agent_count = agents;
  sol.state_count = n;
  sol.analysis = summary;
  sol.delta_cap = reduced.delta_cap;
  sol.column_of_agent = assignment.column_of_row;
  sol.measurement_pattern = assignment_to_measurement(assignment, reduced, n);
  sol.network_pattern = tree_to_network(tree, agents);
  sol.links = tree.edges;
  for (std::size_t i = 0; i < agents; ++i) {
    const std::size_t col = assignment.column_of_row[i];
    AgentMeasurement am;
    am.agent = i;
    am.cost = reduced.delta_cap(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(col));
    if (col < reduced.parent_components.size()) {
      am.parent_component = reduced.parent_components[col];
      am.state = reduced.argmin_state[i][col];
    }
    sol.measurements.push_back(am);
  }
  sol.measurement_cost = assignment.total_cost;
  sol.communication_cost = tree.total_cost;
  sol.total_cost = sol.measurement_cost + sol.communication_cost;
  if (reduced.padded_columns > 0) {
    sol.notes.push_back(std::to_string(reduced.padded_columns) +
                        " surplus agent(s) padded with zero-cost dummy SCCs; "
                        "they take no measurement and relay over the tree");
  }

  sol.verification =
      verify_solution(a_pattern, sol.measurement_pattern, sol.network_pattern)
          .report;
  if (!sol.verification.observable) {
    throw Error(ErrorKind::kVerification,
                "internal error: the assembled design is not networked "
                "observable");
  }
  return sol;
}

VerificationResult verify_solution(const StructuredMatrix& a_pattern,
                                   const MeasurementStructure& measurements,
                                   const StructuredMatrix& network,
                                   std::size_t oracle_trials,
                                   std::uint64_t seed) {
  if (!a_pattern.is_square() || !network.is_square() ||
      measurements.cols() != a_pattern.rows() ||
      measurements.rows() != network.rows()) {
    throw Error(ErrorKind::kInvalidInput,
                "solution dimensions do not match the system");
  }
  bool has_links = false;
  for (const auto& p : network.positions()) has_links |= p.row != p.col;
  std::vector<std::size_t> measuring_agents;
  for (std::size_t i = 0; i < measurements.rows(); ++i) {
    if (!measurements.row_support(i).empty()) measuring_agents.push_back(i);
  }

  VerificationResult result;
  if (!has_links && measuring_agents.size() == 1 && network.rows() > 1) {
    auto measured = measurements.row_support(measuring_agents[0]);
    result.report = is_structurally_observable(a_pattern, measured);
    result.report.method = CheckMethod::kSingleAgent;
    if (oracle_trials > 0) {
      result.oracle =
          generic_rank_oracle(a_pattern, measured, oracle_trials, seed);
    }
    return result;
  }

  result.report =
      check_networked_observability(a_pattern, measurements, network);
  if (oracle_trials > 0) {
    StructuredMatrix u = network.with_diagonal();
    if (u.rows() * a_pattern.rows() > kOracleStateLimit) {
      throw Error(ErrorKind::kSizeGuard,
                  "numeric oracle limited to " +
                      std::to_string(kOracleStateLimit) + " product states");
    }
    NetworkedStructure net = build_networked_structure(a_pattern, measurements, u);
    result.oracle = generic_rank_oracle(net.kron_pattern, dc_measured_states(net),
                                        oracle_trials, seed);
  }
  return result;
}

VerificationResult verify_solution(const StructuredMatrix& a_pattern,
                                   const DesignSolution& solution,
                                   std::size_t oracle_trials,
                                   std::uint64_t seed) {
  return verify_solution(a_pattern, solution.measurement_pattern,
                         solution.network_pattern, oracle_trials, seed);
}

}  // namespace netest
