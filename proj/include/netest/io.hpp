#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "netest/digraph.hpp"
#include "netest/mccn.hpp"
#include "netest/mcss.hpp"
#include "netest/observability.hpp"
#include "netest/solver.hpp"

namespace netest {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSolutionSchema = "netest/v1";

struct ProblemOptions {
  double relative_tol = kDefaultRelativeStructureTolerance;
  bool allow_extra_agents = false;
  std::size_t oracle_trials = 0;
  std::uint64_t seed = 0;
};

/// Parsed problem file. `system` already carries the implicit self-loops
/// when `self_loops_implicit` is set.
struct ProblemSpec {
  StructuredMatrix system;
  bool self_loops_implicit = true;
  std::size_t duplicate_edges = 0;
  std::optional<MeasurementCosts> delta;
  std::optional<CommunicationCosts> eta;
  ProblemOptions options;
};

/// Reads JSON text, reporting syntax errors with line and column.
Json parse_json_text(const std::string& text, const std::string& source);
Json read_json_file(const std::filesystem::path& path);

/// Accepts a numeric 2-D array. Entries may be numbers, the strings "inf" /
/// "infinity" (any case, optional '+'), or null (infinite) when
/// `allow_infinite` is set.
Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what,
                                 bool allow_infinite);
Json matrix_to_json(const Eigen::MatrixXd& m);

/// {rows, cols, entries: [[r, c], ...]} (optional weight as third element).
StructuredMatrix structured_from_json(const Json& j, const std::string& what);
Json structured_to_json(const StructuredMatrix& m);

ProblemSpec problem_from_json(const Json& j, const std::string& source,
                              const std::filesystem::path& base_dir);
ProblemSpec load_problem(const std::filesystem::path& path);

/// Problem input that is either a ProblemSpec JSON document or a bare edge
/// list; the latter gets implicit self-loops unless disabled.
ProblemSpec load_problem_or_edge_list(const std::filesystem::path& path,
                                      bool self_loops_implicit = true);

Json report_to_json(const ObservabilityReport& report);
Json oracle_to_json(const OracleTally& tally);
Json summary_to_json(const SccSummary& summary, bool self_damped,
                     const std::vector<std::size_t>& missing_self_loops);
Json solution_to_json(const DesignSolution& solution);

/// Stable text form of a solution document.
std::string dump_json(const Json& j);

/// The parts of a saved solution needed to re-verify it.
struct SavedSolution {
  MeasurementStructure measurement_pattern;
  StructuredMatrix network_pattern;
  std::size_t agent_count = 0;
  std::size_t state_count = 0;
};

SavedSolution solution_from_json(const Json& j, const std::string& source);

/// System digraph with parent SCCs as dashed clusters and measured states
/// drawn as double circles. Self-loops are left implicit.
void write_system_dot(std::ostream& out, const StructuredMatrix& a_pattern,
                      const SccDecomposition& dec,
                      const MeasurementStructure& measurements);

/// Undirected communication tree with link costs as labels.
void write_network_dot(std::ostream& out, std::size_t agent_count,
                       const std::vector<Link>& links);

}  // namespace netest
