#include "netest/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "netest/error.hpp"

namespace netest {

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& message) {
  throw ParseError(source, 0, 0, message);
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text,
                                                    std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double number_from_json(const Json& v, const std::string& what,
                        bool allow_infinite) {
  if (v.is_number()) return v.get<double>();
  if (allow_infinite) {
    if (v.is_null()) return kInfiniteCost;
    if (v.is_string()) {
      std::string s = lower(v.get<std::string>());
      if (!s.empty() && s.front() == '+') s.erase(0, 1);
      if (s == "inf" || s == "infinity") return kInfiniteCost;
    }
  }
  throw ParseError(what, 0, 0,
                   std::string("expected a number") +
                       (allow_infinite ? " or \"inf\"" : "") + ", got " +
                       v.dump());
}

std::size_t index_from_json(const Json& v, const std::string& what) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ParseError(what, 0, 0,
                     "expected a non-negative integer, got " + v.dump());
  }
  return v.get<std::size_t>();
}

Json cost_to_json(double c) {
  if (std::isinf(c)) return "inf";
  return c;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string message = e.what();
    // Drop nlohmann's "[json.exception...] parse error at line L, column C: "
    // prefix; the location is reported through ParseError instead.
    if (auto pos = message.find("] "); pos != std::string::npos) {
      message = message.substr(pos + 2);
    }
    if (auto pos = message.find(": "); pos != std::string::npos) {
      message = message.substr(pos + 2);
    }
    throw ParseError(source, line, column, message);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path.string());
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& what,
                                 bool allow_infinite) {
  if (!j.is_array() || j.empty()) {
    fail(what, "expected a non-empty 2-D array");
  }
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].empty()) {
      fail(what, "row " + std::to_string(r) + " is not a non-empty array");
    }
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) {
      fail(what, "row " + std::to_string(r) + " has " +
                     std::to_string(j[r].size()) + " entries, expected " +
                     std::to_string(cols));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string where =
          what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      const double x = number_from_json(j[r][c], where, allow_infinite);
      if (!allow_infinite && !std::isfinite(x)) fail(where, "must be finite");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x;
    }
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(cost_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

StructuredMatrix structured_from_json(const Json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("entries")) {
    fail(what, "expected an object with rows, cols and entries");
  }
  const std::size_t rows = index_from_json(j["rows"], what + ".rows");
  const std::size_t cols = index_from_json(j["cols"], what + ".cols");
  if (rows == 0 || cols == 0) fail(what, "rows and cols must be positive");
  const Json& entries = j["entries"];
  if (!entries.is_array()) fail(what + ".entries", "expected an array");
  std::vector<Position> positions;
  std::vector<double> weights;
  bool weighted = false;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string where = what + ".entries[" + std::to_string(k) + "]";
    const Json& e = entries[k];
    if (!e.is_array() || (e.size() != 2 && e.size() != 3)) {
      fail(where, "expected [row, col] or [row, col, weight]");
    }
    Position p{index_from_json(e[0], where), index_from_json(e[1], where)};
    if (p.row >= rows || p.col >= cols) fail(where, "position out of range");
    positions.push_back(p);
    if (e.size() == 3) {
      weighted = true;
      weights.push_back(number_from_json(e[2], where, false));
    } else {
      weights.push_back(1.0);
    }
  }
  if (!weighted) weights.clear();
  return StructuredMatrix(rows, cols, std::move(positions), std::move(weights));
}

Json structured_to_json(const StructuredMatrix& m) {
  Json entries = Json::array();
  auto pos = m.positions();
  auto w = m.weights();
  for (std::size_t k = 0; k < pos.size(); ++k) {
    Json e = Json::array({pos[k].row, pos[k].col});
    if (m.has_weights()) e.push_back(w[k]);
    entries.push_back(std::move(e));
  }
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["entries"] = std::move(entries);
  return out;
}

namespace {

MeasurementCosts delta_from_json(const Json& j, std::size_t states,
                                 const std::string& source) {
  MeasurementCosts costs;
  if (j.is_array()) {
    costs.delta = matrix_from_json(j, source + ": delta", true);
  } else if (j.is_object()) {
    if (!j.contains("agents")) fail(source + ": delta", "missing 'agents'");
    const std::size_t agents = index_from_json(j["agents"], source + ": delta.agents");
    if (agents == 0) fail(source + ": delta.agents", "must be positive");
    const double fallback =
        j.contains("default")
            ? number_from_json(j["default"], source + ": delta.default", true)
            : kInfiniteCost;
    costs.delta = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(agents),
                                            static_cast<Eigen::Index>(states),
                                            fallback);
    const Json& entries = j.value("entries", Json::array());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::string where =
          source + ": delta.entries[" + std::to_string(k) + "]";
      const Json& e = entries[k];
      if (!e.is_array() || e.size() != 3) {
        fail(where, "expected [agent, state, cost]");
      }
      const std::size_t a = index_from_json(e[0], where);
      const std::size_t s = index_from_json(e[1], where);
      if (a >= agents || s >= states) fail(where, "index out of range");
      costs.delta(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s)) =
          number_from_json(e[2], where, true);
    }
  } else {
    fail(source + ": delta", "expected a 2-D array or a sparse object");
  }
  try {
    costs.validate();
  } catch (const Error& e) {
    fail(source + ": delta", e.what());
  }
  if (costs.state_count() != states) {
    fail(source + ": delta", "has " + std::to_string(costs.state_count()) +
                                 " columns, system has " +
                                 std::to_string(states) + " states");
  }
  return costs;
}

StructuredMatrix system_from_json(const Json& j, const std::string& source,
                                  const std::filesystem::path& base_dir,
                                  std::size_t& duplicates) {
  if (!j.is_object()) fail(source + ": system", "expected an object");
  if (j.contains("pattern")) {
    return structured_from_json(j["pattern"], source + ": system.pattern");
  }
  Digraph g;
  if (j.contains("edge_list")) {
    if (!j["edge_list"].is_string()) {
      fail(source + ": system.edge_list", "expected a file path");
    }
    std::filesystem::path p = j["edge_list"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    g = read_edge_list_file(p.string());
  } else if (j.contains("edges")) {
    if (!j.contains("nodes")) fail(source + ": system", "missing 'nodes'");
    const std::size_t nodes = index_from_json(j["nodes"], source + ": system.nodes");
    if (nodes == 0) fail(source + ": system.nodes", "must be positive");
    std::vector<Edge> edges;
    const Json& list = j["edges"];
    if (!list.is_array()) fail(source + ": system.edges", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string where =
          source + ": system.edges[" + std::to_string(k) + "]";
      if (!list[k].is_array() || list[k].size() != 2) {
        fail(where, "expected [source, target]");
      }
      Edge e{index_from_json(list[k][0], where), index_from_json(list[k][1], where)};
      if (e.first >= nodes || e.second >= nodes) fail(where, "node out of range");
      edges.push_back(e);
    }
    g = Digraph(nodes, std::move(edges));
  } else {
    fail(source + ": system", "expected 'edges', 'edge_list' or 'pattern'");
  }
  duplicates = g.duplicate_edges_dropped();
  return pattern_from_digraph(g);
}

}  // namespace

ProblemSpec problem_from_json(const Json& j, const std::string& source,
                              const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail(source, "expected a JSON object");
  if (!j.contains("system")) fail(source, "missing 'system'");
  ProblemSpec spec;
  spec.system = system_from_json(j["system"], source, base_dir,
                                 spec.duplicate_edges);
  if (!spec.system.is_square()) fail(source + ": system", "must be square");
  if (j.contains("self_loops_implicit")) {
    if (!j["self_loops_implicit"].is_boolean()) {
      fail(source + ": self_loops_implicit", "expected a boolean");
    }
    spec.self_loops_implicit = j["self_loops_implicit"].get<bool>();
  }
  if (spec.self_loops_implicit) spec.system = spec.system.with_diagonal();

  const std::size_t n = spec.system.rows();
  if (j.contains("delta")) spec.delta = delta_from_json(j["delta"], n, source);
  if (j.contains("eta")) {
    CommunicationCosts comm;
    comm.eta = matrix_from_json(j["eta"], source + ": eta", true);
    if (comm.eta.rows() != comm.eta.cols()) fail(source + ": eta", "must be square");
    spec.eta = std::move(comm);
  }
  if (spec.delta && spec.eta && spec.eta->agent_count() != spec.delta->agent_count()) {
    fail(source, "delta has " + std::to_string(spec.delta->agent_count()) +
                     " agents but eta is " +
                     std::to_string(spec.eta->agent_count()) + "x" +
                     std::to_string(spec.eta->agent_count()));
  }
  if (j.contains("options")) {
    const Json& o = j["options"];
    if (!o.is_object()) fail(source + ": options", "expected an object");
    if (o.contains("tol")) {
      spec.options.relative_tol = number_from_json(o["tol"], source + ": options.tol", false);
    }
    if (o.contains("allow_extra_agents")) {
      spec.options.allow_extra_agents = o["allow_extra_agents"].get<bool>();
    }
    if (o.contains("oracle_trials")) {
      spec.options.oracle_trials =
          index_from_json(o["oracle_trials"], source + ": options.oracle_trials");
    }
    if (o.contains("seed")) {
      spec.options.seed = index_from_json(o["seed"], source + ": options.seed");
    }
  }
  return spec;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  return problem_from_json(read_json_file(path), path.string(),
                           path.parent_path());
}

ProblemSpec load_problem_or_edge_list(const std::filesystem::path& path,
                                      bool self_loops_implicit) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, 0, "cannot open file");
  char first = 0;
  while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {
  }
  if (first == '{') return load_problem(path);
  Digraph g = read_edge_list_file(path.string());
  ProblemSpec spec;
  spec.duplicate_edges = g.duplicate_edges_dropped();
  spec.self_loops_implicit = self_loops_implicit;
  spec.system = pattern_from_digraph(g);
  if (self_loops_implicit) spec.system = spec.system.with_diagonal();
  return spec;
}

Json report_to_json(const ObservabilityReport& report) {
  Json j;
  j["observable"] = report.observable;
  j["output_connected"] = report.output_connected;
  j["unreached_nodes"] = report.unreached_nodes;
  j["structurally_full_rank"] = report.structurally_full_rank;
  j["structural_rank"] = report.structural_rank;
  j["method"] = std::string(to_string(report.method));
  return j;
}

Json oracle_to_json(const OracleTally& tally) {
  Json j;
  j["observable_trials"] = tally.observable_trials;
  j["trials"] = tally.trials;
  return j;
}

Json summary_to_json(const SccSummary& summary, bool self_damped,
                     const std::vector<std::size_t>& missing) {
  Json j;
  j["states"] = summary.state_count;
  j["scc_count"] = summary.component_count;
  j["parent_count"] = summary.parent_components.size();
  j["min_agents"] = summary.min_agents;
  j["self_damped"] = self_damped;
  j["missing_self_loops"] = missing;
  Json parents = Json::array();
  for (std::size_t k = 0; k < summary.parent_components.size(); ++k) {
    Json p;
    p["component"] = summary.parent_components[k];
    p["states"] = summary.parent_members[k];
    parents.push_back(std::move(p));
  }
  j["parent_sccs"] = std::move(parents);
  return j;
}

Json solution_to_json(const DesignSolution& s) {
  Json j;
  j["schema"] = kSolutionSchema;
  j["agents"] = s.agent_count;
  j["states"] = s.state_count;
  j["measurement_cost"] = s.measurement_cost;
  j["communication_cost"] = s.communication_cost;
  j["total_cost"] = s.total_cost;
  j["measurement"] = structured_to_json(s.measurement_pattern);
  Json triplets = Json::array();
  for (const auto& p : s.measurement_pattern.positions()) {
    triplets.push_back(Json::array({p.row, p.col, 1}));
  }
  j["measurement_triplets"] = std::move(triplets);
  j["network"] = structured_to_json(s.network_pattern);
  Json links = Json::array();
  for (const auto& l : s.links) {
    Json e;
    e["a"] = l.a;
    e["b"] = l.b;
    e["cost"] = l.cost;
    links.push_back(std::move(e));
  }
  j["communication_edges"] = std::move(links);
  Json agents = Json::array();
  for (const auto& m : s.measurements) {
    Json a;
    a["agent"] = m.agent;
    a["parent_scc"] = m.parent_component ? Json(*m.parent_component) : Json();
    a["state"] = m.state ? Json(*m.state) : Json();
    a["cost"] = m.cost;
    agents.push_back(std::move(a));
  }
  j["assignment"] = std::move(agents);
  j["delta_cap"] = matrix_to_json(s.delta_cap);
  if (!s.column_of_agent.empty()) {
    Json z = Json::array();
    for (std::size_t i = 0; i < s.column_of_agent.size(); ++i) {
      Json row = Json::array();
      for (std::size_t c = 0; c < s.column_of_agent.size(); ++c) {
        row.push_back(s.column_of_agent[i] == c ? 1 : 0);
      }
      z.push_back(std::move(row));
    }
    j["z"] = std::move(z);
  }
  j["verification"] = report_to_json(s.verification);
  Json analysis;
  analysis["scc_count"] = s.analysis.component_count;
  analysis["parent_components"] = s.analysis.parent_components;
  analysis["parent_members"] = s.analysis.parent_members;
  analysis["min_agents"] = s.analysis.min_agents;
  j["analysis"] = std::move(analysis);
  j["notes"] = s.notes;
  return j;
}

namespace {

bool is_flat(const Json& j) {
  return std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
}

// Indented like dump(2), but arrays of scalars stay on one line.
void dump_compact(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t k = 0;
    for (const auto& [key, value] : j.items()) {
      out += pad + Json(key).dump() + ": ";
      dump_compact(value, out, indent + 2);
      out += ++k < j.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
  } else if (j.is_array() && !j.empty() && !is_flat(j)) {
    out += "[\n";
    for (std::size_t k = 0; k < j.size(); ++k) {
      out += pad;
      dump_compact(j[k], out, indent + 2);
      out += k + 1 < j.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (k) out += ", ";
      out += j[k].dump();
    }
    out += "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_compact(j, out, 0);
  return out + "\n";
}

SavedSolution solution_from_json(const Json& j, const std::string& source) {
  if (!j.is_object()) fail(source, "expected a JSON object");
  if (!j.contains("schema") || j["schema"] != kSolutionSchema) {
    fail(source, std::string("missing or unknown schema (expected \"") +
                     kSolutionSchema + "\")");
  }
  if (!j.contains("measurement") || !j.contains("network")) {
    fail(source, "solution needs 'measurement' and 'network'");
  }
  SavedSolution out;
  out.measurement_pattern =
      structured_from_json(j["measurement"], source + ": measurement");
  out.network_pattern = structured_from_json(j["network"], source + ": network");
  out.agent_count = out.network_pattern.rows();
  out.state_count = out.measurement_pattern.cols();
  if (out.measurement_pattern.rows() != out.agent_count) {
    fail(source, "measurement and network disagree on the agent count");
  }
  return out;
}

void write_system_dot(std::ostream& out, const StructuredMatrix& a_pattern,
                      const SccDecomposition& dec,
                      const MeasurementStructure& measurements) {
  std::vector<bool> measured(a_pattern.rows(), false);
  for (const auto& p : measurements.positions()) measured[p.col] = true;
  out << "digraph system {\n";
  out << "  // self-loops on every state are implied\n";
  out << "  node [shape=circle];\n";
  for (std::size_t k = 0; k < dec.component_count(); ++k) {
    if (dec.parent_flags[k]) {
      out << "  subgraph cluster_parent_" << k << " {\n";
      out << "    style=dashed;\n    label=\"parent SCC " << k << "\";\n";
    }
    for (std::size_t v : dec.components[k]) {
      out << (dec.parent_flags[k] ? "    " : "  ") << v;
      if (measured[v]) out << " [shape=doublecircle]";
      out << ";\n";
    }
    if (dec.parent_flags[k]) out << "  }\n";
  }
  for (const auto& p : a_pattern.positions()) {
    if (p.row != p.col) out << "  " << p.col << " -> " << p.row << ";\n";
  }
  out << "}\n";
}

void write_network_dot(std::ostream& out, std::size_t agent_count,
                       const std::vector<Link>& links) {
  out << "graph network {\n";
  out << "  node [shape=box];\n";
  for (std::size_t i = 0; i < agent_count; ++i) out << "  " << i << ";\n";
  for (const auto& l : links) {
    out << "  " << l.a << " -- " << l.b << " [label=\"" << std::setprecision(6)
        << l.cost << "\"];\n";
  }
  out << "}\n";
}

}  // namespace netest
