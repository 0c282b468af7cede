#include "netest/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "netest/io.hpp"
#include "netest/solver.hpp"

namespace netest {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kInvalidInput:
    case ErrorKind::kSizeGuard:
      return kExitUsage;
    case ErrorKind::kInfeasible:
    case ErrorKind::kSingular:
      return kExitInfeasible;
    case ErrorKind::kUnsupportedStructure:
      return kExitUnsupported;
    case ErrorKind::kVerification:
      return kExitVerification;
  }
  return kExitUsage;
}

namespace {

struct GlobalOptions {
  std::string input;
  std::string output;
  std::string dot_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool allow_extra_agents = false;
};

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(v[k]);
  }
  return s;
}

std::string plural(std::size_t n, const char* word, const char* words) {
  return std::to_string(n) + " " + (n == 1 ? word : words);
}

void require_input(const GlobalOptions& g) {
  if (g.input.empty()) {
    throw Error(ErrorKind::kInvalidInput, "--input <file> is required");
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kInvalidInput, "cannot write " + path);
  f << text;
}

// JSON goes to --output when given, otherwise to stdout.
void emit_json(const GlobalOptions& g, const Json& j, std::ostream& out) {
  if (g.output.empty()) {
    out << dump_json(j);
  } else {
    write_text(g.output, dump_json(j));
  }
}

ProblemSpec load_spec(const GlobalOptions& g, bool self_loops_implicit = true) {
  require_input(g);
  ProblemSpec spec = load_problem_or_edge_list(g.input, self_loops_implicit);
  if (g.seed) spec.options.seed = *g.seed;
  if (g.tol) spec.options.relative_tol = *g.tol;
  if (g.allow_extra_agents) spec.options.allow_extra_agents = true;
  return spec;
}

void print_report(std::ostream& out, const ObservabilityReport& r) {
  out << "networked observable: " << (r.observable ? "yes" : "no") << " ("
      << to_string(r.method) << ")\n";
  out << "output connected: " << (r.output_connected ? "yes" : "no");
  if (!r.unreached_nodes.empty()) {
    std::vector<std::size_t> head(
        r.unreached_nodes.begin(),
        r.unreached_nodes.begin() +
            static_cast<std::ptrdiff_t>(std::min<std::size_t>(16, r.unreached_nodes.size())));
    out << ", unreached [" << join(head)
        << (r.unreached_nodes.size() > 16 ? ", ..." : "") << "]";
  }
  out << "\n";
  out << "structural rank: " << r.structural_rank
      << (r.structurally_full_rank ? " (full)" : " (deficient)") << "\n";
}

void print_tally(std::ostream& out, const OracleTally& t, std::uint64_t seed) {
  out << "oracle: " << t.observable_trials << "/" << t.trials
      << " realizations full rank (seed " << seed << ")\n";
}

int cmd_analyze(const GlobalOptions& g, bool no_implicit_loops,
                std::ostream& out, std::ostream& err) {
  ProblemSpec spec = load_spec(g, !no_implicit_loops);
  if (spec.duplicate_edges > 0) {
    err << "netest: note: " << spec.duplicate_edges
        << " duplicate edge(s) ignored\n";
  }
  SccSummary summary = summarize_sccs(spec.system);
  const auto missing = missing_self_loops(spec.system);
  const bool damped = missing.empty();
  out << plural(summary.component_count, "SCC", "SCCs") << ", "
      << plural(summary.parent_components.size(), "parent", "parents")
      << ", min agents " << summary.min_agents << "\n";
  out << "states: " << summary.state_count << "\n";
  for (std::size_t k = 0; k < summary.parent_components.size(); ++k) {
    out << "parent SCC " << summary.parent_components[k] << ": states ["
        << join(summary.parent_members[k]) << "]\n";
  }
  out << "self-damped: " << (damped ? "true" : "false") << "\n";
  if (!damped) out << "missing self-loops: [" << join(missing) << "]\n";
  if (!g.output.empty()) {
    write_text(g.output, dump_json(summary_to_json(summary, damped, missing)));
  }
  return kExitOk;
}

int cmd_design(const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  ProblemSpec spec = load_spec(g);
  if (!spec.delta) throw Error(ErrorKind::kInvalidInput, "design needs 'delta'");
  if (!spec.eta) throw Error(ErrorKind::kInvalidInput, "design needs 'eta'");
  DesignSolution sol =
      solve_mcne(spec.system, *spec.delta, *spec.eta,
                 {.allow_extra_agents = spec.options.allow_extra_agents});
  for (const auto& note : sol.notes) err << "netest: note: " << note << "\n";
  emit_json(g, solution_to_json(sol), out);
  if (!g.dot_dir.empty()) {
    std::filesystem::create_directories(g.dot_dir);
    std::ostringstream sys, net;
    write_system_dot(sys, spec.system, scc_decompose(system_digraph(spec.system)),
                     sol.measurement_pattern);
    write_network_dot(net, sol.agent_count, sol.links);
    write_text((std::filesystem::path(g.dot_dir) / "system.dot").string(), sys.str());
    write_text((std::filesystem::path(g.dot_dir) / "network.dot").string(), net.str());
  }
  return kExitOk;
}

int cmd_verify(const GlobalOptions& g, const std::string& solution_path,
               std::size_t oracle_trials, std::ostream& out) {
  ProblemSpec spec = load_spec(g);
  SavedSolution saved =
      solution_from_json(read_json_file(solution_path), solution_path);
  if (saved.state_count != spec.system.rows()) {
    throw Error(ErrorKind::kInvalidInput,
                "solution covers " + std::to_string(saved.state_count) +
                    " states, system has " + std::to_string(spec.system.rows()));
  }
  const std::size_t trials = oracle_trials ? oracle_trials : spec.options.oracle_trials;
  VerificationResult result =
      verify_solution(spec.system, saved.measurement_pattern,
                      saved.network_pattern, trials, spec.options.seed);
  print_report(out, result.report);
  if (result.oracle) print_tally(out, *result.oracle, spec.options.seed);
  if (!g.output.empty()) {
    Json j;
    j["report"] = report_to_json(result.report);
    if (result.oracle) j["oracle"] = oracle_to_json(*result.oracle);
    write_text(g.output, dump_json(j));
  }
  return result.report.observable ? kExitOk : kExitVerification;
}

int cmd_discretize(const GlobalOptions& g, double step, const std::string& method,
                   std::ostream& out, std::ostream& err) {
  require_input(g);
  Json doc = read_json_file(g.input);
  const Json& mj = doc.is_object() && doc.contains("matrix") ? doc["matrix"] : doc;
  ContinuousSystem sys{matrix_from_json(mj, g.input, false), step};
  sys.validate();
  Json j;
  j["method"] = method;
  j["step"] = step;
  Eigen::MatrixXd a;
  if (method == "euler") {
    a = euler_discretize(sys);
  } else {
    const double cond = tustin_condition(sys);
    a = tustin_discretize(sys);
    if (cond > kTustinConditionWarning) {
      err << "netest: warning: I - (T/2) A is ill-conditioned (condition "
          << std::setprecision(3) << cond << ")\n";
    }
    j["condition"] = cond;
  }
  const double tol =
      relative_structure_tolerance(a, g.tol.value_or(kDefaultRelativeStructureTolerance));
  StructuredMatrix structure = structure_of(a, tol).pattern();
  const bool damped = is_self_damped(structure);
  j["matrix"] = matrix_to_json(a);
  j["structure"] = structured_to_json(structure);
  j["self_damped"] = damped;
  emit_json(g, j, out);
  err << "self-damped: " << (damped ? "true" : "false") << "\n";
  return kExitOk;
}

int cmd_oracle(const GlobalOptions& g, const std::string& solution_path,
               const std::vector<std::size_t>& measured, std::size_t trials,
               std::ostream& out) {
  ProblemSpec spec = load_spec(g);
  OracleTally tally;
  if (!solution_path.empty()) {
    SavedSolution saved =
        solution_from_json(read_json_file(solution_path), solution_path);
    auto result = verify_solution(spec.system, saved.measurement_pattern,
                                  saved.network_pattern, trials,
                                  spec.options.seed);
    tally = *result.oracle;
  } else {
    if (measured.empty()) {
      throw Error(ErrorKind::kInvalidInput, "oracle needs --solution or --measured");
    }
    for (std::size_t m : measured) {
      if (m >= spec.system.rows()) {
        throw Error(ErrorKind::kInvalidInput,
                    "measured state " + std::to_string(m) + " out of range");
      }
    }
    tally = generic_rank_oracle(spec.system, measured, trials, spec.options.seed);
  }
  print_tally(out, tally, spec.options.seed);
  if (!g.output.empty()) write_text(g.output, dump_json(oracle_to_json(tally)));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Minimum-cost networked estimator design", "netest"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--input", g.input, "Problem spec JSON, edge list or matrix file");
  app.add_option("--output", g.output, "Write JSON output here");
  app.add_option("--dot", g.dot_dir, "Write DOT graphs into this directory");
  app.add_option("--seed", g.seed, "Seed for the numeric oracle");
  app.add_option("--tol", g.tol, "Relative structure tolerance")
      ->check(CLI::PositiveNumber);
  app.add_flag("--allow-extra-agents", g.allow_extra_agents,
               "Pad surplus agents with dummy SCCs");

  auto* analyze = app.add_subcommand("analyze", "SCC and self-damping report");
  bool no_implicit_loops = false;
  analyze->add_flag("--no-implicit-loops", no_implicit_loops,
                    "Do not add self-loops to edge-list inputs");

  auto* design = app.add_subcommand("design", "Solve for measurements and network");

  auto* verify = app.add_subcommand("verify", "Check a saved solution");
  std::string solution_path;
  std::size_t oracle_trials = 0;
  verify->add_option("--solution", solution_path, "Solution JSON")->required();
  verify->add_option("--oracle", oracle_trials, "Numeric oracle trials");

  auto* discretize = app.add_subcommand("discretize", "Euler or Tustin discretization");
  double step = 0.0;
  std::string method = "euler";
  discretize->add_option("--step", step, "Sample time T")->required();
  discretize->add_option("--method", method, "euler or tustin")
      ->check(CLI::IsMember({"euler", "tustin"}));

  auto* oracle = app.add_subcommand("oracle", "Generic-rank Monte-Carlo tally");
  std::string oracle_solution;
  std::vector<std::size_t> measured;
  std::size_t trials = 100;
  oracle->add_option("--solution", oracle_solution, "Solution JSON");
  oracle->add_option("--measured", measured, "Measured states of a single agent")
      ->delimiter(',');
  oracle->add_option("--trials", trials, "Number of realizations");

  for (auto* sub : {analyze, design, verify, discretize, oracle}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "netest: error kind=usage exit=" << kExitUsage << ": " << e.what()
        << "\n";
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(g, no_implicit_loops, out, err);
    if (design->parsed()) return cmd_design(g, out, err);
    if (verify->parsed()) {
      const int code = cmd_verify(g, solution_path, oracle_trials, out);
      if (code == kExitVerification) {
        err << "netest: error kind=verification exit=" << code
            << ": design is not networked observable\n";
      }
      return code;
    }
    if (discretize->parsed()) return cmd_discretize(g, step, method, out, err);
    if (oracle->parsed()) return cmd_oracle(g, oracle_solution, measured, trials, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << "netest: error kind=" << to_string(e.kind()) << " exit=" << code
        << ": " << e.what() << "\n";
    return code;
  } catch (const std::exception& e) {
    err << "netest: error kind=internal exit=" << kExitUsage << ": " << e.what()
        << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace netest
