// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "netest/cli.hpp"
#include "netest/io.hpp"
#include "netest/solver.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace netest;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << name
            << " -- " << o.detail << std::endl;
}

std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / ("netest_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Outcome tree_reproduction(const fs::path& dir) {
  const auto out = (dir / "example-solution.json").string();
  std::ostringstream sink, err;
  const auto start = Clock::now();
  const int code = run_cli({"design", "--input", testing::fixture("paper-example.json"),
                            "--output", out},
                           sink, err);
  const double elapsed = seconds_since(start);
  if (code != 0) return {false, "design exited " + std::to_string(code) + ": " + err.str()};
  Json j = read_json_file(out);
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : j["communication_edges"]) {
    edges.emplace(e["a"].get<std::size_t>() + 1, e["b"].get<std::size_t>() + 1);
  }
  const std::set<std::pair<std::size_t, std::size_t>> expected = {{1, 5}, {2, 5}, {3, 5}, {2, 4}};
  const double cost = j["communication_cost"].get<double>();
  std::string listed;
  for (auto [a, b] : edges) listed += " " + std::to_string(a) + "-" + std::to_string(b);
  const bool ok = edges == expected && std::abs(cost - 11.5608) <= 1e-9 && elapsed < 1.0;
  return {ok, "edges (1-based):" + listed + ", cost " + fmt(cost, 10) + ", " +
                  fmt(elapsed, 3) + " s"};
}

Outcome assignment_reproduction() {
  const Eigen::MatrixXd d = testing::example_delta_cap();
  const auto start = Clock::now();
  const Assignment h = hungarian(d);
  const BruteForceAssignment b = brute_force_assignment(d);
  const double elapsed = seconds_since(start);
  // Oracle value pinned from the 120-permutation enumeration.
  constexpr double kPinned = 17.0511;
  const bool ok = h.total_cost == b.cost && std::abs(b.cost - kPinned) <= 1e-9 && elapsed < 1.0;
  std::string perm;
  for (std::size_t c : h.column_of_row) perm += std::to_string(c + 1);
  return {ok, "hungarian " + fmt(h.total_cost, 10) + ", brute force " + fmt(b.cost, 10) +
                  ", agent->SCC " + perm + ", " + fmt(elapsed, 3) + " s"};
}

Outcome hungarian_suite() {
  std::mt19937_64 rng(20260301);
  int equal = 0, certified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    const Eigen::MatrixXd c = testing::uniform_matrix(n, n, 0, 10, rng);
    const Assignment h = hungarian(c);
    if (h.total_cost == brute_force_assignment(c).cost) ++equal;
    const DualCheck dual = check_dual_certificate(c, h);
    if (dual.feasible && dual.complementary) ++certified;
  }
  return {equal == 100 && certified == 100,
          std::to_string(equal) + "/100 exact, " + std::to_string(certified) +
              "/100 dual certificates"};
}

Outcome mst_suite() {
  std::mt19937_64 rng(20260302);
  int equal = 0, properties = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 4;
    const CommunicationCosts eta{testing::symmetric_matrix(n, 0, 10, rng)};
    const NetworkDesign k = minimum_spanning_tree(eta);
    if (k.total_cost == brute_force_mst(eta).total_cost) ++equal;
    if (testing::cut_and_cycle_hold(eta.eta, k)) ++properties;
  }
  return {equal == 100 && properties == 100,
          std::to_string(equal) + "/100 exact, " + std::to_string(properties) +
              "/100 cut and cycle"};
}

Outcome coverage_equivalence() {
  std::mt19937_64 rng(20260303);
  int agree = 0, observable = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const auto a = testing::random_pattern(n, 1.5 / static_cast<double>(n), rng);
    const auto measured = testing::random_subset(n, 0.3, rng);
    const bool covered = parent_scc_coverage(a, measured).covered;
    const bool two_condition = is_structurally_observable(a, measured).observable;
    if (covered == two_condition) ++agree;
    if (two_condition) ++observable;
  }
  return {agree == 200, std::to_string(agree) + "/200 agree (" + std::to_string(observable) +
                            " observable, " + std::to_string(200 - observable) +
                            " not)"};
}

Outcome genericity() {
  std::mt19937_64 rng(20260304);
  int observable_ok = 0, unobservable_ok = 0, have_obs = 0, have_unobs = 0;
  std::size_t worst = 100, leaked = 0;
  while (have_obs < 50 || have_unobs < 20) {
    const std::size_t n = 2 + rng() % 9;
    const auto a = testing::random_pattern(n, 1.5 / static_cast<double>(n), rng);
    const auto measured = testing::random_subset(n, 0.3, rng);
    if (measured.empty()) continue;
    const bool structural = is_structurally_observable(a, measured).observable;
    const std::uint64_t seed = rng();
    if (structural && have_obs < 50) {
      ++have_obs;
      const auto t = generic_rank_oracle(a, measured, 100, seed);
      worst = std::min(worst, t.observable_trials);
      if (t.observable_trials >= 99) ++observable_ok;
    } else if (!structural && have_unobs < 20) {
      ++have_unobs;
      const auto t = generic_rank_oracle(a, measured, 100, seed);
      leaked += t.observable_trials;
      if (t.observable_trials == 0) ++unobservable_ok;
    }
  }
  return {observable_ok == 50 && unobservable_ok == 20,
          std::to_string(observable_ok) + "/50 observable at >=99/100 (worst " +
              std::to_string(worst) + "), " + std::to_string(unobservable_ok) +
              "/20 unobservable at 0 (" + std::to_string(leaked) + " full-rank trials)"};
}

// Writes a ProblemSpec JSON for a random instance.
void write_spec(const fs::path& path, const testing::Instance& inst) {
  Json j;
  Json pattern = structured_to_json(inst.a);
  j["system"] = {{"pattern", pattern}};
  j["self_loops_implicit"] = false;
  j["delta"] = matrix_to_json(inst.delta.delta);
  j["eta"] = matrix_to_json(inst.eta.eta);
  std::ofstream(path) << dump_json(j);
}

Outcome edge_criticality(const fs::path& dir) {
  std::mt19937_64 rng(20260305);
  int instances_ok = 0;
  std::size_t deletions = 0, detected = 0;
  std::string first_problem;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_instance(12, 2, 6, rng);
    const auto spec = (dir / "crit-spec.json").string();
    const auto sol = (dir / "crit-solution.json").string();
    write_spec(spec, inst);
    std::ostringstream out, err;
    if (run_cli({"design", "--input", spec, "--output", sol}, out, err) != 0 ||
        run_cli({"verify", "--input", spec, "--solution", sol}, out, err) != 0) {
      if (first_problem.empty()) first_problem = "design/verify failed: " + err.str();
      continue;
    }
    const Json base = read_json_file(sol);
    bool all = true;
    for (const auto& link : base["communication_edges"]) {
      const auto a = link["a"].get<std::size_t>(), b = link["b"].get<std::size_t>();
      Json cut = base;
      Json kept = Json::array();
      for (const auto& e : base["network"]["entries"]) {
        const auto r = e[0].get<std::size_t>(), c = e[1].get<std::size_t>();
        if (!((r == a && c == b) || (r == b && c == a))) kept.push_back(e);
      }
      cut["network"]["entries"] = kept;
      const auto broken = (dir / "crit-broken.json").string();
      std::ofstream(broken) << dump_json(cut);
      ++deletions;
      if (run_cli({"verify", "--input", spec, "--solution", broken}, out, err) == 5) {
        ++detected;
      } else {
        all = false;
      }
    }
    if (all) ++instances_ok;
  }
  return {instances_ok == 50 && detected == deletions,
          std::to_string(instances_ok) + "/50 instances, " + std::to_string(detected) + "/" +
              std::to_string(deletions) + " edge deletions exit 5" +
              (first_problem.empty() ? "" : "; " + first_problem)};
}

Outcome separation() {
  std::mt19937_64 rng(20260306);
  int exact = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = testing::random_instance(14, 2, 6, rng);
    const DesignSolution sol = solve_mcne(inst.a, inst.delta, inst.eta);
    const auto reduced = reduce_costs(inst.delta, scc_decompose(system_digraph(inst.a)));
    const double oracle = brute_force_assignment(reduced.delta_cap).cost +
                          brute_force_mst(inst.eta).total_cost;
    if (sol.total_cost == oracle) ++exact;
  }
  return {exact == 30, std::to_string(exact) + "/30 exact"};
}

Outcome discretization_order() {
  std::mt19937_64 rng(20260307);
  double lo = 1e300, hi = 0.0;
  int damped = 0, ratios_ok = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    const Eigen::MatrixXd a = testing::stable_matrix(n, rng);
    double previous = 0.0;
    bool trial_ok = true;
    for (double t : {1e-1, 1e-2, 1e-3}) {
      const Eigen::MatrixXd e = euler_discretize({a, t});
      const Eigen::MatrixXd z = tustin_discretize({a, t});
      if (is_self_damped(structure_of(e, relative_structure_tolerance(e))) &&
          is_self_damped(structure_of(z, relative_structure_tolerance(z)))) {
        ++damped;
      }
      const double gap = (e - z).cwiseAbs().rowwise().sum().maxCoeff();
      if (previous > 0.0) {
        const double ratio = previous / gap;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        trial_ok = trial_ok && ratio >= 50.0 && ratio <= 200.0;
      }
      previous = gap;
    }
    if (trial_ok) ++ratios_ok;
  }
  return {ratios_ok == 10 && damped == 30,
          "decade ratios in [" + fmt(lo, 5) + ", " + fmt(hi, 5) + "], " +
              std::to_string(ratios_ok) + "/10 matrices in range, " + std::to_string(damped) +
              "/30 self-damped pairs"};
}

Outcome performance() {
  std::mt19937_64 rng(20260308);
  constexpr std::size_t n = 100000, m = 500000;
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) edges.emplace_back(node(rng), node(rng));
  auto start = Clock::now();
  const Digraph g(n, std::move(edges));
  const SccDecomposition dec = scc_decompose(g);
  const double scc_time = seconds_since(start);

  const Eigen::MatrixXd c = testing::uniform_matrix(500, 500, 0, 10, rng);
  start = Clock::now();
  const Assignment h = hungarian(c);
  const double hungarian_time = seconds_since(start);
  const bool certified = check_dual_certificate(c, h).feasible;
  return {scc_time < 5.0 && hungarian_time < 10.0 && certified,
          "SCC n=1e5 m=5e5 in " + fmt(scc_time, 3) + " s (" +
              std::to_string(dec.component_count()) + " components), Hungarian N=500 in " +
              fmt(hungarian_time, 3) + " s"};
}

}  // namespace

int main() {
  const fs::path dir = scratch_dir();
  report(1, "communication tree on the 18-node example", [&] { return tree_reproduction(dir); });
  report(2, "assignment on the 5x5 agent-SCC costs", assignment_reproduction);
  report(3, "Hungarian vs brute force, 100 random matrices", hungarian_suite);
  report(4, "Kruskal vs Pruefer enumeration, 100 random matrices", mst_suite);
  report(5, "parent-SCC coverage vs two-condition test, 200 systems", coverage_equivalence);
  report(6, "generic-rank oracle, 50 observable + 20 unobservable", genericity);
  report(7, "every tree edge is critical, 50 designs", [&] { return edge_criticality(dir); });
  report(8, "separation optimality, 30 instances", separation);
  report(9, "Euler/Tustin gap shrinks quadratically", discretization_order);
  report(10, "performance smoke", performance);
  fs::remove_all(dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
