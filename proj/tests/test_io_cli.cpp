#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "netest/cli.hpp"
#include "netest/error.hpp"
#include "netest/io.hpp"
#include "test_support.hpp"

namespace netest {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("netest_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST(Json, ParseErrorHasLocation) {
  try {
    parse_json_text("{\n  \"a\": [1, 2,,]\n}", "x.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 14u);
  }
}

TEST(Json, MatrixAcceptsInfinitySpellings) {
  auto m = matrix_from_json(Json::parse(R"([[1, "inf"], ["+Infinity", null]])"), "m", true);
  EXPECT_TRUE(std::isinf(m(0, 1)) && std::isinf(m(1, 0)) && std::isinf(m(1, 1)));
  EXPECT_THROW(matrix_from_json(Json::parse(R"([[1, "inf"]])"), "m", false), ParseError);
  EXPECT_THROW(matrix_from_json(Json::parse(R"([[1, 2], [3]])"), "m", true), ParseError);
  EXPECT_EQ(matrix_to_json(m)[0][1], "inf");
}

TEST(Json, ProblemSpecForms) {
  auto spec = problem_from_json(Json::parse(R"({
    "system": {"nodes": 3, "edges": [[0, 1], [1, 2], [0, 1]]},
    "delta": {"agents": 1, "default": 4, "entries": [[0, 2, 1.5]]},
    "eta": [[0]],
    "options": {"seed": 9, "oracle_trials": 5}
  })"), "inline", ".");
  EXPECT_TRUE(is_self_damped(spec.system));
  EXPECT_EQ(spec.duplicate_edges, 1u);
  EXPECT_EQ(spec.delta->delta(0, 2), 1.5);
  EXPECT_EQ(spec.delta->delta(0, 0), 4.0);
  EXPECT_EQ(spec.options.seed, 9u);

  auto raw = problem_from_json(Json::parse(R"({
    "system": {"pattern": {"rows": 2, "cols": 2, "entries": [[0, 1]]}},
    "self_loops_implicit": false
  })"), "inline", ".");
  EXPECT_FALSE(is_self_damped(raw.system));
  EXPECT_THROW(problem_from_json(Json::parse(R"({"system": {"nodes": 2, "edges": [[0, 5]]}})"),
                                 "inline", "."),
               ParseError);
  EXPECT_THROW(problem_from_json(Json::parse(R"({
    "system": {"nodes": 2, "edges": []}, "delta": [[1, 2]], "eta": [[0, 1], [1, 0]]})"),
                                 "inline", "."),
               ParseError);
}

TEST(Json, SolutionRoundTrip) {
  ProblemSpec spec = load_problem(testing::fixture("paper-example.json"));
  auto sol = solve_mcne(spec.system, *spec.delta, *spec.eta);
  Json j = parse_json_text(dump_json(solution_to_json(sol)), "sol");
  EXPECT_EQ(j["schema"], kSolutionSchema);
  auto saved = solution_from_json(j, "sol");
  EXPECT_EQ(saved.measurement_pattern, sol.measurement_pattern);
  EXPECT_EQ(saved.network_pattern, sol.network_pattern);
  EXPECT_EQ(j["communication_cost"].get<double>(), sol.communication_cost);
}

TEST_F(CliTest, AnalyzeSingleNode) {
  auto f = write("one.txt", "nodes 1\n");
  EXPECT_EQ(run({"analyze", "--input", f}), 0);
  EXPECT_NE(out_.str().find("1 SCC, 1 parent, min agents 1"), std::string::npos);
}

TEST_F(CliTest, AnalyzeFixture) {
  EXPECT_EQ(run({"analyze", "--input", testing::fixture("paper-example.json")}), 0);
  EXPECT_NE(out_.str().find("6 SCCs, 5 parents, min agents 5"), std::string::npos);
  EXPECT_NE(out_.str().find("self-damped: true"), std::string::npos);
}

TEST_F(CliTest, AnalyzeNotSelfDamped) {
  auto f = write("g.txt", "nodes 3\n0 1\n1 1\n");
  EXPECT_EQ(run({"analyze", "--no-implicit-loops", "--input", f}), 0);
  EXPECT_NE(out_.str().find("self-damped: false"), std::string::npos);
  EXPECT_NE(out_.str().find("missing self-loops: [0, 2]"), std::string::npos);
}

TEST_F(CliTest, ParseErrorsExitTwo) {
  auto f = write("bad.json", "{\"system\": [1,}");
  EXPECT_EQ(run({"analyze", "--input", f}), 2);
  EXPECT_NE(err_.str().find("kind=parse"), std::string::npos);
  EXPECT_NE(err_.str().find(":1:"), std::string::npos);
  auto g = write("bad.txt", "nodes 2\n0 7\n");
  EXPECT_EQ(run({"analyze", "--input", g}), 2);
  EXPECT_NE(err_.str().find("bad.txt:2:3"), std::string::npos);
  EXPECT_EQ(run({"analyze"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
}

TEST_F(CliTest, DesignTrivialAndNotSelfDamped) {
  auto f = write("one.json", R"({"system": {"nodes": 1, "edges": []},
    "delta": [[2.0]], "eta": [[0]]})");
  EXPECT_EQ(run({"design", "--input", f}), 0);
  EXPECT_EQ(Json::parse(out_.str())["total_cost"].get<double>(), 2.0);

  auto g = write("nd.json", R"({"system": {"nodes": 2, "edges": [[0, 1]]},
    "self_loops_implicit": false, "delta": [[1, 1]], "eta": [[0]]})");
  EXPECT_EQ(run({"design", "--input", g}), 4);
  EXPECT_NE(err_.str().find("kind=unsupported-structure exit=4"), std::string::npos);
}

TEST_F(CliTest, DesignInfeasibleExitsThree) {
  auto f = write("inf.json", R"({"system": {"nodes": 2, "edges": []},
    "delta": [[1, "inf"], [1, "inf"]], "eta": [[0, 1], [1, 0]]})");
  EXPECT_EQ(run({"design", "--input", f}), 3);
}

TEST_F(CliTest, DesignVerifyRoundTripAndEdgeDeletion) {
  const auto spec = testing::fixture("paper-example.json");
  const auto sol = (dir_ / "sol.json").string();
  const auto dots = (dir_ / "dot").string();
  ASSERT_EQ(run({"design", "--input", spec, "--output", sol, "--dot", dots}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "dot" / "system.dot"));
  EXPECT_TRUE(fs::exists(dir_ / "dot" / "network.dot"));
  EXPECT_EQ(run({"verify", "--input", spec, "--solution", sol}), 0);
  EXPECT_NE(out_.str().find("networked observable: yes"), std::string::npos);
  EXPECT_EQ(run({"verify", "--solution", sol, "--oracle", "100", "--seed", "3",
                 "--input", spec}),
            0);
  EXPECT_NE(out_.str().find("oracle: 100/100"), std::string::npos);

  Json j = read_json_file(sol);
  auto& entries = j["network"]["entries"];
  Json kept = Json::array();
  for (const auto& e : entries) {
    const auto r = e[0].get<std::size_t>(), c = e[1].get<std::size_t>();
    if (!((r == 0 && c == 4) || (r == 4 && c == 0))) kept.push_back(e);
  }
  entries = kept;
  const auto broken = write("broken.json", dump_json(j));
  EXPECT_EQ(run({"verify", "--input", spec, "--solution", broken}), 5);
  EXPECT_NE(err_.str().find("kind=verification exit=5"), std::string::npos);
}

TEST_F(CliTest, Discretize) {
  auto f = write("m.json", "[[-1]]");
  EXPECT_EQ(run({"discretize", "--input", f, "--step", "0.1", "--method", "euler"}), 0);
  Json j = Json::parse(out_.str());
  EXPECT_NEAR(j["matrix"][0][0].get<double>(), 0.9, 1e-15);
  EXPECT_TRUE(j["self_damped"].get<bool>());

  auto z = write("z.json", R"({"matrix": [[0, 0], [0, 0]]})");
  EXPECT_EQ(run({"discretize", "--input", z, "--step", "3"}), 0);
  EXPECT_EQ(Json::parse(out_.str())["matrix"], Json::parse("[[1.0, 0.0], [0.0, 1.0]]"));

  auto s = write("s.json", "[[2]]");
  EXPECT_EQ(run({"discretize", "--input", s, "--step", "1", "--method", "tustin"}), 3);
  EXPECT_NE(err_.str().find("I - (T/2) A"), std::string::npos);
  EXPECT_EQ(run({"discretize", "--input", s, "--step", "1", "--method", "rk4"}), 2);
  EXPECT_EQ(run({"discretize", "--input", s, "--step", "-1"}), 2);
}

TEST_F(CliTest, OracleCommand) {
  const auto spec = testing::fixture("paper-example.json");
  EXPECT_EQ(run({"oracle", "--input", spec, "--measured", "5,9,10,15,16", "--trials", "20",
                 "--seed", "4"}),
            0);
  EXPECT_NE(out_.str().find("oracle: 20/20"), std::string::npos);
  EXPECT_EQ(run({"oracle", "--input", spec, "--measured", "5,9", "--trials", "20"}), 0);
  EXPECT_NE(out_.str().find("oracle: 0/20"), std::string::npos);
}

TEST_F(CliTest, SeedMakesOracleDeterministic) {
  const auto spec = testing::fixture("paper-example.json");
  run({"oracle", "--input", spec, "--measured", "5,9,10,15,16", "--trials", "7", "--seed", "1"});
  const std::string first = out_.str();
  run({"oracle", "--input", spec, "--measured", "5,9,10,15,16", "--trials", "7", "--seed", "1"});
  EXPECT_EQ(first, out_.str());
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::kParse), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kInfeasible), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kSingular), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kUnsupportedStructure), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::kVerification), 5);
}

}  // namespace
}  // namespace netest
