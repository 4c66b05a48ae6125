#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "flipfair/cli.hpp"
#include "flipfair/io.hpp"
#include "flipfair/rational.hpp"

using namespace flipfair;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "flipfair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("flipfair_cli_" + std::to_string(counter_++))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name, const std::string& contents) const {
    const auto p = (path_ / name).string();
    write_file(p, contents);
    return p;
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

const char* kEx2 = R"({"n": 2, "k": 2, "values": [["10","6","4","1"], ["101/10","10","1","2"]]})";

}  // namespace

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(run({}).code, 2); }

TEST(Cli, UnknownOptionIsUsageError) {
  EXPECT_EQ(run({"reproduce", "--bogus"}).code, 2);
  EXPECT_EQ(run({"solve", "--alg", "nope", "--instance", "x.json"}).code, 2);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, MissingFileIsInputError) {
  const auto r = run({"audit", "--instance", "/nonexistent/i.json", "--allocation", "/nonexistent/a.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MalformedInstanceIsInputError) {
  TempDir d;
  const auto i = d.file("i.json", R"({"n": 2, "k": 1, "values": [["1","x"],["1","1"]]})");
  const auto a = d.file("a.json", R"({"bundles": [[0],[1]]})");
  const auto r = run({"audit", "--instance", i, "--allocation", a});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("row 0, column 1"), std::string::npos) << r.err;
}

TEST(Cli, ReproduceAppendixD2) {
  const auto r = run({"reproduce", "appD2"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("(50,34,31)"), std::string::npos);
  EXPECT_NE(r.out.find("(6,5)"), std::string::npos) << r.out;
  const Json j = parse_json(r.out, "output");
  EXPECT_EQ(j["pass"], true);
}

TEST(Cli, ReproduceAllPasses) {
  const auto r = run({"reproduce", "all"});
  ASSERT_EQ(r.code, 0) << r.out;
  const Json j = parse_json(r.out, "output");
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["fixtures"].size(), 9u);
}

TEST(Cli, ReproduceWithOverride) {
  const auto r = run({"reproduce", "ex1", "--set", "C=100", "--set", "eps=1/1000"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(parse_json(r.out, "output")["constants"]["eps"], "1/1000");
}

TEST(Cli, ReproduceViolatedConstraintIsInputError) {
  EXPECT_EQ(run({"reproduce", "ex1", "--set", "eps=1"}).code, 1);
  EXPECT_EQ(run({"reproduce", "nope"}).code, 1);
  EXPECT_EQ(run({"reproduce", "ex1", "--set", "eps"}).code, 2);
}

TEST(Cli, FailingFixtureExitsFour) {
  TempDir d;
  ASSERT_EQ(run({"reproduce", "--export", d.path("corpus")}).code, 0);
  const auto facts_path = d.path("corpus") + "/ex2.facts.json";
  Json facts = parse_json(read_file(facts_path), "facts");
  for (auto& f : facts["facts"]) {
    if (f.contains("value")) {
      f["value"] = "1/7";
      break;
    }
  }
  write_file(facts_path, facts.dump(2));
  const auto r = run({"reproduce", "ex2", "--corpus", d.path("corpus")});
  EXPECT_EQ(r.code, 4) << r.out;
  EXPECT_EQ(parse_json(r.out, "output")["pass"], false);
  EXPECT_EQ(run({"reproduce", "ex1", "--corpus", d.path("corpus")}).code, 0);
}

TEST(Cli, AuditAllZeroInstance) {
  TempDir d;
  const auto i = d.file("i.json", R"({"n": 2, "k": 2, "values": [[0,0,0,0],[0,0,0,0]]})");
  const auto a = d.file("a.json", R"({"bundles": [[0,1],[2,3]]})");
  const auto r = run({"audit", "--instance", i, "--allocation", a, "--po"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json(r.out, "output");
  for (const char* key : {"ef", "eff1", "effx"}) EXPECT_EQ(j["allocation"][key], "1") << key << r.out;
  EXPECT_EQ(j["allocation"]["pareto_optimal"], true);
}

TEST(Cli, AuditRejectsInvalidAllocation) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const auto a = d.file("a.json", R"({"bundles": [[0,0],[2,3]]})");
  EXPECT_EQ(run({"audit", "--instance", i, "--allocation", a}).code, 1);
}

TEST(Cli, SolveRoundRobinExample2) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const auto r = run({"solve", "--instance", i, "--alg", "rr"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json(r.out, "output");
  EXPECT_EQ(j["algorithm"], "rr");
  EXPECT_EQ(j["audit"]["allocation"]["eff1"], "1");
}

TEST(Cli, SolveEceWritesTrace) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const auto t = d.path("trace.jsonl");
  const auto r = run({"solve", "--instance", i, "--alg", "ece-swaps", "--trace", t, "--check-invariants"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string trace = read_file(t);
  std::istringstream lines(trace);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) {
      EXPECT_NO_THROW(parse_json(line, "trace line"));
      ++count;
    }
  }
  EXPECT_EQ(count, 4);
  EXPECT_TRUE(parse_json(r.out, "output").contains("operations"));
}

TEST(Cli, OutputIsByteIdenticalAcrossRuns) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const std::vector<std::string> args{"solve", "--instance", i, "--alg", "ece"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> oracle{"oracle", "leximin", "--instance", i, "--all-optima"};
  EXPECT_EQ(run(oracle).out, run(oracle).out);
  EXPECT_EQ(run({"reproduce", "appD2"}).out, run({"reproduce", "appD2"}).out);
}

TEST(Cli, OracleSerialMatchesParallel) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  for (const char* rule : {"mnw", "leximin", "sw"}) {
    EXPECT_EQ(run({"oracle", rule, "--instance", i, "--all-optima"}).out,
              run({"oracle", rule, "--instance", i, "--all-optima", "--serial"}).out)
        << rule;
  }
}

TEST(Cli, OracleExists) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const auto r = run({"oracle", "exists", "--instance", i, "--notion", "effx", "--gamma", "1", "--mode", "exhaustive"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json(r.out, "output");
  EXPECT_EQ(j["notion"], "effx");
  EXPECT_EQ(j["gamma"], "1");
}

TEST(Cli, OracleBudgetRefusalExitsThree) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  const auto r = run({"oracle", "mnw", "--instance", i, "--budget", "3"});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, OraclePoNeedsAllocation) {
  TempDir d;
  const auto i = d.file("i.json", kEx2);
  EXPECT_EQ(run({"oracle", "po", "--instance", i}).code, 2);
}

TEST(Cli, GenWritesSidecar) {
  TempDir d;
  const auto out = d.path("inst.json");
  const auto r = run({"gen", "--family", "rho-bounded", "--n", "3", "--k", "2", "--seed", "5", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json(r.out, "output");
  EXPECT_EQ(j["sidecar"]["family"], "rho-bounded");
  EXPECT_EQ(j["sidecar"]["rho"], "2");
  EXPECT_EQ(j["sidecar"]["seed"], 5);
  EXPECT_EQ(parse_json(read_file(out), "instance"), j["instance"]);
  EXPECT_EQ(parse_json(read_file(out + ".sidecar.json"), "sidecar"), j["sidecar"]);
  EXPECT_EQ(run({"gen", "--family", "rho-bounded", "--n", "3", "--k", "2", "--seed", "5"}).out, r.out);
}

TEST(Cli, ExperimentOrderedEceIsHalfEffx) {
  const auto r = run({"experiment", "--family", "ordered", "--alg", "ece", "--notion", "effx", "--trials", "200",
                      "--n", "3", "--k", "3", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = parse_json(r.out, "output");
  EXPECT_GE(Rational::parse(j["worst_gamma"]["exact"].get<std::string>()), Rational(1, 2));
  EXPECT_EQ(j["trials"], 200);
}
