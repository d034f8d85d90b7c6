#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pdmm/cli.hpp"

using namespace pdmm;
using namespace pdmm::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pdmm-cli-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Settings settings(const std::string& text) { return parse_config_text(text, "test.cfg"); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PDMM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& text) {
  try {
    build_run_config(settings(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ConfigText, ParsesKeysAndComments) {
  const Settings s = settings("# header\nvariant = pdmm   # trailing\n\n  K=3\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at("variant").value, "pdmm");
  EXPECT_EQ(s.at("variant").source, "test.cfg:2");
  EXPECT_EQ(s.at("K").source, "test.cfg:4");
}

TEST(ConfigText, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text, "x.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("K = 1\nbogus = 2\n").find("x.cfg:2"), std::string::npos);
  EXPECT_NE(message("K = 1\nK = 2\n").find("x.cfg:2"), std::string::npos);
  EXPECT_NE(message("\n\nvariant pdmm\n").find("x.cfg:3"), std::string::npos);
}

TEST(ConfigText, SemanticErrorsNameTheLine) {
  EXPECT_NE(error_of("variant = pdmm\nK = zero\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("variant = nope\n").find("test.cfg:1"), std::string::npos);
  EXPECT_NE(error_of("variant = pjadmm\n\nnu = 0.5\n").find("test.cfg:3"), std::string::npos);
  EXPECT_NE(error_of("variant = pjadmm\ntau = 0.5\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("problem = rpca\ntrack-h = true\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("problem = toy-qp\nL = 4\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("rho = -1\n").find("test.cfg:1"), std::string::npos);
  EXPECT_NE(error_of("nu = 1\n").find("test.cfg:1"), std::string::npos);
}

TEST(ConfigText, FlagsOverrideFile) {
  Settings s = merge(settings("K = 1\nrho = 2\n"), Settings{{"K", {"3", "--K"}}});
  const RunConfig rc = build_run_config(s);
  EXPECT_EQ(rc.options.K, 3);
  EXPECT_EQ(rc.options.rho, 2.0);
}

TEST(Seeds, RangesAndLists) {
  EXPECT_EQ(parse_seeds({"1..4", "s"}), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(parse_seeds({"1,4,9", "s"}), (std::vector<std::uint64_t>{1, 4, 9}));
  EXPECT_EQ(parse_seeds({"1..2,7", "s"}), (std::vector<std::uint64_t>{1, 2, 7}));
  EXPECT_THROW(parse_seeds({"1..3,2", "s"}), ConfigError);
  EXPECT_THROW(parse_seeds({"3..1", "s"}), ConfigError);
  EXPECT_THROW(parse_seeds({"1,,2", "s"}), ConfigError);
}

TEST(Seeds, DerivedStreamsDependOnValueOnly) {
  EXPECT_EQ(derive_seed(0, 5), derive_seed(0, 5));
  EXPECT_NE(derive_seed(0, 5), derive_seed(0, 6));
  EXPECT_NE(derive_seed(0, 5), derive_seed(1, 5));
}

TEST(Run, WritesTraceFilesAndSummary) {
  const fs::path dir = scratch("run");
  RunConfig rc = build_run_config(settings("problem = toy-qp\nvariant = pdmm\nK = 1\nseeds = 1..10\nmax-iter = 3000\ntol = 1e-6\n"));
  rc.out = dir.string();
  const RunOutcome r = execute(rc);
  EXPECT_EQ(r.label, "pdmm-K1");
  EXPECT_EQ(r.exit_code, kOk);
  for (int s = 1; s <= 10; ++s) {
    const std::string trace = slurp(dir / ("pdmm-K1-seed" + std::to_string(s) + ".csv"));
    EXPECT_EQ(trace.rfind(kTraceHeader, 0), 0u);
  }
  const json summary = json::parse(slurp(dir / "pdmm-K1-summary.json"));
  EXPECT_EQ(summary["format"], "pdmm-summary");
  EXPECT_EQ(summary["seeds"].size(), 10u);
  EXPECT_TRUE(summary["all_converged"].get<bool>());
  EXPECT_EQ(summary["instance"]["fingerprint"], r.fingerprint);
}

TEST(Run, ByteIdenticalAcrossRunsThreadsAndJobs) {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  RunConfig rc = build_run_config(settings("problem = toy-qp\nK = 3\nseeds = 1..3\nmax-iter = 300\n"));
  rc.out = a.string();
  execute(rc);
  rc.out = b.string();
  rc.threads = 4;
  rc.jobs = 3;
  execute(rc);
  for (int s = 1; s <= 3; ++s) {
    const std::string f = "pdmm-K3-seed" + std::to_string(s) + ".csv";
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Run, MaxIterExitCode) {
  RunConfig rc = build_run_config(settings("problem = toy-qp\nK = 1\nmax-iter = 2\ntol = 1e-12\n"));
  rc.out = scratch("maxiter").string();
  EXPECT_EQ(execute(rc).exit_code, kMaxIter);
}

TEST(Run, DivergenceKeepsTrace) {
  const fs::path dir = scratch("diverge");
  RunConfig rc = build_run_config(settings("problem = toy-qp\nK = all\ntau = 40\nmax-iter = 5000\n"));
  rc.out = dir.string();
  const RunOutcome r = execute(rc);
  EXPECT_EQ(r.exit_code, kDiverged);
  EXPECT_EQ(r.seeds[0].stop_reason, "diverged");
  EXPECT_GT(r.seeds[0].iterations, 0);
  EXPECT_GT(slurp(r.seeds[0].trace_file).size(), std::string(kTraceHeader).size() + 100);
}

TEST(Compare, SingleConfigGivesOneRow) {
  const RunConfig rc = build_run_config(settings("problem = toy-qp\nmax-iter = 500\n"));
  const CompareOutcome co = compare({rc}, scratch("cmp1").string());
  std::istringstream in(co.csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Compare, MismatchedInstancesRejected) {
  const RunConfig a = build_run_config(settings("problem = toy-qp\nproblem-seed = 1\n"));
  RunConfig b = build_run_config(settings("problem = toy-qp\nproblem-seed = 2\nlabel = other\n"));
  EXPECT_THROW(compare({a, b}, scratch("cmp2").string()), ValidationError);
}

TEST(Compare, DuplicateLabelsRejected) {
  const RunConfig a = build_run_config(settings("problem = toy-qp\n"));
  EXPECT_THROW(compare({a, a}, scratch("cmp3").string()), ConfigError);
}

TEST(Compare, AllVariantsAgreeOnToy) {
  std::vector<RunConfig> cfgs;
  for (const char* v : {"pdmm", "sadmm", "pjadmm", "rdbcd", "gsadmm-ref"})
    cfgs.push_back(build_run_config(settings(std::string("problem = toy-qp\nvariant = ") + v +
                                             "\ntol = 1e-9\nmax-iter = 20000\n")));
  const CompareOutcome co = compare(cfgs, scratch("cmp4").string());
  EXPECT_EQ(co.exit_code, kOk);
  const double f0 = co.runs[0].mean_objective;
  for (const auto& r : co.runs) EXPECT_NEAR(r.mean_objective, f0, 1e-5 * std::max(1.0, std::abs(f0))) << r.label;
}

TEST(Compare, GroupLassoSweepSpeedsUpWithK) {
  std::vector<RunConfig> cfgs;
  const std::string base = "problem = grouplasso\nm = 60\nL = 5\ngroup-size = 8\noverlap = 2\nseeds = 1..3\ntol = 1e-5\nmax-iter = 20000\n";
  for (const char* K : {"1", "3", "all"}) cfgs.push_back(build_run_config(settings(base + "K = " + K + "\n")));
  cfgs.push_back(build_run_config(settings(base + "variant = sadmm\n")));
  const CompareOutcome co = compare(cfgs, scratch("cmp5").string());
  EXPECT_EQ(co.exit_code, kOk);
  EXPECT_GT(co.runs[0].mean_iterations, co.runs[1].mean_iterations);
  EXPECT_GT(co.runs[1].mean_iterations, co.runs[2].mean_iterations);
  EXPECT_LE(co.runs[2].mean_iterations, co.runs[3].mean_iterations);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("bin");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(run_cli("run --problem toy-qp --variant pdmm --K 1 --seeds 1..2 --max-iter 5000 --tol 1e-6" + out), 0);
  EXPECT_TRUE(fs::exists(dir / "pdmm-K1-seed2.csv"));
  EXPECT_EQ(run_cli("run --problem toy-qp --max-iter 2 --tol 1e-12" + out), 1);
  EXPECT_EQ(run_cli("run --problem toy-qp --variant pjadmm --nu 0.5" + out), 2);
  EXPECT_EQ(run_cli("run --problem nope" + out), 2);
  EXPECT_EQ(run_cli("run --bogus-flag"), 2);
  EXPECT_EQ(run_cli("run --config /nonexistent.cfg"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Binary, GenerateThenRunFromInstance) {
  const fs::path dir = scratch("gen");
  const std::string file = (dir / "gl.json").string();
  ASSERT_EQ(run_cli("generate --problem grouplasso --m 30 --L 3 --group-size 5 --overlap 1 --out " + file), 0);
  EXPECT_EQ(json::parse(slurp(file))["kind"], "group_lasso");
  EXPECT_EQ(run_cli("run --instance " + file + " --max-iter 5000 --tol 1e-6 --out " + (dir / "o").string()), 0);
  EXPECT_EQ(run_cli("run --instance " + file + " --problem rpca"), 2);
}
