#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "socnet/cli.hpp"

namespace fs = std::filesystem;
using socnet::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("socnet_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// File contents without '#' comment lines.
std::string body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string out;
  for (std::string line; std::getline(in, line);)
    if (line.empty() || line[0] != '#') out += line + '\n';
  return out;
}

}  // namespace

TEST(Cli, GenerateIsDeterministic) {
  const auto a = fresh_dir("gen_a"), b = fresh_dir("gen_b");
  ASSERT_EQ(call({"generate", "--events", "1000", "--seed", "7", "--output-dir", a.string()}).code, 0);
  ASSERT_EQ(call({"generate", "--events", "1000", "--seed", "7", "--output-dir", b.string()}).code, 0);
  EXPECT_EQ(slurp(a / "events.log"), slurp(b / "events.log"));
  EXPECT_EQ(slurp(a / "trace.tsv"), slurp(b / "trace.tsv"));
  EXPECT_EQ(slurp(a / "events.log").rfind("# socnet 0.1.0 seed=7 config=", 0), 0u);
}

TEST(Cli, UnknownFlagIsAUsageError) {
  const auto r = call({"fit", "--no-such-flag"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error exit=1 code=usage"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"fit", "--pool", "everyone"}).code, 1);
  EXPECT_EQ(call({"cluster", "--k-rule", "aic"}).code, 1);
}

TEST(Cli, HelpExitsCleanly) {
  const auto r = call({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pipeline"), std::string::npos);
}

TEST(Cli, DataErrorsExitWithTwo) {
  const auto dir = fresh_dir("data_errors");
  auto r = call({"fit", "--input", (dir / "missing.log").string(), "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("code=input_not_found"), std::string::npos);

  std::ofstream(dir / "self.log") << "0\tjoin\t1\n1\tfollow\t1\t1\n";
  r = call({"stats", "--input", (dir / "self.log").string(), "--output-dir", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("code=self_follow"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, ThreadCountDoesNotChangeOutputs) {
  const auto gen = fresh_dir("threads_gen");
  ASSERT_EQ(call({"generate", "--events", "20000", "--seed", "3", "--output-dir", gen.string()}).code, 0);
  const auto log = (gen / "events.log").string();
  const auto one = fresh_dir("threads_1"), four = fresh_dir("threads_4");
  for (const auto& [dir, threads] : {std::pair{one, "1"}, std::pair{four, "4"}}) {
    ASSERT_EQ(call({"fit", "--input", log, "--grid-step", "0.05", "--threads", threads, "--output-dir", dir.string()}).code,
              0);
    ASSERT_EQ(call({"fit-users", "--input", log, "--min-links", "10", "--threads", threads, "--output-dir",
                    dir.string()})
                  .code,
              0);
  }
  for (const char* f : {"fit.csv", "loglik_curve.csv", "loglik_surface.csv", "user_fits.csv"}) {
    EXPECT_EQ(slurp(one / f), slurp(four / f)) << f;
  }
}

TEST(Cli, PipelineWritesEveryListedFile) {
  const auto dir = fresh_dir("pipeline");
  const auto r = call({"pipeline", "--events", "30000", "--seed", "5", "--min-links", "10", "--k-range", "1..3",
                       "--folds", "3", "--restarts", "2", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream report(slurp(dir / "report.txt"));
  std::size_t listed = 0;
  for (std::string line; std::getline(report, line);) {
    if (line.rfind("  ", 0) != 0) continue;
    const auto name = line.substr(2);
    if (name.find('.') == std::string::npos || name.find(' ') != std::string::npos) continue;
    EXPECT_TRUE(fs::exists(dir / name)) << name;
    ++listed;
  }
  EXPECT_GE(listed, 10u);
  for (const char* f : {"events.log", "fit.csv", "zreport.csv", "overlap.csv", "report.txt"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, ContextInputMatchesLogInput) {
  const auto dir = fresh_dir("contexts");
  ASSERT_EQ(call({"generate", "--events", "8000", "--seed", "2", "--output-dir", dir.string()}).code, 0);
  const auto log = (dir / "events.log").string();
  ASSERT_EQ(call({"contexts", "--input", log, "--output-dir", dir.string()}).code, 0);
  const auto from_log = fresh_dir("contexts_log"), from_ctx = fresh_dir("contexts_ctx");
  ASSERT_EQ(call({"nulltest", "--input", log, "--output-dir", from_log.string()}).code, 0);
  ASSERT_EQ(call({"nulltest", "--input", (dir / "contexts.tsv").string(), "--output-dir", from_ctx.string()}).code, 0);
  EXPECT_EQ(body(from_log / "zreport.csv"), body(from_ctx / "zreport.csv"));
  // Event-level statistics need the log itself.
  EXPECT_EQ(call({"stats", "--input", (dir / "contexts.tsv").string(), "--output-dir", from_ctx.string()}).code, 2);
}

TEST(Cli, FlagsOverrideTheConfigFile) {
  const auto dir = fresh_dir("config");
  std::ofstream(dir / "run.ini") << "events=500\nseed=11\nmix=0.2,0.5\n";
  const auto a = fresh_dir("config_a"), b = fresh_dir("config_b"), c = fresh_dir("config_c");
  ASSERT_EQ(call({"generate", "--config", (dir / "run.ini").string(), "--output-dir", a.string()}).code, 0);
  ASSERT_EQ(call({"generate", "--events", "500", "--seed", "11", "--mix", "0.2,0.5", "--output-dir", b.string()}).code,
            0);
  EXPECT_EQ(slurp(a / "events.log"), slurp(b / "events.log"));
  ASSERT_EQ(call({"generate", "--config", (dir / "run.ini").string(), "--seed", "12", "--output-dir", c.string()}).code,
            0);
  EXPECT_NE(slurp(a / "events.log"), slurp(c / "events.log"));
  EXPECT_NE(slurp(c / "events.log").find("seed=12"), std::string::npos);

  std::ofstream(dir / "bad.ini") << "no_such_key=1\n";
  EXPECT_EQ(call({"generate", "--config", (dir / "bad.ini").string(), "--output-dir", a.string()}).code, 1);
}

TEST(Cli, ConfigHashIgnoresThreadsAndPaths) {
  socnet::cli::RunConfig x, y;
  y.threads = 8;
  y.output_dir = "/elsewhere";
  y.input = "other.log";
  EXPECT_EQ(x.hash(), y.hash());
  y.seed = 2;
  EXPECT_NE(x.hash(), y.hash());
}

TEST(Cli, PairAndRangeParsing) {
  EXPECT_EQ(socnet::cli::parse_pair("0.1,0.7"), (std::pair{0.1, 0.7}));
  EXPECT_EQ(socnet::cli::parse_k_range("2..6"), (std::pair{2, 6}));
  EXPECT_THROW(socnet::cli::parse_k_range("6..2"), socnet::cli::CliError);
  EXPECT_THROW(socnet::cli::parse_pair("0.1"), socnet::cli::CliError);
}
