// Command-line front end: one binary, one subcommand per analysis stage.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "socnet/generator.hpp"
#include "socnet/likelihood.hpp"
#include "socnet/netstate.hpp"

namespace socnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Options shared by all subcommands. Defaults, then the config file, then
/// flags, in increasing precedence.
struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string output_dir = ".";
  std::uint64_t seed = 1;

  // generate
  std::size_t events = 10000;
  std::size_t follows = 0;
  std::string mix = "0.12,0.71";
  std::string flavor = "guo";
  std::string rates = "0.02,0.18,0.30,0.50";
  bool traffic_weighting = false;
  double weight_exponent = 1.0;
  std::size_t feed_window = 20;
  std::size_t seed_users = 20;
  double activity_skew = 0.0;
  std::uint32_t regime_k = 0;  // 0 disables the switch
  std::string regime_mix = "0.7,0.1";

  // analysis
  std::string pool = "paper";
  std::string empty_sets = "paper";
  std::size_t min_links = 20;
  double grid_step = 0.01;
  int refine = 2;
  std::string k_range = "1..8";
  int folds = 10;
  int restarts = 5;
  std::string k_rule = "one-se";
  std::size_t min_bin_count = 30;
  double bin_width = 5.0;
  std::size_t sample_every = 1000;
  bool log_bins = false;
  std::optional<double> horizon;
  unsigned threads = 1;

  /// Canonical "key=value" lines of everything that affects results.
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Failure carrying its exit code and a stable short reason code.
class CliError : public std::runtime_error {
 public:
  CliError(ExitCode exit, std::string code, const std::string& message);
  ExitCode exit_code() const noexcept { return exit_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ExitCode exit_;
  std::string code_;
};

/// Parsed generator configuration for the flags in `config`.
GeneratorConfig generator_config(const RunConfig& config);
/// (lo, hi) from "lo..hi".
std::pair<int, int> parse_k_range(const std::string& s);
/// (p1, p2) from "p1,p2".
std::pair<double, double> parse_pair(const std::string& s);

/// Runs the tool. `args` excludes the program name. Reports go to `out`,
/// usage text and the one-line failure reason to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace socnet::cli
