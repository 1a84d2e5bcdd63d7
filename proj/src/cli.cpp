#include "socnet/cli.hpp"

#include <CLI11.hpp>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "socnet/artifacts.hpp"
#include "socnet/nullstats.hpp"
#include "socnet/rng.hpp"
#include "socnet/userclasses.hpp"

namespace socnet::cli {

namespace fs = std::filesystem;

CliError::CliError(ExitCode exit, std::string code, const std::string& message)
    : std::runtime_error(message), exit_(exit), code_(std::move(code)) {}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s.precision(17);
  s << "subcommand=" << subcommand << "\nseed=" << seed << "\nevents=" << events << "\nfollows=" << follows
    << "\nmix=" << mix << "\nflavor=" << flavor << "\nrates=" << rates
    << "\ntraffic-weighting=" << traffic_weighting << "\nweight-exponent=" << weight_exponent
    << "\nfeed-window=" << feed_window << "\nseed-users=" << seed_users << "\nactivity-skew=" << activity_skew
    << "\nregime-k=" << regime_k << "\nregime-mix=" << regime_mix << "\npool=" << pool
    << "\nempty-sets=" << empty_sets << "\nmin-links=" << min_links << "\ngrid-step=" << grid_step
    << "\nrefine=" << refine << "\nk-range=" << k_range << "\nfolds=" << folds << "\nrestarts=" << restarts
    << "\nk-rule=" << k_rule << "\nmin-bin-count=" << min_bin_count << "\nbin-width=" << bin_width
    << "\nsample-every=" << sample_every
    << "\nlog-bins=" << log_bins << "\nhorizon=" << (horizon ? std::to_string(*horizon) : "last") << '\n';
  return s.str();
}

std::uint64_t RunConfig::hash() const { return fnv1a(canonical()); }

std::pair<double, double> parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw CliError(kUsage, "bad_pair", "expected p1,p2 but got '" + s + "'");
  try {
    std::size_t used = 0;
    const double a = std::stod(s.substr(0, comma), &used);
    const std::string rest = s.substr(comma + 1);
    std::size_t used2 = 0;
    const double b = std::stod(rest, &used2);
    if (used != comma || used2 != rest.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw CliError(kUsage, "bad_pair", "expected p1,p2 but got '" + s + "'");
  }
}

std::pair<int, int> parse_k_range(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) throw std::invalid_argument(s);
    const int lo = std::stoi(s.substr(0, dots));
    const int hi = std::stoi(s.substr(dots + 2));
    if (lo < 1 || hi < lo) throw std::invalid_argument(s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CliError(kUsage, "bad_k_range", "expected lo..hi with 1 <= lo <= hi but got '" + s + "'");
  }
}

namespace {

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  try {
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  } catch (const std::logic_error&) {
    out.clear();
  }
  if (out.size() != n) {
    throw CliError(kUsage, std::string("bad_") + what, std::string(what) + ": expected " + std::to_string(n) +
                                                            " comma-separated numbers but got '" + s + "'");
  }
  return out;
}

Mechanism shortcut_mechanism(const std::string& flavor) {
  switch (parse_flavor(flavor)) {
    case ShortcutFlavor::Grandparent: return Mechanism::Grandparent;
    case ShortcutFlavor::Origin: return Mechanism::Origin;
    case ShortcutFlavor::Union: break;
  }
  return Mechanism::Shortcut;
}

}  // namespace

GeneratorConfig generator_config(const RunConfig& c) {
  GeneratorConfig g;
  g.seed = c.seed;
  g.n_events = c.events;
  g.target_follows = c.follows;
  const auto [p1, p2] = parse_pair(c.mix);
  g.mix = StrategyMix::from_pair(p1, p2);
  g.shortcut_flavor = parse_flavor(c.flavor);
  const auto r = parse_list(c.rates, 4, "rates");
  g.rates = {r[0], r[1], r[2], r[3]};
  g.traffic_weighting = c.traffic_weighting;
  g.weighting_exponent = c.weight_exponent;
  g.repost_feed_window = c.feed_window;
  g.seed_users = c.seed_users;
  g.activity_skew = c.activity_skew;
  if (c.regime_k > 0) {
    const auto [q1, q2] = parse_pair(c.regime_mix);
    g.regime = RegimeSwitch{c.regime_k, StrategyMix::from_pair(q1, q2)};
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kUsage, "bad_generator_config", e.what());
  }
  return g;
}

namespace {

constexpr std::array<Mechanism, 3> kNullMechanisms{Mechanism::Grandparent, Mechanism::Origin, Mechanism::Triadic};

bool is_context_file(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#link_index", 0) == 0) return true;
    if (line.empty() || line[0] == '#') continue;
    return false;
  }
  return false;
}

class Session {
 public:
  Session(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out) {
    prov_ = {cfg_.seed, cfg_.hash()};
    grid_.step = cfg_.grid_step;
    grid_.refine_rounds = cfg_.refine;
    grid_.threads = cfg_.threads;
    try {
      grid_.empty_sets = parse_empty_set_policy(cfg_.empty_sets);
      grid_.validate();
    } catch (const std::invalid_argument& e) {
      throw CliError(kUsage, "bad_option", e.what());
    }
    if (cfg_.pool == "paper") {
      replay_.pool = PoolMode::Paper;
    } else if (cfg_.pool == "users") {
      replay_.pool = PoolMode::Users;
    } else {
      throw CliError(kUsage, "bad_option", "--pool must be paper or users");
    }
    shortcut_ = shortcut_mechanism(cfg_.flavor);
    k_range_ = parse_k_range(cfg_.k_range);
    try {
      k_rule_ = parse_k_rule(cfg_.k_rule);
    } catch (const std::invalid_argument& e) {
      throw CliError(kUsage, "bad_option", e.what());
    }
    if (cfg_.threads < 1) throw CliError(kUsage, "bad_option", "--threads must be at least 1");
  }

  // Validates paths before any computation.
  void prepare(bool needs_input) {
    if (needs_input) {
      if (cfg_.input.empty()) throw CliError(kUsage, "missing_input", cfg_.subcommand + " needs --input");
      if (!fs::is_regular_file(cfg_.input)) throw CliError(kData, "input_not_found", "no such file: " + cfg_.input);
    }
    std::error_code ec;
    fs::create_directories(cfg_.output_dir, ec);
    if (ec || !fs::is_directory(cfg_.output_dir)) {
      throw CliError(kData, "output_dir", "cannot create output directory " + cfg_.output_dir);
    }
  }

  void generate() {
    const auto g = socnet::generate(generator_config(cfg_));
    std::string text = provenance_line(prov_) + "\n" + write_log_string(g.log);
    write_text("events.log", text);
    std::ostringstream tr;
    tr << provenance_line(prov_) << "\n#follow_seq\tlabel\n";
    write_trace(g, tr);
    write_text("trace.tsv", tr.str());
    log_ = g.log;
    source_ = "generated";
    out_ << "generate: " << g.log.events.size() << " events, " << g.log.user_count() << " users, "
         << g.labels.size() << " follows, " << g.skips.size() << " skipped actions\n";
  }

  void contexts() {
    load();
    std::ostringstream s;
    write_contexts(contexts_, s, provenance_line(prov_) + "\n");
    write_text("contexts.tsv", s.str());
    out_ << "contexts: " << contexts_.size() << " follow contexts (pool " << cfg_.pool << ")\n";
  }

  void stats() {
    load();
    const auto& st = state("stats");
    const auto summary = summary_stats(*log_, st, {cfg_.sample_every, cfg_.log_bins});
    write("growth.csv", growth_table(summary));
    write("degrees.csv", degree_table(summary));
    if (contexts_.empty()) {
      note("stats: no follow events, overlap skipped");
      return;
    }
    const auto ov = mechanism_overlap(contexts_);
    write("overlap.csv", overlap_table(ov));
    out_ << "stats: users " << st.user_count() << ", links " << st.follow_count() << ", posts " << st.post_count()
         << ", reposts " << st.repost_count() << "; overlap G " << format_number(ov.grandparent) << " O "
         << format_number(ov.origin) << " tri " << format_number(ov.triadic) << '\n';
    summary_lines_.push_back("links with G / O / tri targets: " + format_number(ov.grandparent) + " / " +
                             format_number(ov.origin) + " / " + format_number(ov.triadic));
  }

  void nulltest() {
    load();
    std::vector<ZReport> reports;
    std::vector<MechanismZByDegree> by_k;
    std::vector<MechanismLyapunov> lyap;
    for (Mechanism m : kNullMechanisms) {
      reports.push_back(z_score(contexts_, m));
      auto curve = z_by_indegree(contexts_, m, Binning{}, cfg_.min_bin_count);
      by_k.push_back({m, std::move(curve)});
      const std::size_t stride = std::max<std::size_t>(1, contexts_.size() / 500);
      lyap.push_back({m, lyapunov_diagnostic(contexts_, m, stride)});
    }
    for (const auto& r : reports) check_finite(r.expected + r.sigma, "null statistics");
    write("zreport.csv", zreport_table(reports));
    write("z_by_k.csv", z_by_k_table(by_k));
    write("lyapunov.csv", lyapunov_table(lyap));
    std::string line = "z scores:";
    for (const auto& r : reports) line += " " + std::string(to_string(r.mechanism)) + " " + (r.z ? format_number(*r.z) : "NA");
    out_ << "nulltest: " << line.substr(10) << '\n';
    summary_lines_.push_back(line);
  }

  void rankbias() {
    load();
    std::vector<RankBias> out;
    for (Mechanism m : {Mechanism::Grandparent, Mechanism::Origin}) {
      try {
        out.push_back(rank_bias(contexts_, m, cfg_.bin_width));
      } catch (const std::invalid_argument& e) {
        note(std::string("rankbias: ") + std::string(to_string(m)) + " skipped, " + e.what());
      }
    }
    if (out.empty()) throw CliError(kData, "no_qualifying_links", "no follow of a ranked shortcut candidate");
    write("rank_bias.csv", rank_bias_table(out));
    for (const auto& b : out) {
      out_ << "rankbias: " << to_string(b.mechanism) << " from " << b.n_links << " links\n";
    }
  }

  void efficiency() {
    load();
    const auto report = link_efficiency(state("efficiency"), contexts_, cfg_.horizon);
    write("efficiency.csv", efficiency_table(report));
    write("efficiency_links.csv", efficiency_links_table(report));
    out_ << "efficiency: " << report.links.size() << " links, " << report.excluded << " at the horizon\n";
  }

  void fit() {
    load();
    std::vector<FitResult> fits;
    try {
      fits.push_back(fit_random(contexts_));
      for (Mechanism m : {Mechanism::Triadic, Mechanism::Grandparent, Mechanism::Origin, Mechanism::Shortcut}) {
        fits.push_back(fit_single(contexts_, m, grid_));
      }
      for (Mechanism m : {Mechanism::Grandparent, Mechanism::Origin, Mechanism::Shortcut}) {
        fits.push_back(fit_combined(contexts_, m, grid_));
      }
    } catch (const std::invalid_argument& e) {
      throw CliError(kData, "too_few_links", e.what());
    }
    for (const auto& f : fits) check_finite(f.loglik, "maximized log-likelihood of " + f.spec.name());
    write("fit.csv", fit_table(fits));

    std::vector<ModelCurve> curves;
    for (Mechanism m : {Mechanism::Triadic, Mechanism::Grandparent, Mechanism::Origin, Mechanism::Shortcut}) {
      curves.push_back({std::string(to_string(m)), loglik_curve(contexts_, m, cfg_.grid_step, cfg_.threads, grid_.empty_sets)});
    }
    write("loglik_curve.csv", curve_table(curves));
    write("loglik_surface.csv",
          surface_table(loglik_surface(contexts_, shortcut_, cfg_.grid_step, cfg_.threads, grid_.empty_sets)));

    const FitResult* combined = nullptr;
    for (const auto& f : fits)
      if (f.spec == StrategySpec::combined(shortcut_)) combined = &f;
    const std::string line = combined->spec.name() + " fit: p1 " + format_number(combined->params[0]) + " p2 " +
                             format_number(combined->params[1]) + " loglik " + format_number(combined->loglik);
    out_ << "fit: " << line << '\n';
    summary_lines_.push_back(line);
  }

  void fit_users() {
    load();
    user_fits_ = socnet::fit_users(contexts_, {cfg_.min_links, shortcut_, grid_});
    write("user_fits.csv", user_fits_table(user_fits_->fits, labels()));
    out_ << "fit-users: " << user_fits_->fits.size() << " users fitted, " << user_fits_->skipped_users
         << " below " << cfg_.min_links << " links\n";
  }

  void cluster() {
    if (!user_fits_) {
      load();
      user_fits_ = socnet::fit_users(contexts_, {cfg_.min_links, shortcut_, grid_});
    }
    ClusterOptions opt;
    opt.k_min = k_range_.first;
    opt.k_max = k_range_.second;
    opt.folds = cfg_.folds;
    opt.restarts = cfg_.restarts;
    opt.k_rule = k_rule_;
    opt.seed = cfg_.seed;
    opt.threads = cfg_.threads;
    try {
      clustering_ = cluster_users(user_fits_->fits, opt);
    } catch (const std::invalid_argument& e) {
      throw CliError(kData, "too_few_users", e.what());
    }
    for (double v : clustering_->objective_trace) check_finite(v, "EM objective");
    write("classes.csv", classes_table(*clustering_));
    write("ternary.csv", ternary_table(user_fits_->fits, *clustering_, labels()));
    write("cv.csv", cv_table(*clustering_));
    std::string line = "classes: k=" + std::to_string(clustering_->k);
    for (const auto& c : clustering_->classes) {
      line += " " + c.label + "(" + std::to_string(c.members.size()) + ")";
    }
    if (clustering_->degenerate) line += " [regularized covariance]";
    out_ << "cluster: " << line.substr(9) << '\n';
    summary_lines_.push_back(line);
  }

  void profiles() {
    load();
    const auto& st = state("profiles");
    if (!clustering_) cluster();
    const auto profiles = class_profiles(clustering_->classes, st);
    write("profiles.csv", profiles_table(profiles));
    out_ << "profiles: " << profiles.size() << " classes x " << profile_feature_names().size() << " features\n";
  }

  void pipeline() {
    if (cfg_.input.empty()) {
      generate();
    } else {
      source_ = cfg_.input;
    }
    contexts();
    auto optional_stage = [&](const char* stage, auto&& fn) {
      try {
        fn();
      } catch (const CliError& e) {
        if (e.exit_code() != kData) throw;
        note(std::string(stage) + " skipped: " + e.what());
      }
    };
    optional_stage("stats", [&] { stats(); });
    nulltest();
    optional_stage("rankbias", [&] { rankbias(); });
    optional_stage("efficiency", [&] { efficiency(); });
    fit();
    fit_users();
    optional_stage("cluster", [&] { cluster(); });
    if (clustering_) optional_stage("profiles", [&] { profiles(); });
    write_report();
  }

 private:
  void load() {
    if (!contexts_.empty() || loaded_) return;
    loaded_ = true;
    if (!log_) {
      if (is_context_file(cfg_.input)) {
        std::ifstream in(cfg_.input);
        contexts_ = read_contexts(in);
        return;
      }
      log_ = read_log_file(cfg_.input);
    }
    auto r = replay(*log_, replay_);
    state_.emplace(std::move(r.state));
    contexts_ = std::move(r.contexts);
  }

  const NetworkState& state(const std::string& stage) {
    if (!state_) throw CliError(kData, "needs_event_log", stage + " needs an event log, not a context file");
    return *state_;
  }

  std::span<const std::uint64_t> labels() const {
    if (!log_) return {};
    return log_->user_labels;
  }

  void check_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw CliError(kNumerical, "nonfinite", what + " is not finite");
  }

  void note(const std::string& s) {
    out_ << s << '\n';
    notes_.push_back(s);
  }

  std::string path_of(const std::string& file) const { return (fs::path(cfg_.output_dir) / file).string(); }

  void write(const std::string& file, const CsvTable& t) {
    t.write_file(path_of(file), prov_);
    written_.push_back(file);
  }

  void write_text(const std::string& file, const std::string& text) {
    std::ofstream f(path_of(file), std::ios::binary);
    f << text;
    if (!f) throw CliError(kData, "io", "cannot write " + path_of(file));
    written_.push_back(file);
  }

  void write_report() {
    std::ostringstream r;
    r << "socnet " << kToolVersion << " pipeline report\n"
      << "seed " << cfg_.seed << ", config " << format_hash(prov_.config_hash) << "\n"
      << "input: " << source_ << "\n"
      << "pool: " << cfg_.pool << ", empty sets: " << cfg_.empty_sets << ", shortcut: " << to_string(shortcut_)
      << "\n\n";
    for (const auto& s : summary_lines_) r << s << '\n';
    if (!notes_.empty()) {
      r << "\nnotes:\n";
      for (const auto& n : notes_) r << "  " << n << '\n';
    }
    r << "\nfiles:\n";
    for (const auto& f : written_) r << "  " << f << '\n';
    r << "  report.txt\n";
    write_text("report.txt", r.str());
    out_ << "pipeline: report written to " << path_of("report.txt") << '\n';
  }

  RunConfig cfg_;
  std::ostream& out_;
  Provenance prov_;
  GridOptions grid_;
  ReplayOptions replay_;
  Mechanism shortcut_ = Mechanism::Shortcut;
  std::pair<int, int> k_range_;
  KRule k_rule_ = KRule::OneSE;

  bool loaded_ = false;
  std::string source_;
  std::optional<EventLog> log_;
  std::optional<NetworkState> state_;
  std::vector<LinkContext> contexts_;
  std::optional<UserFits> user_fits_;
  std::optional<Clustering> clustering_;

  std::vector<std::string> written_;
  std::vector<std::string> notes_;
  std::vector<std::string> summary_lines_;
};

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r' || c == '\t') c = ' ';
  return s;
}

int fail(std::ostream& err, ExitCode code, const std::string& reason, const std::string& message) {
  err << "error exit=" << int(code) << " code=" << reason << " message=" << one_line(message) << '\n';
  return code;
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--input", c.input, "Event log or link-context TSV");
  app.add_option("--output-dir", c.output_dir, "Directory for outputs")->capture_default_str();
  app.add_option("--seed", c.seed, "Seed for every random stream")->capture_default_str();
  app.add_option("--events", c.events, "generate: maximum number of events")->capture_default_str();
  app.add_option("--follows", c.follows, "generate: stop after this many follows (0 = no limit)")->capture_default_str();
  app.add_option("--mix", c.mix, "generate: p_traffic,p_structure")->capture_default_str();
  app.add_option("--flavor", c.flavor, "Shortcut flavor: g, o or guo")
      ->check(CLI::IsMember({"g", "o", "guo"}))
      ->capture_default_str();
  app.add_option("--rates", c.rates, "generate: join,post,repost,follow weights")->capture_default_str();
  app.add_flag("--traffic-weighting", c.traffic_weighting, "generate: weight shortcut targets by seen count");
  app.add_option("--weight-exponent", c.weight_exponent, "generate: exponent on seen counts")->capture_default_str();
  app.add_option("--feed-window", c.feed_window, "generate: repost feed length")->capture_default_str();
  app.add_option("--seed-users", c.seed_users, "generate: users joined up front")->capture_default_str();
  app.add_option("--activity-skew", c.activity_skew, "generate: log-normal sigma of user activity")
      ->capture_default_str();
  app.add_option("--regime-k", c.regime_k, "generate: in-degree at which --regime-mix takes over (0 = off)")
      ->capture_default_str();
  app.add_option("--regime-mix", c.regime_mix, "generate: p_traffic,p_structure above --regime-k")
      ->capture_default_str();
  app.add_option("--pool", c.pool, "Random pool size: paper or users")
      ->check(CLI::IsMember({"paper", "users"}))
      ->capture_default_str();
  app.add_option("--empty-sets", c.empty_sets, "Mass of a strategy with no candidates: paper or random")
      ->check(CLI::IsMember({"paper", "random"}))
      ->capture_default_str();
  app.add_option("--min-links", c.min_links, "fit-users: minimum follows per user")->capture_default_str();
  app.add_option("--grid-step", c.grid_step, "Coarse grid step in (0, 0.1]")->capture_default_str();
  app.add_option("--refine", c.refine, "Tenfold grid refinement rounds")->capture_default_str();
  app.add_option("--k-range", c.k_range, "cluster: candidate class counts lo..hi")->capture_default_str();
  app.add_option("--folds", c.folds, "cluster: cross-validation folds")->capture_default_str();
  app.add_option("--restarts", c.restarts, "cluster: EM restarts of the final model")->capture_default_str();
  app.add_option("--k-rule", c.k_rule, "cluster: class count rule, one-se or max")
      ->check(CLI::IsMember({"one-se", "max"}))
      ->capture_default_str();
  app.add_option("--min-bin-count", c.min_bin_count, "nulltest: minimum links per in-degree bin")
      ->capture_default_str();
  app.add_option("--bin-width", c.bin_width, "rankbias: percentile bin width")->capture_default_str();
  app.add_option("--sample-every", c.sample_every, "stats: growth sampling interval")->capture_default_str();
  app.add_flag("--log-bins", c.log_bins, "stats: log-binned degree histograms");
  app.add_option("--horizon", c.horizon, "efficiency: end time T (default: last event)");
  app.add_option("--threads", c.threads, "Worker threads")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Social network growth simulator and link-strategy inference", "socnet"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "key=value file; flags override it");
  // Values such as mix=0.12,0.71 are single strings, not arrays.
  app.get_config_formatter_base()->arrayDelimiter(';');
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  add_options(app, cfg);

  const std::vector<std::pair<const char*, const char*>> commands{
      {"generate", "Synthetic event log and strategy trace"},
      {"contexts", "Per-follow link contexts as TSV"},
      {"stats", "Growth curves, degree histograms, mechanism overlap"},
      {"nulltest", "z-scores against the random null, by in-degree, Lyapunov ratio"},
      {"rankbias", "Rank-percentile density of followed shortcut candidates"},
      {"efficiency", "Messages seen and reposted per link per time unit"},
      {"fit", "Maximum-likelihood strategy models"},
      {"fit-users", "Per-user combined model fits"},
      {"cluster", "Gaussian-mixture classes of per-user strategies"},
      {"profiles", "Feature profiles of the classes"},
      {"pipeline", "Every stage in order, plus report.txt"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << app.help();
    return fail(err, kUsage, "usage", e.what());
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    Session s(cfg, out);
    const std::string& sub = cfg.subcommand;
    s.prepare(sub != "generate" && !(sub == "pipeline" && cfg.input.empty()));
    if (sub == "generate") s.generate();
    else if (sub == "contexts") s.contexts();
    else if (sub == "stats") s.stats();
    else if (sub == "nulltest") s.nulltest();
    else if (sub == "rankbias") s.rankbias();
    else if (sub == "efficiency") s.efficiency();
    else if (sub == "fit") s.fit();
    else if (sub == "fit-users") s.fit_users();
    else if (sub == "cluster") s.cluster();
    else if (sub == "profiles") s.profiles();
    else if (sub == "pipeline") s.pipeline();
  } catch (const CliError& e) {
    if (e.exit_code() == kUsage) err << app.help();
    return fail(err, e.exit_code(), e.code(), e.what());
  } catch (const LogError& e) {
    return fail(err, kData, std::string(to_string(e.code())), e.what());
  } catch (const std::domain_error& e) {
    return fail(err, kNumerical, "domain", e.what());
  } catch (const std::range_error& e) {
    return fail(err, kNumerical, "range", e.what());
  } catch (const std::overflow_error& e) {
    return fail(err, kNumerical, "overflow", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(err, kData, "invalid_data", e.what());
  } catch (const std::exception& e) {
    return fail(err, kData, "failure", e.what());
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace socnet::cli
