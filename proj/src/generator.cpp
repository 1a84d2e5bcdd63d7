#include "socnet/generator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "socnet/netstate.hpp"
#include "socnet/rng.hpp"

namespace socnet {

StrategyMix StrategyMix::from_pair(double p_traffic, double p_structure) {
  return {p_traffic, p_structure, 1.0 - p_traffic - p_structure};
}

void StrategyMix::validate() const {
  for (double p : {traffic, structure, random}) {
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) throw std::invalid_argument("strategy mix component outside [0,1]");
  }
  if (std::fabs(traffic + structure + random - 1.0) > 1e-9) throw std::invalid_argument("strategy mix must sum to 1");
}

std::string_view to_string(ShortcutFlavor f) {
  switch (f) {
    case ShortcutFlavor::Grandparent: return "g";
    case ShortcutFlavor::Origin: return "o";
    case ShortcutFlavor::Union: return "guo";
  }
  return "?";
}

ShortcutFlavor parse_flavor(std::string_view s) {
  if (s == "g" || s == "G") return ShortcutFlavor::Grandparent;
  if (s == "o" || s == "O") return ShortcutFlavor::Origin;
  if (s == "guo" || s == "GuO") return ShortcutFlavor::Union;
  throw std::invalid_argument("unknown shortcut flavor '" + std::string(s) + "'");
}

void ActivityRates::validate() const {
  for (double r : {join, post, repost, follow})
    if (!(r >= 0.0)) throw std::invalid_argument("activity rates must be non-negative");
  if (std::fabs(join + post + repost + follow - 1.0) > 1e-9) throw std::invalid_argument("activity rates must sum to 1");
}

void GeneratorConfig::validate() const {
  if (n_events < 1) throw std::invalid_argument("n_events must be at least 1");
  rates.validate();
  mix.validate();
  if (regime) regime->mix.validate();
  double share = 0.0;
  for (const auto& c : planted) {
    c.mix.validate();
    if (!(c.share > 0.0) || !(c.activity > 0.0)) throw std::invalid_argument("planted class share/activity must be positive");
    share += c.share;
  }
  if (!planted.empty() && std::fabs(share - 1.0) > 1e-9) throw std::invalid_argument("planted class shares must sum to 1");
  if (!(weighting_exponent >= 0.0)) throw std::invalid_argument("weighting exponent must be non-negative");
  if (!(activity_skew >= 0.0)) throw std::invalid_argument("activity skew must be non-negative");
  if (seed_users < 1) throw std::invalid_argument("seed_users must be at least 1");
}

std::string_view to_string(StrategyLabel l) {
  switch (l) {
    case StrategyLabel::Traffic: return "traffic";
    case StrategyLabel::Structure: return "structure";
    case StrategyLabel::Random: return "random";
    case StrategyLabel::FallbackFromTraffic: return "fallback-from-traffic";
    case StrategyLabel::FallbackFromStructure: return "fallback-from-structure";
  }
  return "?";
}

namespace {

// Prefix sums over per-user weights, growing as users join.
class FenwickSampler {
 public:
  void push(double w) {
    const std::size_t i = tree_.size() + 1;
    tree_.push_back(w);
    // Fold in the already-present children of node i.
    for (std::size_t step = 1; step < (i & (~i + 1)); step <<= 1) tree_[i - 1] += tree_[i - step - 1];
    total_ += w;
  }

  std::size_t sample(Rng& rng) const {
    double x = uniform01(rng) * total_;
    std::size_t pos = 0;
    std::size_t mask = 1;
    while (mask * 2 <= tree_.size()) mask *= 2;
    for (; mask > 0; mask >>= 1) {
      const std::size_t next = pos + mask;
      if (next <= tree_.size() && tree_[next - 1] <= x) {
        pos = next;
        x -= tree_[next - 1];
      }
    }
    return std::min(pos, tree_.size() - 1);
  }

 private:
  std::vector<double> tree_;
  double total_ = 0.0;
};

class Simulator {
 public:
  explicit Simulator(const GeneratorConfig& config)
      : config_(config),
        rng_(derive_seed(config.seed, "generate")),
        state_(ReplayOptions{PoolMode::Users, false, config.repost_feed_window}) {
    out_.traced = config.tracing;
  }

  Generation run() {
    for (std::size_t i = 0; i < config_.seed_users && !done(); ++i) add_user();
    std::size_t consecutive_skips = 0;
    std::uint64_t step = 0;
    while (!done()) {
      ++step;
      const std::size_t before = events_.size();
      switch (draw_kind()) {
        case EventKind::Join: add_user(); break;
        case EventKind::Post: post(); break;
        case EventKind::Repost: repost(step); break;
        case EventKind::Follow: follow(step); break;
      }
      if (events_.size() == before) {
        if (++consecutive_skips >= 1000) {
          out_.skips.push_back({step, EventKind::Join, "forced join after repeated skips"});
          add_user();
          consecutive_skips = 0;
        }
      } else {
        consecutive_skips = 0;
      }
    }
    out_.log = EventLog::from_events(std::move(events_));
    return std::move(out_);
  }

 private:
  bool done() const {
    if (events_.size() >= config_.n_events) return true;
    return config_.target_follows > 0 && follows_ >= config_.target_follows;
  }

  void emit(Event e) {
    e.seq = events_.size();
    e.time = static_cast<double>(e.seq);
    state_.apply(e);
    events_.push_back(e);
  }

  EventKind draw_kind() {
    const auto& r = config_.rates;
    double x = uniform01(rng_);
    if ((x -= r.join) < 0) return EventKind::Join;
    if ((x -= r.post) < 0) return EventKind::Post;
    if ((x -= r.repost) < 0) return EventKind::Repost;
    return EventKind::Follow;
  }

  void add_user() {
    const auto u = static_cast<UserId>(users_);
    ++users_;
    double activity = 1.0;
    if (!config_.planted.empty()) {
      double x = uniform01(rng_);
      std::uint32_t c = 0;
      while (c + 1 < config_.planted.size() && (x -= config_.planted[c].share) >= 0) ++c;
      out_.user_class.push_back(c);
      activity *= config_.planted[c].activity;
    }
    if (config_.activity_skew > 0) {
      activity *= std::exp(config_.activity_skew * std::normal_distribution<double>()(rng_));
    }
    out_.user_activity.push_back(activity);
    activity_.push(activity);
    emit(Event::join(0, u));
  }

  void post() {
    const auto author = static_cast<UserId>(activity_.sample(rng_));
    emit(Event::post(0, author, next_message_++));
  }

  void repost(std::uint64_t step) {
    const auto u = static_cast<UserId>(activity_.sample(rng_));
    const auto& feed = state_.feed(u);
    if (feed.empty()) {
      out_.skips.push_back({step, EventKind::Repost, "empty feed"});
      return;
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      const FeedItem item = feed[uniform_below(rng_, feed.size())];
      if (!state_.holds(u, item.message)) {
        emit(Event::repost(0, u, item.message, item.sender));
        return;
      }
    }
    out_.skips.push_back({step, EventKind::Repost, "feed holds only messages already held"});
  }

  const StrategyMix& mix_for(UserId creator) const {
    if (config_.regime && state_.in_degree(creator) >= config_.regime->at_k) return config_.regime->mix;
    if (!config_.planted.empty()) return config_.planted[out_.user_class[creator]].mix;
    return config_.mix;
  }

  Mechanism shortcut_mechanism() const {
    switch (config_.shortcut_flavor) {
      case ShortcutFlavor::Grandparent: return Mechanism::Grandparent;
      case ShortcutFlavor::Origin: return Mechanism::Origin;
      case ShortcutFlavor::Union: return Mechanism::Shortcut;
    }
    return Mechanism::Shortcut;
  }

  UserId random_target(UserId creator) {
    const std::uint32_t k = state_.in_degree(creator);
    if (2 * static_cast<std::size_t>(k) < users_) {
      while (true) {
        const auto c = static_cast<UserId>(uniform_below(rng_, users_));
        if (c != creator && !state_.follows(creator, c)) return c;
      }
    }
    std::vector<UserId> pool;
    for (UserId c = 0; c < users_; ++c)
      if (c != creator && !state_.follows(creator, c)) pool.push_back(c);
    return pool[uniform_below(rng_, pool.size())];
  }

  std::optional<UserId> shortcut_target(UserId creator) {
    const auto cands = state_.candidates(creator, shortcut_mechanism());
    if (cands.empty()) return std::nullopt;
    if (!config_.traffic_weighting) return cands[uniform_below(rng_, cands.size())].user;
    std::vector<double> cumulative;
    cumulative.reserve(cands.size());
    double total = 0.0;
    for (const auto& c : cands) {
      total += std::pow(static_cast<double>(c.seen), config_.weighting_exponent);
      cumulative.push_back(total);
    }
    const double x = uniform01(rng_) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) --it;
    return cands[static_cast<std::size_t>(it - cumulative.begin())].user;
  }

  std::optional<UserId> triadic_target(UserId creator) {
    const auto cands = state_.candidates(creator, Mechanism::Triadic);
    if (cands.empty()) return std::nullopt;
    return cands[uniform_below(rng_, cands.size())].user;
  }

  void follow(std::uint64_t step) {
    const auto creator = static_cast<UserId>(uniform_below(rng_, users_));
    const std::uint32_t k = state_.in_degree(creator);
    if (k >= config_.max_in_degree || k + 1 >= users_) {
      out_.skips.push_back({step, EventKind::Follow, "creator cannot follow anyone else"});
      return;
    }
    const StrategyMix& mix = mix_for(creator);
    const double x = uniform01(rng_);
    std::optional<UserId> target;
    StrategyLabel label;
    if (x < mix.traffic) {
      target = shortcut_target(creator);
      label = target ? StrategyLabel::Traffic : StrategyLabel::FallbackFromTraffic;
    } else if (x < mix.traffic + mix.structure) {
      target = triadic_target(creator);
      label = target ? StrategyLabel::Structure : StrategyLabel::FallbackFromStructure;
    } else {
      label = StrategyLabel::Random;
    }
    if (!target) target = random_target(creator);
    emit(Event::follow(0, creator, *target));
    ++follows_;
    if (config_.tracing) out_.labels.push_back({events_.back().seq, label});
  }

  const GeneratorConfig& config_;
  Rng rng_;
  NetworkState state_;
  FenwickSampler activity_;
  std::vector<Event> events_;
  Generation out_;
  std::size_t users_ = 0;
  std::size_t follows_ = 0;
  MessageId next_message_ = 0;
};

}  // namespace

Generation generate(const GeneratorConfig& config) {
  config.validate();
  return Simulator(config).run();
}

const std::vector<TraceRecord>& trace(const Generation& g) {
  if (!g.traced) throw std::logic_error("generation ran with tracing disabled");
  return g.labels;
}

void write_trace(const Generation& g, std::ostream& out) {
  for (const auto& r : trace(g)) out << r.follow_seq << '\t' << to_string(r.label) << '\n';
}

}  // namespace socnet
