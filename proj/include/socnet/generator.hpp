// Synthetic event logs under a mixture of link-creation strategies, for
// validating the estimators by parameter recovery.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "socnet/eventlog.hpp"

namespace socnet {

/// Probabilities of following a shortcut (traffic), a triadic node
/// (structure), or a random user.
struct StrategyMix {
  double traffic = 0.0;
  double structure = 0.0;
  double random = 1.0;

  /// (p1, p2) with the random share as the residual.
  static StrategyMix from_pair(double p_traffic, double p_structure);
  /// Throws std::invalid_argument unless on the simplex within 1e-9.
  void validate() const;
};

enum class ShortcutFlavor : std::uint8_t { Grandparent, Origin, Union };

std::string_view to_string(ShortcutFlavor f);
ShortcutFlavor parse_flavor(std::string_view s);

struct ActivityRates {
  double join = 0.02;
  double post = 0.18;
  double repost = 0.30;
  double follow = 0.50;

  void validate() const;
};

/// Users with k >= at_k switch to `mix`.
struct RegimeSwitch {
  std::uint32_t at_k = 75;
  StrategyMix mix;
};

/// A planted population of users sharing one strategy mix.
struct PlantedClass {
  StrategyMix mix;
  double share = 1.0;     // fraction of joining users
  double activity = 1.0;  // multiplier on post/repost rates
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t n_events = 10000;
  /// Stop once this many Follow events exist (0 = only n_events applies).
  std::size_t target_follows = 0;
  ActivityRates rates;
  StrategyMix mix = StrategyMix::from_pair(0.12, 0.71);
  ShortcutFlavor shortcut_flavor = ShortcutFlavor::Union;
  /// Shortcut targets sampled proportionally to seen-count^exponent.
  bool traffic_weighting = false;
  double weighting_exponent = 1.0;
  std::size_t repost_feed_window = 20;
  /// Users joined before the first other event.
  std::size_t seed_users = 20;
  /// Sigma of the log-normal per-user activity multiplier (0 = uniform).
  double activity_skew = 0.0;
  std::uint32_t max_in_degree = 1000;
  std::optional<RegimeSwitch> regime;
  std::vector<PlantedClass> planted;
  bool tracing = true;

  void validate() const;
};

enum class StrategyLabel : std::uint8_t { Traffic, Structure, Random, FallbackFromTraffic, FallbackFromStructure };

std::string_view to_string(StrategyLabel l);

struct TraceRecord {
  std::uint64_t follow_seq = 0;
  StrategyLabel label = StrategyLabel::Random;
};

/// An action that was drawn but could not be realized.
struct SkipRecord {
  std::uint64_t step = 0;
  EventKind kind = EventKind::Join;
  std::string reason;
};

struct Generation {
  EventLog log;
  bool traced = false;
  std::vector<TraceRecord> labels;
  std::vector<SkipRecord> skips;
  /// Planted class index per user (empty when no planted classes).
  std::vector<std::uint32_t> user_class;
  /// Per-user activity multiplier actually used.
  std::vector<double> user_activity;
};

/// Deterministic in config (including seed). Timestamps equal seq.
Generation generate(const GeneratorConfig& config);

/// Realized strategy per Follow. Throws std::logic_error if tracing was off.
const std::vector<TraceRecord>& trace(const Generation& g);

/// TSV `<follow_seq>\t<label>`.
void write_trace(const Generation& g, std::ostream& out);

}  // namespace socnet
