// Random-target null model: expected counts, z-scores (global and by
// creator in-degree), Lyapunov diagnostics and rank-percentile bias.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socnet/netstate.hpp"

namespace socnet {

/// Chance that a uniformly random pick from the pool lands in the
/// mechanism's candidate set: count / pool.
/// Throws std::domain_error when pool < 1 and std::invalid_argument when the
/// candidate count exceeds the pool.
double null_probability(const LinkContext& ctx, Mechanism m);

/// True when null_probability is defined for the context.
inline bool usable(const LinkContext& ctx) { return ctx.pool >= 1; }

struct ZReport {
  Mechanism mechanism = Mechanism::Grandparent;
  double observed = 0.0;  // S
  double expected = 0.0;  // E
  double sigma = 0.0;
  std::optional<double> z;  // empty when sigma == 0
  double p_value = 1.0;     // two-sided; 1 when z is undefined
  std::size_t n_links_used = 0;
  std::size_t n_excluded = 0;  // pool < 1
};

/// Throws std::invalid_argument when no context is usable.
ZReport z_score(std::span<const LinkContext> contexts, Mechanism m);

/// Two-sided standard normal tail probability.
double normal_two_sided_p(double z);

struct LyapunovCurve {
  std::vector<std::size_t> n;  // prefix length in usable links
  std::vector<double> ratio;
  double final_value = 0.0;
  double tail_max = 0.0;     // max over the second half of the curve
  bool decreasing = false;   // final value below the value at a quarter length
};

/// sum_l E[(X_l - p_l)^4] / sigma_n^4 over growing prefixes, sampled every
/// `stride` usable links (and at the end). Prefixes with sigma = 0 are skipped.
LyapunovCurve lyapunov_diagnostic(std::span<const LinkContext> contexts, Mechanism m, std::size_t stride = 1);

struct Binning {
  enum class Kind : std::uint8_t { Exact, Log, Width, ExactThenLog };
  Kind kind = Kind::ExactThenLog;
  std::uint32_t width = 10;        // Width bins
  std::uint32_t exact_limit = 100; // ExactThenLog: exact k below this
  double log_factor = 1.25;        // growth of log-spaced bin edges

  /// Inclusive [lo, hi] of the bin containing k.
  std::pair<std::uint32_t, std::uint32_t> bin_of(std::uint32_t k) const;
};

struct ZBin {
  std::uint32_t k_lo = 0;
  std::uint32_t k_hi = 0;
  ZReport report;
};

struct ZByDegree {
  std::vector<ZBin> bins;
  std::vector<std::string> notes;  // omitted bins
};

ZByDegree z_by_indegree(std::span<const LinkContext> contexts, Mechanism m, const Binning& binning = {},
                        std::size_t min_count = 30);

struct RankBias {
  Mechanism mechanism = Mechanism::Grandparent;
  std::size_t n_links = 0;
  double bin_width = 5.0;
  std::vector<double> density;  // per percentile bin; integrates to 1
};

/// Density over rank percentiles of followed candidates, for Grandparent or
/// Origin. Each qualifying link spreads unit mass uniformly over the
/// percentile interval its tie group occupies, so a uniformly random choice
/// yields a flat density. Throws std::invalid_argument without qualifying
/// links.
RankBias rank_bias(std::span<const LinkContext> contexts, Mechanism m, double bin_width = 5.0);

}  // namespace socnet
