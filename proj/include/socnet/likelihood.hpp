// Mixture likelihood of follow targets under the random, triadic and
// shortcut strategies, and its maximization over the probability simplex.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socnet/netstate.hpp"

namespace socnet {

enum class Strategy : std::uint8_t { Random, Grandparent, Origin, Shortcut, Triadic };

Strategy to_strategy(Mechanism m);

/// f(target | strategy, state): 1/pool for Random, indicator/count for the
/// others (0 when the candidate set is empty). Throws std::domain_error when
/// pool < 1 and std::invalid_argument for an indicator with a zero count.
double link_likelihood(const LinkContext& ctx, Strategy s);

/// What a strategy whose candidate set is empty contributes to a link.
///   Paper:  nothing; the link's mixture then sums to less than one.
///   Random: its probability moves to random choice, matching a generator
///           that falls back to a random target when the set is empty.
enum class EmptySetPolicy : std::uint8_t { Paper, Random };

std::string_view to_string(EmptySetPolicy p);
EmptySetPolicy parse_empty_set_policy(std::string_view s);

/// Non-random components of a model; the random strategy is always the
/// residual. One component is a single-strategy model, two a combined one
/// (p1 for the first, p2 for the second). Empty is the random baseline.
struct StrategySpec {
  std::vector<Mechanism> components;

  static StrategySpec random() { return {}; }
  static StrategySpec single(Mechanism m) { return {{m}}; }
  static StrategySpec combined(Mechanism shortcut) { return {{shortcut, Mechanism::Triadic}}; }

  /// Throws std::invalid_argument on duplicates, Shortcut together with
  /// Grandparent/Origin, or more than two components.
  void validate() const;
  /// "Rand", "tri", "G", "GuO+tri", ...
  std::string name() const;
  bool operator==(const StrategySpec&) const = default;
};

/// Per-link quantities of a two-component mixture, stored relative to the
/// random term: loglik = sum ln(1/pool) + sum ln(q + p1*r1 + p2*r2) over links
/// that either component explains + n_unexplained * ln(q), with
/// q = 1 - p1 - p2 and r = indicator * pool / count. Under
/// EmptySetPolicy::Random a component with no candidates has r = 1.
template <typename Scalar = double>
struct MixtureTerms {
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Array first;
  Array second;
  Scalar log_random = 0;  // sum over usable links of ln(1/pool)
  std::size_t n_unexplained = 0;
  std::size_t n_links = 0;
  std::size_t n_excluded = 0;  // pool < 1

  Scalar loglik(Scalar p1, Scalar p2) const;
};

/// Builds terms for up to two mechanisms (missing ones contribute zero).
MixtureTerms<double> mixture_terms(std::span<const LinkContext> contexts, std::optional<Mechanism> first,
                                   std::optional<Mechanism> second,
                                   EmptySetPolicy policy = EmptySetPolicy::Paper);

/// ln L(p) for a single strategy mixed with random choice.
double loglik_single(std::span<const LinkContext> contexts, Mechanism m, double p,
                     EmptySetPolicy policy = EmptySetPolicy::Paper);

/// ln L(p1, p2) for a shortcut strategy (p1), triadic closure (p2) and random.
double loglik_combined(std::span<const LinkContext> contexts, Mechanism shortcut, double p1, double p2,
                       EmptySetPolicy policy = EmptySetPolicy::Paper);

/// Random-only baseline: sum of ln(1/pool).
double loglik_random(std::span<const LinkContext> contexts);

struct GridOptions {
  double step = 0.01;       // coarse grid, in (0, 0.1]
  int refine_rounds = 2;    // each round shrinks the step tenfold
  unsigned threads = 1;
  EmptySetPolicy empty_sets = EmptySetPolicy::Paper;

  void validate() const;
};

struct FitResult {
  StrategySpec spec;
  std::vector<double> params;  // one per component
  double loglik = 0.0;
  double grid_resolution = 0.0;
  bool boundary_flag = false;
  std::size_t n_links = 0;
  std::size_t n_excluded = 0;
  std::uint64_t dataset_id = 0;

  double p_random() const;
};

/// Fingerprint of the fields the likelihood depends on.
std::uint64_t dataset_fingerprint(std::span<const LinkContext> contexts);

FitResult fit_random(std::span<const LinkContext> contexts);
FitResult fit_single(std::span<const LinkContext> contexts, Mechanism m, const GridOptions& grid = {});
FitResult fit_combined(std::span<const LinkContext> contexts, Mechanism shortcut, const GridOptions& grid = {});
/// Dispatches on the number of components.
FitResult fit(std::span<const LinkContext> contexts, const StrategySpec& spec, const GridOptions& grid = {});

struct ComparisonRow {
  std::string category;  // Baseline, Single or Combined
  std::string model;
  std::vector<double> params;
  double loglik = 0.0;
};

/// Sorted by maximized log-likelihood, best first. Throws
/// std::invalid_argument if the fits come from different context sets.
std::vector<ComparisonRow> model_comparison(std::span<const FitResult> fits);

struct CurvePoint {
  double p1 = 0.0;
  double p2 = 0.0;
  double loglik = 0.0;
};

/// ln L over the grid used by fit_single (p2 = 0).
std::vector<CurvePoint> loglik_curve(std::span<const LinkContext> contexts, Mechanism m, double step = 0.01,
                                     unsigned threads = 1, EmptySetPolicy policy = EmptySetPolicy::Paper);
/// ln L over the feasible triangle used by fit_combined.
std::vector<CurvePoint> loglik_surface(std::span<const LinkContext> contexts, Mechanism shortcut, double step = 0.01,
                                       unsigned threads = 1, EmptySetPolicy policy = EmptySetPolicy::Paper);

}  // namespace socnet
