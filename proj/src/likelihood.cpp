#include "socnet/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "socnet/parallel.hpp"
#include "socnet/rng.hpp"

namespace socnet {

Strategy to_strategy(Mechanism m) {
  switch (m) {
    case Mechanism::Grandparent: return Strategy::Grandparent;
    case Mechanism::Origin: return Strategy::Origin;
    case Mechanism::Shortcut: return Strategy::Shortcut;
    case Mechanism::Triadic: return Strategy::Triadic;
  }
  return Strategy::Random;
}

double link_likelihood(const LinkContext& ctx, Strategy s) {
  if (ctx.pool < 1) throw std::domain_error("link_likelihood: empty candidate pool");
  Mechanism m;
  switch (s) {
    case Strategy::Random: return 1.0 / static_cast<double>(ctx.pool);
    case Strategy::Grandparent: m = Mechanism::Grandparent; break;
    case Strategy::Origin: m = Mechanism::Origin; break;
    case Strategy::Shortcut: m = Mechanism::Shortcut; break;
    case Strategy::Triadic: m = Mechanism::Triadic; break;
    default: throw std::invalid_argument("link_likelihood: unknown strategy");
  }
  const std::uint32_t n = ctx.count(m);
  if (!ctx.indicator(m)) return 0.0;
  if (n == 0) {
    throw std::invalid_argument("link_likelihood: " + std::string(to_string(m)) +
                                " indicator set with no candidates at link " + std::to_string(ctx.link_index));
  }
  return 1.0 / static_cast<double>(n);
}

std::string_view to_string(EmptySetPolicy p) { return p == EmptySetPolicy::Paper ? "paper" : "random"; }

EmptySetPolicy parse_empty_set_policy(std::string_view s) {
  if (s == "paper") return EmptySetPolicy::Paper;
  if (s == "random") return EmptySetPolicy::Random;
  throw std::invalid_argument("unknown empty-set policy '" + std::string(s) + "'");
}

void StrategySpec::validate() const {
  if (components.size() > 2) throw std::invalid_argument("strategy spec: at most two components");
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const Mechanism a = components[i], b = components[j];
      if (a == b) throw std::invalid_argument("strategy spec: duplicate component");
      auto is_part = [](Mechanism m) { return m == Mechanism::Grandparent || m == Mechanism::Origin; };
      if ((a == Mechanism::Shortcut && is_part(b)) || (b == Mechanism::Shortcut && is_part(a))) {
        throw std::invalid_argument("strategy spec: GuO cannot be combined with G or O");
      }
    }
  }
}

std::string StrategySpec::name() const {
  if (components.empty()) return "Rand";
  std::string out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) out += "+";
    out += to_string(components[i]);
  }
  return out;
}

template <typename Scalar>
Scalar MixtureTerms<Scalar>::loglik(Scalar p1, Scalar p2) const {
  const Scalar q = std::max(Scalar(0), Scalar(1) - p1 - p2);
  Scalar explained = 0;
  if (first.size() > 0) explained = (q + p1 * first + p2 * second).log().sum();
  Scalar rest = 0;
  if (n_unexplained > 0) rest = static_cast<Scalar>(n_unexplained) * std::log(q);
  return log_random + explained + rest;
}

template struct MixtureTerms<double>;

MixtureTerms<double> mixture_terms(std::span<const LinkContext> contexts, std::optional<Mechanism> first,
                                   std::optional<Mechanism> second, EmptySetPolicy policy) {
  MixtureTerms<double> t;
  std::vector<double> r1, r2;
  auto ratio = [policy](const LinkContext& c, std::optional<Mechanism> m) {
    if (!m) return 0.0;
    const std::uint32_t n = c.count(*m);
    if (n == 0 && !c.indicator(*m) && policy == EmptySetPolicy::Random) return 1.0;
    if (!c.indicator(*m)) return 0.0;
    if (n == 0) {
      throw std::invalid_argument("likelihood: " + std::string(to_string(*m)) +
                                  " indicator set with no candidates at link " + std::to_string(c.link_index));
    }
    return static_cast<double>(c.pool) / static_cast<double>(n);
  };
  for (const auto& c : contexts) {
    if (c.pool < 1) {
      ++t.n_excluded;
      continue;
    }
    ++t.n_links;
    t.log_random -= std::log(static_cast<double>(c.pool));
    const double a = ratio(c, first);
    const double b = ratio(c, second);
    if (a == 0.0 && b == 0.0) {
      ++t.n_unexplained;
    } else {
      r1.push_back(a);
      r2.push_back(b);
    }
  }
  t.first = Eigen::Map<const Eigen::ArrayXd>(r1.data(), static_cast<Eigen::Index>(r1.size()));
  t.second = Eigen::Map<const Eigen::ArrayXd>(r2.data(), static_cast<Eigen::Index>(r2.size()));
  return t;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

double loglik_single(std::span<const LinkContext> contexts, Mechanism m, double p, EmptySetPolicy policy) {
  check_probability(p, "p");
  return mixture_terms(contexts, m, std::nullopt, policy).loglik(p, 0.0);
}

double loglik_combined(std::span<const LinkContext> contexts, Mechanism shortcut, double p1, double p2,
                       EmptySetPolicy policy) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  if (p1 + p2 > 1.0 + 1e-12) throw std::invalid_argument("p1 + p2 must not exceed 1");
  return mixture_terms(contexts, shortcut, Mechanism::Triadic, policy).loglik(p1, p2);
}

double loglik_random(std::span<const LinkContext> contexts) {
  return mixture_terms(contexts, std::nullopt, std::nullopt).loglik(0.0, 0.0);
}

void GridOptions::validate() const {
  if (!(step > 0.0 && step <= 0.1)) throw std::invalid_argument("grid step must lie in (0, 0.1]");
  if (refine_rounds < 0) throw std::invalid_argument("refine rounds must be non-negative");
}

double FitResult::p_random() const {
  double s = 1.0;
  for (double p : params) s -= p;
  return std::max(0.0, s);
}

std::uint64_t dataset_fingerprint(std::span<const LinkContext> contexts) {
  std::uint64_t h = 0x84222325cbf29ce4ULL;
  auto mix = [&](std::uint64_t v) { h = splitmix64(h ^ v); };
  for (const auto& c : contexts) {
    mix(c.link_index);
    mix((std::uint64_t{c.creator} << 32) | c.target);
    mix(static_cast<std::uint64_t>(c.pool));
    mix((std::uint64_t{c.n_g} << 32) | c.n_o);
    mix((std::uint64_t{c.n_tri} << 32) | c.n_guo);
    mix((c.is_g ? 1u : 0u) | (c.is_o ? 2u : 0u) | (c.is_tri ? 4u : 0u) | (c.is_guo ? 8u : 0u));
  }
  return h;
}

namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  if (out.back() < hi - 1e-12) out.push_back(hi);
  return out;
}

struct GridPoint {
  double p1 = 0.0, p2 = 0.0;
};

std::vector<double> evaluate(const MixtureTerms<double>& t, const std::vector<GridPoint>& points, unsigned threads) {
  std::vector<double> values(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) { values[i] = t.loglik(points[i].p1, points[i].p2); });
  return values;
}

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Scans the grid over the feasible region for `dims` free parameters, then
// repeatedly rescans a tenfold finer grid in one coarse step around the best
// point.
FitResult fit_terms(const MixtureTerms<double>& t, std::size_t dims, const GridOptions& grid) {
  grid.validate();
  if (t.n_links < 2) throw std::invalid_argument("fit: need at least 2 usable contexts");

  auto feasible = [](double p1, double p2) { return p1 + p2 <= 1.0 + 1e-12; };
  std::vector<GridPoint> points;
  const auto coarse = axis(0.0, 1.0, grid.step);
  if (dims == 1) {
    for (double p : coarse) points.push_back({p, 0.0});
  } else {
    for (double p1 : coarse)
      for (double p2 : coarse)
        if (feasible(p1, p2)) points.push_back({p1, std::min(p2, 1.0 - p1)});
  }
  auto values = evaluate(t, points, grid.threads);
  std::size_t best = argmax(values);
  GridPoint at = points[best];
  double value = values[best];

  double step = grid.step;
  for (int round = 0; round < grid.refine_rounds; ++round) {
    const double fine = step / 10.0;
    const auto a1 = axis(std::max(0.0, at.p1 - step), std::min(1.0, at.p1 + step), fine);
    points.clear();
    if (dims == 1) {
      for (double p : a1) points.push_back({p, 0.0});
    } else {
      const auto a2 = axis(std::max(0.0, at.p2 - step), std::min(1.0, at.p2 + step), fine);
      for (double p1 : a1)
        for (double p2 : a2)
          if (feasible(p1, p2)) points.push_back({p1, std::min(p2, 1.0 - p1)});
    }
    values = evaluate(t, points, grid.threads);
    best = argmax(values);
    if (values[best] > value) {
      value = values[best];
      at = points[best];
    }
    step = fine;
  }

  FitResult r;
  r.loglik = value;
  r.grid_resolution = step;
  r.n_links = t.n_links;
  r.n_excluded = t.n_excluded;
  r.params.push_back(at.p1);
  if (dims == 2) r.params.push_back(at.p2);
  const double total = at.p1 + at.p2;
  r.boundary_flag = !std::isfinite(value) || at.p1 < grid.step || total > 1.0 - grid.step ||
                    (dims == 2 && at.p2 < grid.step);
  return r;
}

}  // namespace

FitResult fit_random(std::span<const LinkContext> contexts) {
  const auto t = mixture_terms(contexts, std::nullopt, std::nullopt);
  if (t.n_links < 2) throw std::invalid_argument("fit: need at least 2 usable contexts");
  FitResult r;
  r.spec = StrategySpec::random();
  r.loglik = t.loglik(0.0, 0.0);
  r.n_links = t.n_links;
  r.n_excluded = t.n_excluded;
  r.dataset_id = dataset_fingerprint(contexts);
  return r;
}

FitResult fit_single(std::span<const LinkContext> contexts, Mechanism m, const GridOptions& grid) {
  FitResult r = fit_terms(mixture_terms(contexts, m, std::nullopt, grid.empty_sets), 1, grid);
  r.spec = StrategySpec::single(m);
  r.dataset_id = dataset_fingerprint(contexts);
  return r;
}

FitResult fit_combined(std::span<const LinkContext> contexts, Mechanism shortcut, const GridOptions& grid) {
  const StrategySpec spec = StrategySpec::combined(shortcut);
  spec.validate();
  FitResult r = fit_terms(mixture_terms(contexts, shortcut, Mechanism::Triadic, grid.empty_sets), 2, grid);
  r.spec = spec;
  r.dataset_id = dataset_fingerprint(contexts);
  return r;
}

FitResult fit(std::span<const LinkContext> contexts, const StrategySpec& spec, const GridOptions& grid) {
  spec.validate();
  if (spec.components.empty()) return fit_random(contexts);
  std::optional<Mechanism> second;
  if (spec.components.size() == 2) second = spec.components[1];
  FitResult r = fit_terms(mixture_terms(contexts, spec.components[0], second, grid.empty_sets), spec.components.size(), grid);
  r.spec = spec;
  r.dataset_id = dataset_fingerprint(contexts);
  return r;
}

std::vector<ComparisonRow> model_comparison(std::span<const FitResult> fits) {
  std::vector<ComparisonRow> rows;
  for (const auto& f : fits) {
    if (f.dataset_id != fits.front().dataset_id) {
      throw std::invalid_argument("model_comparison: fits come from different context sets");
    }
    const char* category = f.spec.components.empty() ? "Baseline" : f.spec.components.size() == 1 ? "Single" : "Combined";
    rows.push_back({category, f.spec.name(), f.params, f.loglik});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.loglik > b.loglik; });
  return rows;
}

std::vector<CurvePoint> loglik_curve(std::span<const LinkContext> contexts, Mechanism m, double step,
                                     unsigned threads, EmptySetPolicy policy) {
  const auto t = mixture_terms(contexts, m, std::nullopt, policy);
  std::vector<GridPoint> points;
  for (double p : axis(0.0, 1.0, step)) points.push_back({p, 0.0});
  const auto values = evaluate(t, points, threads);
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) out.push_back({points[i].p1, 0.0, values[i]});
  return out;
}

std::vector<CurvePoint> loglik_surface(std::span<const LinkContext> contexts, Mechanism shortcut, double step,
                                       unsigned threads, EmptySetPolicy policy) {
  const auto t = mixture_terms(contexts, shortcut, Mechanism::Triadic, policy);
  std::vector<GridPoint> points;
  const auto a = axis(0.0, 1.0, step);
  for (double p1 : a)
    for (double p2 : a)
      if (p1 + p2 <= 1.0 + 1e-12) points.push_back({p1, std::min(p2, 1.0 - p1)});
  const auto values = evaluate(t, points, threads);
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) out.push_back({points[i].p1, points[i].p2, values[i]});
  return out;
}

}  // namespace socnet
