#include "socnet/userclasses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "socnet/gmm.hpp"
#include "socnet/parallel.hpp"
#include "socnet/rng.hpp"

namespace socnet {

std::string_view to_string(KRule r) { return r == KRule::MaxMean ? "max" : "one-se"; }

KRule parse_k_rule(std::string_view s) {
  if (s == "max") return KRule::MaxMean;
  if (s == "one-se") return KRule::OneSE;
  throw std::invalid_argument("unknown k rule '" + std::string(s) + "'");
}

UserFits fit_users(std::span<const LinkContext> contexts, const UserFitOptions& options) {
  std::map<UserId, std::vector<LinkContext>> by_user;
  for (const auto& c : contexts) by_user[c.creator].push_back(c);

  UserFits out;
  std::vector<const std::vector<LinkContext>*> eligible;
  std::vector<UserId> ids;
  for (const auto& [user, links] : by_user) {
    if (links.size() < options.min_links) {
      ++out.skipped_users;
      continue;
    }
    ids.push_back(user);
    eligible.push_back(&links);
  }

  GridOptions grid = options.grid;
  const unsigned threads = grid.threads;
  grid.threads = 1;
  out.fits.resize(eligible.size());
  parallel_for(eligible.size(), threads, [&](std::size_t i) {
    const FitResult r = fit_combined(*eligible[i], options.shortcut, grid);
    out.fits[i] = {ids[i], eligible[i]->size(), StrategyMix::from_pair(r.params[0], r.params[1]), r.loglik};
    out.fits[i].mix.random = r.p_random();
  });
  return out;
}

namespace {

using Points = gmm::Points<double>;

Points to_points(std::span<const UserFit> fits, const std::vector<std::size_t>& rows) {
  Points x(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x(static_cast<Eigen::Index>(i), 0) = fits[rows[i]].mix.traffic;
    x(static_cast<Eigen::Index>(i), 1) = fits[rows[i]].mix.structure;
  }
  return x;
}

gmm::MixtureFit<double> best_of(const Points& x, int k, int restarts, std::uint64_t seed, const gmm::EmOptions& em) {
  gmm::MixtureFit<double> best;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, "em-restart", static_cast<std::uint64_t>(r)));
    auto fit = gmm::em_fit(x, k, rng, em);
    if (!have || fit.objective > best.objective) {
      best = std::move(fit);
      have = true;
    }
  }
  return best;
}

}  // namespace

Clustering cluster_users(std::span<const UserFit> fits, const ClusterOptions& options) {
  if (fits.size() < 10) throw std::invalid_argument("cluster_users: need at least 10 user fits");
  if (options.k_min < 1 || options.k_max < options.k_min) throw std::invalid_argument("cluster_users: bad k range");
  if (options.folds < 2) throw std::invalid_argument("cluster_users: need at least 2 folds");

  const gmm::EmOptions em{options.ridge, options.max_iter, 1e-10};
  const std::size_t n = fits.size();

  // Deterministic fold assignment from a seeded shuffle.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng fold_rng(derive_seed(options.seed, "cv-folds"));
  std::shuffle(order.begin(), order.end(), fold_rng);
  std::vector<int> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(options.folds));

  Clustering out;
  for (int k = options.k_min; k <= options.k_max; ++k) out.k_values.push_back(k);
  out.cv_score.assign(out.k_values.size(), 0.0);

  const std::size_t jobs = out.k_values.size() * static_cast<std::size_t>(options.folds);
  std::vector<double> held_out(jobs, 0.0);
  std::vector<std::size_t> held_n(jobs, 0);
  parallel_for(jobs, options.threads, [&](std::size_t job) {
    const int k = out.k_values[job / static_cast<std::size_t>(options.folds)];
    const int fold = static_cast<int>(job % static_cast<std::size_t>(options.folds));
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (fold_of[i] == fold ? test : train).push_back(i);
    if (test.empty()) return;
    if (train.size() < static_cast<std::size_t>(k)) {
      held_out[job] = -std::numeric_limits<double>::infinity();
      held_n[job] = test.size();
      return;
    }
    Rng rng(derive_seed(options.seed, "cv-em", job));
    const auto model = gmm::em_fit(to_points(fits, train), k, rng, em);
    held_out[job] = gmm::loglik(model.components, to_points(fits, test));
    held_n[job] = test.size();
  });
  out.cv_se.assign(out.k_values.size(), 0.0);
  for (std::size_t ki = 0; ki < out.k_values.size(); ++ki) {
    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> per_fold;
    for (int f = 0; f < options.folds; ++f) {
      const std::size_t job = ki * static_cast<std::size_t>(options.folds) + static_cast<std::size_t>(f);
      total += held_out[job];
      count += held_n[job];
      if (held_n[job] > 0) per_fold.push_back(held_out[job] / static_cast<double>(held_n[job]));
    }
    out.cv_score[ki] = total / static_cast<double>(std::max<std::size_t>(1, count));
    if (per_fold.size() > 1) {
      const double mean = std::accumulate(per_fold.begin(), per_fold.end(), 0.0) / static_cast<double>(per_fold.size());
      double ss = 0.0;
      for (double v : per_fold) ss += (v - mean) * (v - mean);
      const double m = static_cast<double>(per_fold.size());
      out.cv_se[ki] = std::sqrt(ss / (m - 1.0) / m);
    }
  }
  auto best = static_cast<std::size_t>(std::max_element(out.cv_score.begin(), out.cv_score.end()) - out.cv_score.begin());
  if (options.k_rule == KRule::OneSE && std::isfinite(out.cv_se[best])) {
    const double bar = out.cv_score[best] - out.cv_se[best];
    for (std::size_t ki = 0; ki < best; ++ki) {
      if (out.cv_score[ki] >= bar) {
        best = ki;
        break;
      }
    }
  }
  const int k = out.k_values[best];

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const Points x = to_points(fits, all);
  const auto model = best_of(x, k, std::max(1, options.restarts), derive_seed(options.seed, "final"), em);
  out.k = static_cast<int>(model.components.size());
  out.objective_trace = model.trace;
  out.degenerate = model.degenerate;

  // Order classes by decreasing center p_traffic, then p_structure.
  std::vector<std::size_t> perm(model.components.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = model.components[a].mean;
    const auto& mb = model.components[b].mean;
    if (ma(0) != mb(0)) return ma(0) > mb(0);
    return ma(1) > mb(1);
  });
  out.responsibilities.resize(model.resp.rows(), model.resp.cols());
  for (std::size_t c = 0; c < perm.size(); ++c) out.responsibilities.col(static_cast<Eigen::Index>(c)) = model.resp.col(static_cast<Eigen::Index>(perm[c]));

  out.classes.resize(perm.size());
  for (std::size_t c = 0; c < perm.size(); ++c) {
    const auto& comp = model.components[perm[c]];
    out.classes[c].center = comp.mean;
    out.classes[c].covariance = comp.cov;
    out.classes[c].weight = out.responsibilities.col(static_cast<Eigen::Index>(c)).mean();
  }
  out.assignment.resize(n);
  std::vector<std::array<double, 3>> sums(perm.size(), {0, 0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    out.responsibilities.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    out.assignment[i] = static_cast<int>(arg);
    auto& cls = out.classes[static_cast<std::size_t>(arg)];
    cls.members.push_back(fits[i].user);
    sums[static_cast<std::size_t>(arg)][0] += fits[i].mix.traffic;
    sums[static_cast<std::size_t>(arg)][1] += fits[i].mix.structure;
    sums[static_cast<std::size_t>(arg)][2] += fits[i].mix.random;
  }
  for (std::size_t c = 0; c < out.classes.size(); ++c) {
    auto& cls = out.classes[c];
    if (cls.members.empty()) {
      cls.mean_mix = StrategyMix::from_pair(cls.center(0), cls.center(1));
    } else {
      const double m = static_cast<double>(cls.members.size());
      cls.mean_mix = {sums[c][0] / m, sums[c][1] / m, sums[c][2] / m};
    }
  }
  label_classes(out.classes);
  return out;
}

void label_classes(std::vector<UserClass>& classes) {
  if (classes.size() != 5) {
    for (std::size_t c = 0; c < classes.size(); ++c) classes[c].label = "class" + std::to_string(c + 1);
    return;
  }
  struct Reference {
    const char* name;
    double traffic, structure;
  };
  static constexpr std::array<Reference, 5> refs{{
      {"Info", 0.52, 0.36},
      {"Friend", 0.00, 0.96},
      {"CFrd", 0.01, 0.80},
      {"Mix", 0.07, 0.63},
      {"Rand", 0.09, 0.32},
  }};
  std::array<int, 5> perm{0, 1, 2, 3, 4};
  std::array<int, 5> best = perm;
  double best_cost = std::numeric_limits<double>::max();
  do {
    double cost = 0.0;
    for (std::size_t c = 0; c < 5; ++c) {
      const auto& r = refs[static_cast<std::size_t>(perm[c])];
      const double dt = classes[c].mean_mix.traffic - r.traffic;
      const double ds = classes[c].mean_mix.structure - r.structure;
      cost += dt * dt + ds * ds;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t c = 0; c < 5; ++c) classes[c].label = refs[static_cast<std::size_t>(best[c])].name;
}

std::vector<std::string> profile_feature_names() {
  return {"lifetime", "in_degree", "in_degree_ratio", "times_reposted", "posts", "post_ratio"};
}

std::vector<double> user_features(const NetworkState& state, UserId u) {
  const UserActivity& a = state.activity(u);
  const double k = state.in_degree(u);
  const double k_out = state.out_degree(u);
  const double lifetime = static_cast<double>(state.user_count()) - 1.0 - static_cast<double>(a.join_order);
  const double posts = static_cast<double>(a.posts);
  const double reposts = static_cast<double>(a.reposts);
  return {lifetime,
          k,
          k + k_out > 0 ? k / (k + k_out) : 0.0,
          static_cast<double>(a.times_reposted),
          posts,
          posts + reposts > 0 ? posts / (posts + reposts) : 0.0};
}

std::vector<ClassProfile> class_profiles(const std::vector<UserClass>& classes, const NetworkState& state) {
  const auto names = profile_feature_names();
  std::vector<ClassProfile> out;
  for (const auto& cls : classes) {
    ClassProfile p;
    p.label = cls.label;
    p.members = cls.members.size();
    p.low_confidence = cls.members.size() < 2;
    std::vector<std::vector<double>> columns(names.size());
    for (UserId u : cls.members) {
      if (u >= state.id_capacity()) throw std::invalid_argument("class_profiles: user not in network state");
      const auto f = user_features(state, u);
      for (std::size_t j = 0; j < f.size(); ++j) columns[j].push_back(f[j]);
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
      auto stats = box_stats(columns[j]);
      p.features.push_back({names[j], stats.value_or(BoxStats{})});
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace socnet
