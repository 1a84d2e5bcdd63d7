#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "socnet/generator.hpp"
#include "socnet/userclasses.hpp"

using namespace socnet;

namespace {

std::vector<UserFit> planted_points(std::uint64_t seed, const std::vector<std::array<double, 2>>& centers,
                                    std::size_t per_class, double sd, std::vector<int>* truth = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<UserFit> fits;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      UserFit f;
      f.user = static_cast<UserId>(fits.size());
      f.n_links = 20;
      f.mix = StrategyMix::from_pair(centers[c][0] + noise(rng), centers[c][1] + noise(rng));
      fits.push_back(f);
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return fits;
}

/// Share of points whose cluster matches the planted class under the best
/// relabelling.
double matched_accuracy(const std::vector<int>& assignment, const std::vector<int>& truth, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += perm[static_cast<std::size_t>(assignment[i])] == truth[i];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

std::vector<LinkContext> creator_links(UserId user, std::size_t n) {
  std::vector<LinkContext> out;
  for (std::size_t i = 0; i < n; ++i) {
    LinkContext c;
    c.creator = user;
    c.pool = 50;
    c.n_tri = 5;
    c.is_tri = i % 2 == 0;
    c.n_guo = 2;
    c.is_guo = i % 5 == 0;
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(UserFits, MinimumLinksThreshold) {
  auto cs = creator_links(1, 19);
  const auto more = creator_links(2, 20);
  cs.insert(cs.end(), more.begin(), more.end());
  const auto r = fit_users(cs);
  ASSERT_EQ(r.fits.size(), 1u);
  EXPECT_EQ(r.fits[0].user, 2u);
  EXPECT_EQ(r.fits[0].n_links, 20u);
  EXPECT_EQ(r.skipped_users, 1u);
  const auto& m = r.fits[0].mix;
  EXPECT_NEAR(m.traffic + m.structure + m.random, 1.0, 1e-12);
}

TEST(UserFits, InvariantToLinkOrder) {
  auto cs = creator_links(3, 40);
  const auto a = fit_users(cs);
  std::shuffle(cs.begin(), cs.end(), std::mt19937_64(3));
  const auto b = fit_users(cs);
  ASSERT_EQ(a.fits.size(), 1u);
  EXPECT_NEAR(a.fits[0].mix.traffic, b.fits[0].mix.traffic, 1e-12);
  EXPECT_NEAR(a.fits[0].mix.structure, b.fits[0].mix.structure, 1e-12);
}

TEST(UserFits, PlantedMixturesAreRecovered) {
  GeneratorConfig cfg;
  cfg.seed = 4;
  cfg.n_events = 400000;
  cfg.target_follows = 60000;
  cfg.seed_users = 100;
  cfg.rates = {0.004, 0.2, 0.3, 0.496};
  cfg.planted = {{StrategyMix::from_pair(0.5, 0.3), 0.5, 1.0}, {StrategyMix::from_pair(0.05, 0.85), 0.5, 1.0}};
  const auto g = generate(cfg);
  const auto r = replay(g.log, {PoolMode::Users});
  UserFitOptions opts;
  opts.min_links = 150;
  opts.grid.empty_sets = EmptySetPolicy::Random;
  opts.grid.threads = 4;
  const auto fits = fit_users(r.contexts, opts);
  ASSERT_GE(fits.fits.size(), 10u);
  // Per-user estimates scatter with a few hundred links each; their class
  // means must sit on the planted mixes and the typical error stay small.
  double sum[2][2] = {};
  std::size_t members[2] = {};
  std::vector<double> errors;
  for (const auto& f : fits.fits) {
    const auto c = g.user_class[f.user];
    const auto& truth = cfg.planted[c].mix;
    sum[c][0] += f.mix.traffic;
    sum[c][1] += f.mix.structure;
    ++members[c];
    errors.push_back(std::max(std::fabs(f.mix.traffic - truth.traffic), std::fabs(f.mix.structure - truth.structure)));
  }
  for (int c = 0; c < 2; ++c) {
    ASSERT_GT(members[c], 5u);
    EXPECT_NEAR(sum[c][0] / members[c], cfg.planted[c].mix.traffic, 0.03);
    EXPECT_NEAR(sum[c][1] / members[c], cfg.planted[c].mix.structure, 0.03);
  }
  std::nth_element(errors.begin(), errors.begin() + errors.size() / 2, errors.end());
  EXPECT_LT(errors[errors.size() / 2], 0.1);
}

TEST(Clustering, IdenticalFitsFormOneClass) {
  std::vector<UserFit> fits(30);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    fits[i].user = static_cast<UserId>(i);
    fits[i].mix = StrategyMix::from_pair(0.2, 0.5);
  }
  const auto c = cluster_users(fits, {.k_max = 4});
  EXPECT_EQ(c.k, 1);
  EXPECT_TRUE(c.degenerate);
  ASSERT_EQ(c.classes.size(), 1u);
  EXPECT_EQ(c.classes[0].members.size(), 30u);
}

TEST(Clustering, PlantedClustersAreFound) {
  std::vector<int> truth;
  const auto fits = planted_points(1, {{0.55, 0.30}, {0.20, 0.60}, {0.20, 0.25}}, 60, 0.05, &truth);
  const auto c = cluster_users(fits);
  ASSERT_EQ(c.k, 3);
  EXPECT_GE(matched_accuracy(c.assignment, truth, 3), 0.9);
  EXPECT_EQ(c.classes[0].label, "class1");
  EXPECT_GT(c.classes[0].center(0), 0.45);  // ordered by p_traffic
}

TEST(Clustering, OneStandardErrorRulePicksTheSmallestCloseK) {
  const auto fits = planted_points(3, {{0.55, 0.30}, {0.20, 0.60}, {0.20, 0.25}}, 60, 0.05);
  ClusterOptions one_se{.k_max = 6, .seed = 4};
  ClusterOptions max_rule = one_se;
  max_rule.k_rule = KRule::MaxMean;
  const auto a = cluster_users(fits, one_se);
  const auto b = cluster_users(fits, max_rule);
  EXPECT_EQ(a.cv_score, b.cv_score);
  ASSERT_EQ(a.cv_se.size(), a.k_values.size());
  const auto best = std::max_element(b.cv_score.begin(), b.cv_score.end()) - b.cv_score.begin();
  EXPECT_EQ(b.k, b.k_values[static_cast<std::size_t>(best)]);
  // Oracle: first k whose score clears best minus its standard error.
  const double bar = a.cv_score[static_cast<std::size_t>(best)] - a.cv_se[static_cast<std::size_t>(best)];
  std::size_t first = 0;
  while (a.cv_score[first] < bar) ++first;
  EXPECT_EQ(a.k, a.k_values[first]);
  EXPECT_LE(a.k, b.k);
  for (double se : a.cv_se) EXPECT_GE(se, 0.0);
  EXPECT_EQ(parse_k_rule("max"), KRule::MaxMean);
  EXPECT_EQ(to_string(parse_k_rule("one-se")), "one-se");
  EXPECT_THROW(parse_k_rule("aic"), std::invalid_argument);
}

TEST(Clustering, EmIsMonotoneAndResponsibilitiesAreConsistent) {
  const auto fits = planted_points(2, {{0.55, 0.30}, {0.20, 0.60}, {0.20, 0.25}}, 50, 0.06);
  const auto c = cluster_users(fits, {.k_min = 2, .k_max = 4});
  ASSERT_GE(c.objective_trace.size(), 2u);
  for (std::size_t i = 1; i < c.objective_trace.size(); ++i)
    EXPECT_GE(c.objective_trace[i], c.objective_trace[i - 1] - 1e-9 * std::fabs(c.objective_trace[i - 1]));
  const auto& resp = c.responsibilities;
  ASSERT_EQ(resp.rows(), static_cast<Eigen::Index>(fits.size()));
  for (Eigen::Index i = 0; i < resp.rows(); ++i) EXPECT_NEAR(resp.row(i).sum(), 1.0, 1e-9);
  for (std::size_t k = 0; k < c.classes.size(); ++k)
    EXPECT_NEAR(c.classes[k].weight, resp.col(static_cast<Eigen::Index>(k)).mean(), 1e-12);
  std::size_t members = 0;
  for (const auto& cls : c.classes) members += cls.members.size();
  EXPECT_EQ(members, fits.size());
}

TEST(Clustering, DeterministicAndThreadIndependent) {
  const auto fits = planted_points(5, {{0.5, 0.3}, {0.1, 0.8}}, 40, 0.05);
  ClusterOptions one{.k_max = 4, .seed = 9};
  ClusterOptions four = one;
  four.threads = 4;
  const auto a = cluster_users(fits, one);
  const auto b = cluster_users(fits, one);
  const auto c = cluster_users(fits, four);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.cv_score, b.cv_score);
  EXPECT_EQ(a.cv_score, c.cv_score);
  EXPECT_EQ(a.assignment, c.assignment);
}

TEST(Clustering, RejectsTooFewFits) {
  EXPECT_THROW(cluster_users(planted_points(1, {{0.2, 0.2}}, 9, 0.01)), std::invalid_argument);
  EXPECT_THROW(cluster_users(planted_points(1, {{0.2, 0.2}}, 20, 0.01), {.k_min = 3, .k_max = 2}),
               std::invalid_argument);
}

TEST(Clustering, FiveClassesGetReferenceNames) {
  std::vector<UserClass> classes(5);
  const std::array<std::pair<double, double>, 5> centers{{{0.09, 0.32}, {0.52, 0.36}, {0.0, 0.96}, {0.07, 0.63}, {0.01, 0.8}}};
  for (std::size_t i = 0; i < 5; ++i) classes[i].mean_mix = StrategyMix::from_pair(centers[i].first, centers[i].second);
  label_classes(classes);
  EXPECT_EQ(classes[0].label, "Rand");
  EXPECT_EQ(classes[1].label, "Info");
  EXPECT_EQ(classes[2].label, "Friend");
  EXPECT_EQ(classes[3].label, "Mix");
  EXPECT_EQ(classes[4].label, "CFrd");
}

TEST(Profiles, SingleMemberClassAndLifetime) {
  const auto log = EventLog::from_events({Event::join(0, 0), Event::join(1, 1), Event::join(2, 2),
                                          Event::follow(3, 1, 0), Event::post(4, 0, 0), Event::repost(5, 1, 0, 0)});
  const auto r = replay(log);
  const auto f0 = user_features(r.state, 0);
  ASSERT_EQ(f0.size(), profile_feature_names().size());
  EXPECT_EQ(f0[0], 2.0);  // lifetime of the first user = U - 1
  EXPECT_EQ(f0[1], 0.0);  // in-degree
  EXPECT_EQ(f0[3], 1.0);  // times reposted
  EXPECT_EQ(f0[4], 1.0);  // posts
  EXPECT_EQ(f0[5], 1.0);  // post ratio
  const auto f1 = user_features(r.state, 1);
  EXPECT_EQ(f1[1], 1.0);
  EXPECT_EQ(f1[2], 1.0);
  EXPECT_EQ(f1[5], 0.0);

  UserClass only;
  only.label = "solo";
  only.members = {1};
  const auto profiles = class_profiles({only}, r.state);
  ASSERT_EQ(profiles.size(), 1u);
  EXPECT_TRUE(profiles[0].low_confidence);
  EXPECT_EQ(profiles[0].members, 1u);
  for (const auto& feat : profiles[0].features) {
    EXPECT_EQ(feat.stats.n, 1u);
    EXPECT_EQ(feat.stats.q1, feat.stats.q3);
  }
}

TEST(Profiles, ActiveClassPostsMore) {
  GeneratorConfig cfg;
  cfg.seed = 8;
  cfg.n_events = 60000;
  cfg.planted = {{StrategyMix::from_pair(0.5, 0.3), 0.3, 4.0}, {StrategyMix::from_pair(0.0, 0.9), 0.7, 1.0}};
  const auto g = generate(cfg);
  const auto r = replay(g.log);
  std::vector<UserClass> classes(2);
  for (UserId u = 0; u < g.user_class.size(); ++u) classes[g.user_class[u]].members.push_back(u);
  const auto profiles = class_profiles(classes, r.state);
  auto mean_of = [](const ClassProfile& p, const std::string& name) {
    for (const auto& f : p.features)
      if (f.feature == name) return f.stats.mean;
    return -1.0;
  };
  EXPECT_GT(mean_of(profiles[0], "posts"), 2.0 * mean_of(profiles[1], "posts"));
  EXPECT_GT(mean_of(profiles[0], "times_reposted"), mean_of(profiles[1], "times_reposted"));
}
