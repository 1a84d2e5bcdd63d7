#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "socnet/generator.hpp"
#include "socnet/nullstats.hpp"

using namespace socnet;

namespace {

LinkContext ctx(std::int64_t pool, std::uint32_t n_g, bool is_g, std::uint32_t k = 0) {
  LinkContext c;
  c.pool = pool;
  c.n_g = n_g;
  c.n_guo = n_g;
  c.is_g = is_g;
  c.is_guo = is_g;
  c.k = k;
  return c;
}

std::vector<LinkContext> generated_contexts(std::uint64_t seed, std::size_t events) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.n_events = events;
  return replay(generate(cfg).log, {PoolMode::Users}).contexts;
}

// Bernoulli(p): Var = p(1-p), fourth central moment = p(1-p)^4 + (1-p)p^4.
double fourth_moment(double p) { return p * std::pow(1 - p, 4) + (1 - p) * std::pow(p, 4); }

}  // namespace

TEST(NullModel, ProbabilityFromPoolAndCount) {
  // link 10, k = 3: pool 6 with two grandparent candidates
  LinkContext c = ctx(10 - 3 - 1, 2, false, 3);
  EXPECT_DOUBLE_EQ(null_probability(c, Mechanism::Grandparent), 1.0 / 3.0);
  EXPECT_THROW(null_probability(ctx(0, 0, false), Mechanism::Grandparent), std::domain_error);
  EXPECT_THROW(null_probability(ctx(2, 3, false), Mechanism::Grandparent), std::invalid_argument);
}

TEST(NullModel, ZScoreOfAllHits) {
  std::vector<LinkContext> cs(100, ctx(2, 1, true));
  const auto r = z_score(cs, Mechanism::Grandparent);
  EXPECT_DOUBLE_EQ(r.observed, 100);
  EXPECT_DOUBLE_EQ(r.expected, 50);
  EXPECT_DOUBLE_EQ(r.sigma, 5);
  ASSERT_TRUE(r.z);
  EXPECT_DOUBLE_EQ(*r.z, 10);
  EXPECT_LT(r.p_value, 1e-20);
}

TEST(NullModel, ZUndefinedWithoutVariance) {
  std::vector<LinkContext> cs(5, ctx(4, 0, false));
  const auto r = z_score(cs, Mechanism::Grandparent);
  EXPECT_FALSE(r.z.has_value());
  EXPECT_EQ(r.p_value, 1.0);
  std::vector<LinkContext> unusable(3, ctx(0, 0, false));
  EXPECT_THROW(z_score(unusable, Mechanism::Grandparent), std::invalid_argument);
}

TEST(NullModel, ExcludesEmptyPools) {
  std::vector<LinkContext> cs{ctx(0, 0, false), ctx(4, 1, true), ctx(4, 2, false)};
  const auto r = z_score(cs, Mechanism::Grandparent);
  EXPECT_EQ(r.n_excluded, 1u);
  EXPECT_EQ(r.n_links_used, 2u);
  EXPECT_DOUBLE_EQ(r.expected, 0.25 + 0.5);
}

TEST(NullModel, PermutationInvariant) {
  auto cs = generated_contexts(3, 20000);
  const auto a = z_score(cs, Mechanism::Triadic);
  std::shuffle(cs.begin(), cs.end(), std::mt19937_64(1));
  const auto b = z_score(cs, Mechanism::Triadic);
  EXPECT_NEAR(*a.z, *b.z, 1e-9 * std::fabs(*a.z));
  EXPECT_EQ(a.observed, b.observed);
}

TEST(NullModel, NormalTail) {
  EXPECT_NEAR(normal_two_sided_p(1.959963984540054), 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(normal_two_sided_p(0), 1.0);
}

TEST(Lyapunov, IdenticalHalfProbabilitiesGiveOneOverN) {
  std::vector<LinkContext> cs(100, ctx(2, 1, false));
  const auto l = lyapunov_diagnostic(cs, Mechanism::Grandparent);
  ASSERT_EQ(l.ratio.size(), 100u);
  for (std::size_t i = 0; i < l.n.size(); ++i) EXPECT_NEAR(l.ratio[i], 1.0 / l.n[i], 1e-12);
  EXPECT_NEAR(l.final_value, 0.01, 1e-12);
  EXPECT_TRUE(l.decreasing);
}

TEST(Lyapunov, IncrementalMatchesBatch) {
  const auto cs = generated_contexts(5, 8000);
  const auto l = lyapunov_diagnostic(cs, Mechanism::Shortcut, 7);
  double var = 0, fourth = 0;
  std::size_t n = 0;
  std::size_t next = 0;
  for (const auto& c : cs) {
    if (!usable(c)) continue;
    const double p = null_probability(c, Mechanism::Shortcut);
    var += p * (1 - p);
    fourth += fourth_moment(p);
    ++n;
    if (next < l.n.size() && l.n[next] == n) {
      EXPECT_NEAR(l.ratio[next], fourth / (var * var), 1e-9 * l.ratio[next]);
      ++next;
    }
  }
  EXPECT_EQ(next, l.n.size());
  EXPECT_EQ(l.n.back(), n);
}

TEST(ZByDegree, StrataAddUpToTheGlobalStatistic) {
  const auto cs = generated_contexts(7, 20000);
  for (Mechanism m : {Mechanism::Grandparent, Mechanism::Origin, Mechanism::Triadic}) {
    const auto global = z_score(cs, m);
    const auto strata = z_by_indegree(cs, m, {Binning::Kind::Width, 4}, 1);
    double s = 0, e = 0, var = 0;
    for (const auto& b : strata.bins) {
      s += b.report.observed;
      e += b.report.expected;
      var += b.report.sigma * b.report.sigma;
    }
    EXPECT_NEAR(s, global.observed, 1e-9);
    EXPECT_NEAR(e, global.expected, 1e-6);
    EXPECT_NEAR(var, global.sigma * global.sigma, 1e-6);
  }
}

TEST(ZByDegree, SingleStratumEqualsGlobal) {
  auto cs = generated_contexts(2, 4000);
  for (auto& c : cs) c.k = 0;
  const auto global = z_score(cs, Mechanism::Triadic);
  const auto strata = z_by_indegree(cs, Mechanism::Triadic, {}, 30);
  ASSERT_EQ(strata.bins.size(), 1u);
  EXPECT_DOUBLE_EQ(*strata.bins[0].report.z, *global.z);
}

TEST(ZByDegree, SparseBinsAreNotedAndDropped) {
  std::vector<LinkContext> cs(40, ctx(4, 1, true, 1));
  cs.push_back(ctx(4, 1, true, 9));
  const auto strata = z_by_indegree(cs, Mechanism::Grandparent, {Binning::Kind::Exact}, 30);
  ASSERT_EQ(strata.bins.size(), 1u);
  EXPECT_EQ(strata.bins[0].k_lo, 1u);
  ASSERT_EQ(strata.notes.size(), 1u);
  EXPECT_NE(strata.notes[0].find("[9,9]"), std::string::npos);
}

TEST(Binning, BinsPartitionTheDegrees) {
  for (auto kind : {Binning::Kind::Exact, Binning::Kind::Log, Binning::Kind::Width, Binning::Kind::ExactThenLog}) {
    Binning b{kind, 7, 20, 1.3};
    std::pair<std::uint32_t, std::uint32_t> prev{0, 0};
    for (std::uint32_t k = 0; k < 2000; ++k) {
      const auto bin = b.bin_of(k);
      ASSERT_LE(bin.first, k);
      ASSERT_GE(bin.second, k);
      if (k > 0 && bin != prev) {
        ASSERT_EQ(bin.first, k) << "gap or overlap at k " << k;
        ASSERT_EQ(prev.second, k - 1);
      }
      prev = bin;
    }
  }
}

TEST(RankBias, FavouriteCandidateSitsInTheTopBin) {
  std::vector<LinkContext> cs;
  for (std::uint32_t n = 20; n <= 60; n += 10) {
    LinkContext c = ctx(100, n, true);
    c.rank_pct_g = 100.0 * 1.0 / n;  // rank 1, no ties
    c.rank_ties_g = 1;
    cs.push_back(c);
  }
  const auto rb = rank_bias(cs, Mechanism::Grandparent, 5.0);
  ASSERT_EQ(rb.density.size(), 20u);
  EXPECT_GT(rb.density[0], 0.19);
  for (std::size_t i = 1; i < rb.density.size(); ++i) EXPECT_EQ(rb.density[i], 0.0);
}

TEST(RankBias, EveryRankOnceIsExactlyFlat) {
  std::vector<LinkContext> cs;
  for (std::uint32_t n = 2; n <= 40; ++n) {
    for (std::uint32_t r = 1; r <= n; ++r) {
      LinkContext c = ctx(100, n, true);
      c.rank_pct_g = 100.0 * r / n;
      c.rank_ties_g = 1;
      cs.push_back(c);
    }
  }
  const auto rb = rank_bias(cs, Mechanism::Grandparent, 5.0);
  for (double d : rb.density) EXPECT_NEAR(d, 0.01, 1e-12);
}

TEST(RankBias, DensityIntegratesToOneAndIgnoresUnqualifiedLinks) {
  const auto cs = generated_contexts(11, 30000);
  for (Mechanism m : {Mechanism::Grandparent, Mechanism::Origin}) {
    const auto rb = rank_bias(cs, m, 3.0);
    double mass = 0;
    for (std::size_t i = 0; i < rb.density.size(); ++i)
      mass += rb.density[i] * (std::min(100.0, (i + 1) * 3.0) - i * 3.0);
    EXPECT_NEAR(mass, 1.0, 1e-9);
    std::size_t qualifying = 0;
    for (const auto& c : cs) {
      const auto& pct = m == Mechanism::Grandparent ? c.rank_pct_g : c.rank_pct_o;
      if (!c.indicator(m) || !pct) continue;
      EXPECT_GT(*pct, 0.0);
      EXPECT_LE(*pct, 100.0);
      qualifying += c.count(m) >= 2;
    }
    EXPECT_EQ(rb.n_links, qualifying);
  }
  EXPECT_THROW(rank_bias(cs, Mechanism::Triadic), std::invalid_argument);
  EXPECT_THROW(rank_bias(std::vector<LinkContext>{}, Mechanism::Grandparent), std::invalid_argument);
}
