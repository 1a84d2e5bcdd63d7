#include "socnet/nullstats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace socnet {

double null_probability(const LinkContext& ctx, Mechanism m) {
  if (ctx.pool < 1) throw std::domain_error("null_probability: empty candidate pool");
  const std::uint32_t n = ctx.count(m);
  if (static_cast<std::int64_t>(n) > ctx.pool) {
    throw std::invalid_argument("null_probability: " + std::string(to_string(m)) + " candidates (" +
                                std::to_string(n) + ") exceed pool (" + std::to_string(ctx.pool) + ") at link " +
                                std::to_string(ctx.link_index));
  }
  return static_cast<double>(n) / static_cast<double>(ctx.pool);
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

namespace {

ZReport accumulate(std::span<const LinkContext> contexts, Mechanism m, bool require_usable) {
  ZReport r;
  r.mechanism = m;
  double variance = 0.0;
  for (const auto& c : contexts) {
    if (!usable(c)) {
      ++r.n_excluded;
      continue;
    }
    const double p = null_probability(c, m);
    r.expected += p;
    variance += p * (1.0 - p);
    if (c.indicator(m)) r.observed += 1.0;
    ++r.n_links_used;
  }
  if (require_usable && r.n_links_used == 0) throw std::invalid_argument("z_score: no usable contexts");
  r.sigma = std::sqrt(variance);
  if (r.sigma > 0) {
    r.z = (r.observed - r.expected) / r.sigma;
    r.p_value = normal_two_sided_p(*r.z);
  }
  return r;
}

}  // namespace

ZReport z_score(std::span<const LinkContext> contexts, Mechanism m) { return accumulate(contexts, m, true); }

LyapunovCurve lyapunov_diagnostic(std::span<const LinkContext> contexts, Mechanism m, std::size_t stride) {
  stride = std::max<std::size_t>(1, stride);
  std::vector<double> probs;
  for (const auto& c : contexts)
    if (usable(c)) probs.push_back(null_probability(c, m));
  if (probs.size() < 2) throw std::invalid_argument("lyapunov_diagnostic: need at least 2 usable contexts");

  LyapunovCurve out;
  double var = 0.0, fourth = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    var += p * (1.0 - p);
    fourth += p * (1.0 - p) * (1.0 - 3.0 * p + 3.0 * p * p);
    const std::size_t n = i + 1;
    if (var <= 0) continue;
    if (n % stride == 0 || n == probs.size()) {
      out.n.push_back(n);
      out.ratio.push_back(fourth / (var * var));
    }
  }
  if (out.ratio.empty()) return out;
  out.final_value = out.ratio.back();
  const std::size_t half = out.ratio.size() / 2;
  out.tail_max = *std::max_element(out.ratio.begin() + static_cast<std::ptrdiff_t>(half), out.ratio.end());
  out.decreasing = out.final_value < out.ratio[out.ratio.size() / 4];
  return out;
}

std::pair<std::uint32_t, std::uint32_t> Binning::bin_of(std::uint32_t k) const {
  switch (kind) {
    case Kind::Exact: return {k, k};
    case Kind::Width: {
      const std::uint32_t w = std::max<std::uint32_t>(1, width);
      const std::uint32_t lo = k / w * w;
      return {lo, lo + w - 1};
    }
    case Kind::Log:
    case Kind::ExactThenLog: {
      const std::uint32_t start = kind == Kind::Log ? 1 : exact_limit;
      if (k < start) return {k, k};
      // Edges start, ceil(start*f), ... ; each bin [edge_i, edge_{i+1} - 1].
      std::uint32_t lo = start;
      while (true) {
        auto hi = static_cast<std::uint32_t>(std::ceil(lo * log_factor));
        if (hi <= lo) hi = lo + 1;
        if (k < hi) return {lo, hi - 1};
        lo = hi;
      }
    }
  }
  return {k, k};
}

ZByDegree z_by_indegree(std::span<const LinkContext> contexts, Mechanism m, const Binning& binning,
                        std::size_t min_count) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<LinkContext>> groups;
  for (const auto& c : contexts) groups[binning.bin_of(c.k)].push_back(c);
  ZByDegree out;
  for (const auto& [range, members] : groups) {
    ZReport r = accumulate(members, m, false);
    if (r.n_links_used < std::max<std::size_t>(1, min_count)) {
      out.notes.push_back("k in [" + std::to_string(range.first) + "," + std::to_string(range.second) + "]: " +
                          std::to_string(r.n_links_used) + " usable links, below " + std::to_string(min_count));
      continue;
    }
    out.bins.push_back({range.first, range.second, r});
  }
  return out;
}

RankBias rank_bias(std::span<const LinkContext> contexts, Mechanism m, double bin_width) {
  if (m != Mechanism::Grandparent && m != Mechanism::Origin) {
    throw std::invalid_argument("rank_bias: mechanism must be G or O");
  }
  if (!(bin_width > 0 && bin_width <= 100)) throw std::invalid_argument("rank_bias: bin width must be in (0,100]");
  RankBias out;
  out.mechanism = m;
  out.bin_width = bin_width;
  const auto n_bins = static_cast<std::size_t>(std::ceil(100.0 / bin_width - 1e-9));
  std::vector<double> mass(n_bins, 0.0);

  for (const auto& c : contexts) {
    const bool g = m == Mechanism::Grandparent;
    const auto& pct = g ? c.rank_pct_g : c.rank_pct_o;
    const std::uint32_t n = g ? c.n_g : c.n_o;
    const std::uint32_t ties = g ? c.rank_ties_g : c.rank_ties_o;
    if (!c.indicator(m) || !pct || n < 2 || ties == 0) continue;
    // The tie group occupies ranks [a, b]; mid-rank = (a + b) / 2.
    const double mid = *pct * n / 100.0;
    const double a = mid - (ties - 1) / 2.0;
    const double b = mid + (ties - 1) / 2.0;
    const double lo = 100.0 * (a - 1.0) / n;
    const double hi = 100.0 * b / n;
    const double len = hi - lo;
    for (std::size_t i = 0; i < n_bins; ++i) {
      const double bl = i * bin_width;
      const double bh = std::min(100.0, (i + 1) * bin_width);
      const double overlap = std::min(hi, bh) - std::max(lo, bl);
      if (overlap > 0) mass[i] += overlap / len;
    }
    ++out.n_links;
  }
  if (out.n_links == 0) throw std::invalid_argument("rank_bias: no qualifying contexts");
  out.density.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    const double width = std::min(100.0, (i + 1) * bin_width) - i * bin_width;
    out.density[i] = mass[i] / (static_cast<double>(out.n_links) * width);
  }
  return out;
}

}  // namespace socnet
