#include "socnet/netstate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace socnet {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Grandparent: return "G";
    case Mechanism::Origin: return "O";
    case Mechanism::Shortcut: return "GuO";
    case Mechanism::Triadic: return "tri";
  }
  return "?";
}

Mechanism parse_mechanism(std::string_view s) {
  if (s == "G" || s == "g") return Mechanism::Grandparent;
  if (s == "O" || s == "o") return Mechanism::Origin;
  if (s == "GuO" || s == "guo") return Mechanism::Shortcut;
  if (s == "tri" || s == "triadic" || s == "delta") return Mechanism::Triadic;
  throw std::invalid_argument("unknown mechanism '" + std::string(s) + "'");
}

std::uint32_t LinkContext::count(Mechanism m) const {
  switch (m) {
    case Mechanism::Grandparent: return n_g;
    case Mechanism::Origin: return n_o;
    case Mechanism::Shortcut: return n_guo;
    case Mechanism::Triadic: return n_tri;
  }
  return 0;
}

bool LinkContext::indicator(Mechanism m) const {
  switch (m) {
    case Mechanism::Grandparent: return is_g;
    case Mechanism::Origin: return is_o;
    case Mechanism::Shortcut: return is_guo;
    case Mechanism::Triadic: return is_tri;
  }
  return false;
}

std::uint32_t SeenCounts::role(Mechanism m) const {
  switch (m) {
    case Mechanism::Grandparent: return grandparent;
    case Mechanism::Origin: return origin;
    case Mechanism::Shortcut: return grandparent + origin;
    case Mechanism::Triadic: return 0;
  }
  return 0;
}

namespace {

constexpr std::uint32_t kSeenCap = std::numeric_limits<std::uint32_t>::max();

void saturating_inc(std::uint32_t& v) {
  if (v < kSeenCap) ++v;
}

std::uint64_t edge_key(UserId source, UserId sink) {
  return (static_cast<std::uint64_t>(source) << 32) | sink;
}

}  // namespace

NetworkState::NetworkState(ReplayOptions options) : options_(options) {}

bool NetworkState::follows(UserId follower, UserId followee) const {
  return edge_index_.count(edge_key(followee, follower)) != 0;
}

const Edge* NetworkState::find_edge(UserId source, UserId sink) const {
  auto it = edge_index_.find(edge_key(source, sink));
  return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

SeenCounts NetworkState::seen(UserId viewer, UserId source) const {
  if (viewer >= seen_.size()) return {};
  auto it = seen_[viewer].find(source);
  return it == seen_[viewer].end() ? SeenCounts{} : it->second;
}

bool NetworkState::holds(UserId u, MessageId m) const {
  return m < messages_.size() && messages_[m].parent.count(u) != 0;
}

std::optional<UserId> NetworkState::cascade_parent(MessageId m, UserId holder) const {
  if (m >= messages_.size()) return std::nullopt;
  auto it = messages_[m].parent.find(holder);
  if (it == messages_[m].parent.end() || it->second == holder) return std::nullopt;
  return it->second;
}

bool NetworkState::excluded(UserId viewer, UserId c) const {
  return c == viewer || (!options_.include_followed_candidates && follows(viewer, c));
}

void NetworkState::bump(UserId viewer, UserId source, Mechanism role) {
  SeenCounts& sc = seen_[viewer][source];
  const bool had_g = sc.grandparent > 0;
  const bool had_o = sc.origin > 0;
  if (role == Mechanism::Grandparent) saturating_inc(sc.grandparent);
  if (role == Mechanism::Origin) saturating_inc(sc.origin);
  if (excluded(viewer, source)) return;
  ViewerCounts& vc = counts_[viewer];
  if (!had_g && sc.grandparent > 0) ++vc.g;
  if (!had_o && sc.origin > 0) ++vc.o;
  if (!had_g && !had_o && (sc.grandparent > 0 || sc.origin > 0)) ++vc.guo;
}

void NetworkState::deliver(UserId sender, MessageId m, std::optional<UserId> sender_parent) {
  const UserId origin = messages_[m].origin;
  for (std::uint32_t idx : follower_edges_[sender]) {
    Edge& edge = edges_[idx];
    const UserId viewer = edge.sink;
    ++edge.w_seen;
    ++seen_total_;

    // Distinct users appearing in this delivery, for the `any` tally.
    UserId involved[3];
    int n_involved = 0;
    auto note = [&](UserId u) {
      if (u == viewer) return;
      for (int i = 0; i < n_involved; ++i)
        if (involved[i] == u) return;
      involved[n_involved++] = u;
    };

    note(sender);
    if (sender != viewer) saturating_inc(seen_[viewer][sender].direct);
    if (sender_parent) {
      note(*sender_parent);
      if (*sender_parent != viewer) bump(viewer, *sender_parent, Mechanism::Grandparent);
    }
    if (origin != sender) {
      note(origin);
      if (origin != viewer) bump(viewer, origin, Mechanism::Origin);
    }
    for (int i = 0; i < n_involved; ++i) saturating_inc(seen_[viewer][involved[i]].any);

    if (options_.feed_window > 0) {
      auto& feed = feeds_[viewer];
      feed.push_back({m, sender});
      if (feed.size() > options_.feed_window) feed.pop_front();
    }
  }
}

void NetworkState::apply(const Event& e) {
  ++events_;
  last_time_ = e.time;
  switch (e.kind) {
    case EventKind::Join: {
      const std::size_t need = std::size_t{e.user} + 1;
      if (followees_.size() < need) {
        followees_.resize(need);
        followers_.resize(need);
        follower_edges_.resize(need);
        seen_.resize(need);
        counts_.resize(need);
        feeds_.resize(need);
        activity_.resize(need);
      }
      UserActivity& a = activity_[e.user];
      a.join_seq = e.seq;
      a.join_order = static_cast<std::uint32_t>(joined_++);
      break;
    }
    case EventKind::Post: {
      if (messages_.size() <= e.message) messages_.resize(std::size_t{e.message} + 1);
      MessageInfo& info = messages_[e.message];
      info.origin = e.user;
      info.parent[e.user] = e.user;
      ++posts_;
      ++activity_[e.user].posts;
      deliver(e.user, e.message, std::nullopt);
      break;
    }
    case EventKind::Repost: {
      MessageInfo& info = messages_[e.message];
      info.parent[e.user] = e.other;
      ++reposts_;
      ++activity_[e.user].reposts;
      ++activity_[info.origin].times_reposted;
      auto it = edge_index_.find(edge_key(e.other, e.user));
      if (it != edge_index_.end()) ++edges_[it->second].w_repost;
      deliver(e.user, e.message, e.other);
      break;
    }
    case EventKind::Follow: {
      const UserId creator = e.user;
      const UserId target = e.other;
      if (!options_.include_followed_candidates) {
        auto it = seen_[creator].find(target);
        if (it != seen_[creator].end()) {
          ViewerCounts& vc = counts_[creator];
          const bool g = it->second.grandparent > 0;
          const bool o = it->second.origin > 0;
          if (g) --vc.g;
          if (o) --vc.o;
          if (g || o) --vc.guo;
        }
      }
      const auto idx = static_cast<std::uint32_t>(edges_.size());
      edges_.push_back({target, creator, e.seq, e.time, 0, 0});
      edge_index_.emplace(edge_key(target, creator), idx);
      followees_[creator].push_back(target);
      followers_[target].push_back(creator);
      follower_edges_[target].push_back(idx);
      break;
    }
  }
}

std::uint32_t NetworkState::candidate_count(UserId viewer, Mechanism m) const {
  switch (m) {
    case Mechanism::Grandparent: return counts_[viewer].g;
    case Mechanism::Origin: return counts_[viewer].o;
    case Mechanism::Shortcut: return counts_[viewer].guo;
    case Mechanism::Triadic: return triadic_count(viewer);
  }
  return 0;
}

namespace {

// Marks the viewer's two-hop neighbourhood. mark: 0 untouched, 1 excluded,
// 2 triadic candidate.
template <typename Visit>
void two_hop(const std::vector<std::vector<UserId>>& followees, UserId viewer, bool keep_followed,
             std::vector<char>& mark, Visit&& visit) {
  mark[viewer] = 1;
  if (!keep_followed)
    for (UserId b : followees[viewer]) mark[b] = 1;
  for (UserId b : followees[viewer]) {
    for (UserId c : followees[b]) {
      if (mark[c] != 0) continue;
      mark[c] = 2;
      visit(c);
    }
  }
}

}  // namespace

std::uint32_t NetworkState::triadic_count(UserId viewer) const {
  std::vector<char> mark(followees_.size(), 0);
  std::uint32_t n = 0;
  two_hop(followees_, viewer, options_.include_followed_candidates, mark, [&](UserId) { ++n; });
  return n;
}

std::vector<Candidate> NetworkState::candidates(UserId viewer, Mechanism m) const {
  std::vector<Candidate> out;
  if (m == Mechanism::Triadic) {
    std::vector<char> mark(followees_.size(), 0);
    two_hop(followees_, viewer, options_.include_followed_candidates, mark,
            [&](UserId c) { out.push_back({c, 0}); });
  } else {
    for (const auto& [user, sc] : seen_[viewer]) {
      const std::uint32_t w = sc.role(m);
      if (w > 0 && !excluded(viewer, user)) out.push_back({user, w});
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.user < b.user; });
  return out;
}

void NetworkState::rank_target(UserId viewer, UserId target, Mechanism m, std::optional<double>& pct,
                               std::uint32_t& ties) const {
  const std::uint32_t mine = seen(viewer, target).role(m);
  std::uint32_t greater = 0, equal = 0, total = 0;
  for (const auto& [user, sc] : seen_[viewer]) {
    const std::uint32_t w = sc.role(m);
    if (w == 0 || excluded(viewer, user)) continue;
    ++total;
    if (w > mine) ++greater;
    else if (w == mine) ++equal;
  }
  if (total == 0 || equal == 0) return;
  const double mid_rank = greater + (equal + 1) / 2.0;
  pct = 100.0 * mid_rank / total;
  ties = equal;
}

LinkContext NetworkState::context_for(UserId creator, UserId target, std::uint64_t seq, double time) const {
  LinkContext ctx;
  ctx.link_index = follow_count() + 1;
  ctx.creator = creator;
  ctx.target = target;
  ctx.k = in_degree(creator);
  ctx.seq = seq;
  ctx.time = time;
  const auto k = static_cast<std::int64_t>(ctx.k);
  ctx.pool = options_.pool == PoolMode::Paper ? static_cast<std::int64_t>(ctx.link_index) - k - 1
                                              : static_cast<std::int64_t>(user_count()) - k - 1;
  ctx.n_g = counts_[creator].g;
  ctx.n_o = counts_[creator].o;
  ctx.n_guo = counts_[creator].guo;

  std::vector<char> mark(followees_.size(), 0);
  two_hop(followees_, creator, options_.include_followed_candidates, mark, [&](UserId) { ++ctx.n_tri; });
  const bool target_excluded = excluded(creator, target);
  ctx.is_tri = target < mark.size() && mark[target] == 2;

  const SeenCounts sc = seen(creator, target);
  ctx.seen_from_target = sc.any;
  ctx.is_g = !target_excluded && sc.grandparent > 0;
  ctx.is_o = !target_excluded && sc.origin > 0;
  ctx.is_guo = ctx.is_g || ctx.is_o;
  if (ctx.is_g) rank_target(creator, target, Mechanism::Grandparent, ctx.rank_pct_g, ctx.rank_ties_g);
  if (ctx.is_o) rank_target(creator, target, Mechanism::Origin, ctx.rank_pct_o, ctx.rank_ties_o);
  return ctx;
}

ReplayResult replay(const EventLog& log, const ReplayOptions& options) {
  auto violations = validate_log(log);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw LogError(v.code, v.line, "seq " + std::to_string(v.seq) + (v.detail.empty() ? "" : ": " + v.detail));
  }
  ReplayResult out{NetworkState(options), {}};
  for (const Event& e : log.events) {
    if (e.kind == EventKind::Follow) out.contexts.push_back(out.state.context_for(e.user, e.other, e.seq, e.time));
    out.state.apply(e);
  }
  return out;
}

// ---------------------------------------------------------------------------

MechanismOverlap mechanism_overlap(std::span<const LinkContext> contexts) {
  if (contexts.empty()) throw std::invalid_argument("mechanism_overlap: no contexts");
  MechanismOverlap out;
  out.n_links = contexts.size();
  std::array<std::size_t, 8> counts{};
  for (const auto& c : contexts) {
    const int idx = (c.is_g ? 1 : 0) | (c.is_o ? 2 : 0) | (c.is_tri ? 4 : 0);
    ++counts[idx];
  }
  const double n = static_cast<double>(contexts.size());
  for (int i = 0; i < 8; ++i) out.pattern[i] = counts[i] / n;
  for (int i = 0; i < 8; ++i) {
    if (i & 1) out.grandparent += out.pattern[i];
    if (i & 2) out.origin += out.pattern[i];
    if (i & 4) out.triadic += out.pattern[i];
    if (i & 3) out.shortcut += out.pattern[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<DegreeBin> bin_degrees(const std::map<std::uint32_t, std::uint64_t>& hist, bool log_bins) {
  std::vector<DegreeBin> out;
  if (!log_bins) {
    for (const auto& [d, n] : hist) out.push_back({d, d, n});
    return out;
  }
  for (const auto& [d, n] : hist) {
    std::uint32_t lo = 1;
    while (lo * 2 <= d) lo *= 2;
    const std::uint32_t hi = lo * 2 - 1;
    if (out.empty() || out.back().lo != lo) out.push_back({lo, hi, 0});
    out.back().users += n;
  }
  return out;
}

}  // namespace

SummaryStats summary_stats(const EventLog& log, const NetworkState& state, const SummaryOptions& options) {
  SummaryStats out;
  const std::uint64_t every = std::max<std::uint64_t>(1, options.sample_every);
  GrowthSample cur;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    switch (e.kind) {
      case EventKind::Join: ++cur.users; break;
      case EventKind::Follow: ++cur.links; break;
      case EventKind::Post: ++cur.posts; break;
      case EventKind::Repost: ++cur.reposts; break;
    }
    cur.seq = e.seq;
    cur.time = e.time;
    if ((i + 1) % every == 0 || i + 1 == log.events.size()) out.growth.push_back(cur);
  }

  std::map<std::uint32_t, std::uint64_t> in_hist, out_hist;
  for (const Event& e : log.events) {
    if (e.kind != EventKind::Join) continue;
    const std::uint32_t kin = state.in_degree(e.user);
    const std::uint32_t kout = state.out_degree(e.user);
    if (kin == 0) ++out.zero_in_degree;
    else ++in_hist[kin];
    if (kout == 0) ++out.zero_out_degree;
    else ++out_hist[kout];
  }
  out.in_degree = bin_degrees(in_hist, options.log_bins);
  out.out_degree = bin_degrees(out_hist, options.log_bins);
  return out;
}

// ---------------------------------------------------------------------------

std::optional<BoxStats> box_stats(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  BoxStats b;
  b.n = values.size();
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  b.p99 = quantile(0.99);
  double sum = 0.0;
  for (double v : values) sum += v;
  b.mean = sum / static_cast<double>(values.size());
  return b;
}

std::string_view to_string(LinkGroup g) {
  switch (g) {
    case LinkGroup::Grandparent: return "G";
    case LinkGroup::Origin: return "O";
    case LinkGroup::Shortcut: return "GuO";
    case LinkGroup::TriadicOnly: return "tri_only";
    case LinkGroup::All: return "all";
  }
  return "?";
}

EfficiencyReport link_efficiency(const NetworkState& state, std::span<const LinkContext> contexts,
                                 std::optional<double> horizon) {
  EfficiencyReport out;
  out.horizon = horizon.value_or(state.last_time());
  for (const auto& c : contexts) {
    if (c.time > out.horizon) throw std::invalid_argument("link_efficiency: horizon precedes a link");
    const double span = out.horizon - c.time;
    if (span <= 0) {
      ++out.excluded;
      continue;
    }
    const Edge* edge = state.find_edge(c.target, c.creator);
    if (!edge) throw std::invalid_argument("link_efficiency: contexts do not match the network state");
    out.links.push_back({c.link_index, static_cast<double>(edge->w_seen) / span,
                         static_cast<double>(edge->w_repost) / span, c.is_g, c.is_o, c.is_tri});
  }

  for (LinkGroup g : {LinkGroup::Grandparent, LinkGroup::Origin, LinkGroup::Shortcut, LinkGroup::TriadicOnly,
                      LinkGroup::All}) {
    std::vector<double> seen, repost;
    for (const auto& l : out.links) {
      bool in = false;
      switch (g) {
        case LinkGroup::Grandparent: in = l.is_g; break;
        case LinkGroup::Origin: in = l.is_o; break;
        case LinkGroup::Shortcut: in = l.is_g || l.is_o; break;
        case LinkGroup::TriadicOnly: in = l.is_tri && !l.is_g && !l.is_o; break;
        case LinkGroup::All: in = true; break;
      }
      if (!in) continue;
      seen.push_back(l.eta_seen);
      repost.push_back(l.eta_repost);
    }
    out.groups.push_back({g, box_stats(std::move(seen)), box_stats(std::move(repost))});
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kContextColumns =
    "#link_index\tcreator\ttarget\tk\tpool\tn_g\tn_o\tn_tri\tn_guo\tis_g\tis_o\tis_tri\tis_guo\t"
    "seen_from_target\trank_pct_g\trank_pct_o\trank_ties_g\trank_ties_o\tseq\ttime";

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw LogError(LogErrorCode::MalformedLine, line, "bad context field '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_contexts(std::span<const LinkContext> contexts, std::ostream& out, const std::string& header) {
  if (!header.empty()) out << header;
  out << kContextColumns << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("NA"); };
  for (const auto& c : contexts) {
    out << c.link_index << '\t' << c.creator << '\t' << c.target << '\t' << c.k << '\t' << c.pool << '\t' << c.n_g
        << '\t' << c.n_o << '\t' << c.n_tri << '\t' << c.n_guo << '\t' << int(c.is_g) << '\t' << int(c.is_o) << '\t'
        << int(c.is_tri) << '\t' << int(c.is_guo) << '\t' << c.seen_from_target << '\t' << opt(c.rank_pct_g) << '\t'
        << opt(c.rank_pct_o) << '\t' << c.rank_ties_g << '\t' << c.rank_ties_o << '\t' << c.seq << '\t'
        << format_time(c.time) << '\n';
  }
}

std::vector<LinkContext> read_contexts(std::istream& in) {
  std::vector<LinkContext> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty() || raw[0] == '#') continue;
    std::vector<std::string_view> f;
    std::string_view line(raw);
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = line.find('\t', pos);
      f.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (f.size() != 20) throw LogError(LogErrorCode::MalformedLine, line_no, "expected 20 context columns");
    LinkContext c;
    c.link_index = parse_field<std::uint64_t>(f[0], line_no);
    c.creator = parse_field<UserId>(f[1], line_no);
    c.target = parse_field<UserId>(f[2], line_no);
    c.k = parse_field<std::uint32_t>(f[3], line_no);
    c.pool = parse_field<std::int64_t>(f[4], line_no);
    c.n_g = parse_field<std::uint32_t>(f[5], line_no);
    c.n_o = parse_field<std::uint32_t>(f[6], line_no);
    c.n_tri = parse_field<std::uint32_t>(f[7], line_no);
    c.n_guo = parse_field<std::uint32_t>(f[8], line_no);
    c.is_g = parse_field<int>(f[9], line_no) != 0;
    c.is_o = parse_field<int>(f[10], line_no) != 0;
    c.is_tri = parse_field<int>(f[11], line_no) != 0;
    c.is_guo = parse_field<int>(f[12], line_no) != 0;
    c.seen_from_target = parse_field<std::uint64_t>(f[13], line_no);
    if (f[14] != "NA") c.rank_pct_g = parse_field<double>(f[14], line_no);
    if (f[15] != "NA") c.rank_pct_o = parse_field<double>(f[15], line_no);
    c.rank_ties_g = parse_field<std::uint32_t>(f[16], line_no);
    c.rank_ties_o = parse_field<std::uint32_t>(f[17], line_no);
    c.seq = parse_field<std::uint64_t>(f[18], line_no);
    c.time = parse_field<double>(f[19], line_no);
    out.push_back(c);
  }
  return out;
}

}  // namespace socnet
