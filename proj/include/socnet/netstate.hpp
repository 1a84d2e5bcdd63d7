// Incremental replay of an event log: follower graph, cascade forest,
// seen-counters, and the per-follow LinkContext snapshots.
#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "socnet/eventlog.hpp"

namespace socnet {

/// Link-creation mechanisms that a follow target can be attributed to.
/// Shortcut is the union of Grandparent and Origin.
enum class Mechanism : std::uint8_t { Grandparent, Origin, Shortcut, Triadic };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view s);

/// How the random-choice pool is sized.
///   Paper: link_index - k - 1
///   Users: users joined so far - k - 1 (the exact size of the null pool)
enum class PoolMode : std::uint8_t { Paper, Users };

struct ReplayOptions {
  PoolMode pool = PoolMode::Paper;
  /// Keep already-followed users in the candidate sets.
  bool include_followed_candidates = false;
  /// Per-user feed length kept for samplers; 0 disables the feed.
  std::size_t feed_window = 0;
};

/// Sufficient statistic of one Follow event, taken before the edge exists.
struct LinkContext {
  std::uint64_t link_index = 0;  // 1-based Follow counter
  UserId creator = 0;
  UserId target = 0;
  std::uint32_t k = 0;  // creator in-degree (followees)
  std::int64_t pool = 0;
  std::uint32_t n_g = 0;
  std::uint32_t n_o = 0;
  std::uint32_t n_tri = 0;
  std::uint32_t n_guo = 0;
  bool is_g = false;
  bool is_o = false;
  bool is_tri = false;
  bool is_guo = false;
  std::uint64_t seen_from_target = 0;
  // Mid-rank percentile of the target among candidates by descending
  // seen-count, and the size of the tie group holding the target.
  std::optional<double> rank_pct_g;
  std::optional<double> rank_pct_o;
  std::uint32_t rank_ties_g = 0;
  std::uint32_t rank_ties_o = 0;
  std::uint64_t seq = 0;
  double time = 0.0;

  std::uint32_t count(Mechanism m) const;
  bool indicator(Mechanism m) const;

  bool operator==(const LinkContext&) const = default;
};

/// Counts of deliveries in which a user appeared in a given role, from one
/// viewer's perspective.
struct SeenCounts {
  std::uint32_t direct = 0;       // the user was the sender
  std::uint32_t grandparent = 0;  // the sender's parent in the cascade
  std::uint32_t origin = 0;       // the cascade root, at distance > 1
  std::uint32_t any = 0;          // once per delivery, any of the above

  std::uint32_t role(Mechanism m) const;
};

struct Edge {
  UserId source = 0;  // followee
  UserId sink = 0;    // follower, the creator of the link
  std::uint64_t created_seq = 0;
  double created_time = 0.0;
  std::uint64_t w_seen = 0;
  std::uint64_t w_repost = 0;
};

struct UserActivity {
  std::uint64_t join_seq = 0;
  std::uint32_t join_order = 0;
  std::uint64_t posts = 0;
  std::uint64_t reposts = 0;
  std::uint64_t times_reposted = 0;  // reposts of messages this user authored
};

struct FeedItem {
  MessageId message = 0;
  UserId sender = 0;
};

struct Candidate {
  UserId user = 0;
  std::uint32_t seen = 0;
};

class NetworkState {
 public:
  explicit NetworkState(ReplayOptions options = {});

  /// Applies one event. The event must be valid against the current state.
  void apply(const Event& e);

  /// Snapshot for a prospective Follow creator -> target against the current
  /// state. link_index is the index the Follow would receive.
  LinkContext context_for(UserId creator, UserId target, std::uint64_t seq = 0, double time = 0.0) const;

  std::size_t user_count() const { return joined_; }
  std::size_t id_capacity() const { return activity_.size(); }
  std::uint64_t follow_count() const { return edges_.size(); }
  std::uint64_t post_count() const { return posts_; }
  std::uint64_t repost_count() const { return reposts_; }
  std::uint64_t seen_total() const { return seen_total_; }
  std::uint64_t events_applied() const { return events_; }
  double last_time() const { return last_time_; }

  std::uint32_t in_degree(UserId u) const { return static_cast<std::uint32_t>(followees_[u].size()); }
  std::uint32_t out_degree(UserId u) const { return static_cast<std::uint32_t>(followers_[u].size()); }
  bool follows(UserId follower, UserId followee) const;
  const std::vector<UserId>& followees(UserId u) const { return followees_[u]; }
  const UserActivity& activity(UserId u) const { return activity_[u]; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge* find_edge(UserId source, UserId sink) const;

  /// Seen counts of `viewer` toward `source`; zero when never seen.
  SeenCounts seen(UserId viewer, UserId source) const;

  /// Current candidate set of `viewer` for a mechanism, with the seen count in
  /// that mechanism's role (Shortcut uses grandparent + origin; Triadic
  /// candidates carry 0). Sorted by user id.
  std::vector<Candidate> candidates(UserId viewer, Mechanism m) const;
  std::uint32_t candidate_count(UserId viewer, Mechanism m) const;

  const std::deque<FeedItem>& feed(UserId u) const { return feeds_[u]; }
  bool holds(UserId u, MessageId m) const;
  std::optional<UserId> cascade_parent(MessageId m, UserId holder) const;
  UserId cascade_origin(MessageId m) const { return messages_[m].origin; }

  const ReplayOptions& options() const { return options_; }

 private:
  struct ViewerCounts {
    std::uint32_t g = 0, o = 0, guo = 0;
  };
  struct MessageInfo {
    UserId origin = 0;
    std::unordered_map<UserId, UserId> parent;  // holder -> parent (origin maps to itself)
  };

  bool excluded(UserId viewer, UserId c) const;
  void deliver(UserId sender, MessageId m, std::optional<UserId> sender_parent);
  void bump(UserId viewer, UserId source, Mechanism role);
  std::uint32_t triadic_count(UserId viewer) const;
  void rank_target(UserId viewer, UserId target, Mechanism m, std::optional<double>& pct, std::uint32_t& ties) const;

  ReplayOptions options_;
  std::vector<std::vector<UserId>> followees_;
  std::vector<std::vector<UserId>> followers_;
  std::vector<std::vector<std::uint32_t>> follower_edges_;  // edge indices keyed by source
  std::unordered_map<std::uint64_t, std::uint32_t> edge_index_;
  std::vector<Edge> edges_;
  std::vector<UserActivity> activity_;
  std::vector<std::unordered_map<UserId, SeenCounts>> seen_;
  std::vector<ViewerCounts> counts_;
  std::vector<MessageInfo> messages_;
  std::vector<std::deque<FeedItem>> feeds_;
  std::uint64_t posts_ = 0;
  std::uint64_t reposts_ = 0;
  std::uint64_t seen_total_ = 0;
  std::uint64_t events_ = 0;
  std::size_t joined_ = 0;
  double last_time_ = 0.0;
};

struct ReplayResult {
  NetworkState state;
  std::vector<LinkContext> contexts;
};

/// Replays a log from scratch. Throws LogError if the log is invalid.
ReplayResult replay(const EventLog& log, const ReplayOptions& options = {});

// ---------------------------------------------------------------------------
// Mechanism overlap

/// Fractions of Follow events per indicator pattern. Pattern index bits:
/// 1 = grandparent, 2 = origin, 4 = triadic; index 0 is "none".
struct MechanismOverlap {
  std::size_t n_links = 0;
  std::array<double, 8> pattern{};
  double grandparent = 0.0;
  double origin = 0.0;
  double triadic = 0.0;
  double shortcut = 0.0;
};

MechanismOverlap mechanism_overlap(std::span<const LinkContext> contexts);

// ---------------------------------------------------------------------------
// Growth curves and degree distributions

struct GrowthSample {
  std::uint64_t seq = 0;
  double time = 0.0;
  std::uint64_t users = 0;
  std::uint64_t links = 0;
  std::uint64_t posts = 0;
  std::uint64_t reposts = 0;
};

struct DegreeBin {
  std::uint32_t lo = 0;  // inclusive
  std::uint32_t hi = 0;  // inclusive
  std::uint64_t users = 0;
};

struct SummaryOptions {
  std::uint64_t sample_every = 1000;
  bool log_bins = false;
};

struct SummaryStats {
  std::vector<GrowthSample> growth;
  std::vector<DegreeBin> in_degree;   // users with in-degree 0 are not binned
  std::vector<DegreeBin> out_degree;  // likewise for out-degree 0
  std::uint64_t zero_in_degree = 0;
  std::uint64_t zero_out_degree = 0;
};

/// Growth is sampled every `sample_every` events plus the final event.
SummaryStats summary_stats(const EventLog& log, const NetworkState& state, const SummaryOptions& options = {});

// ---------------------------------------------------------------------------
// Link efficiency

struct BoxStats {
  std::size_t n = 0;
  double q1 = 0, median = 0, mean = 0, q3 = 0, p99 = 0;
};

/// Linear-interpolation quantiles over a copy of the values. Empty input
/// gives nullopt.
std::optional<BoxStats> box_stats(std::vector<double> values);

struct LinkEfficiency {
  std::uint64_t link_index = 0;
  double eta_seen = 0.0;
  double eta_repost = 0.0;
  bool is_g = false, is_o = false, is_tri = false;
};

enum class LinkGroup : std::uint8_t { Grandparent, Origin, Shortcut, TriadicOnly, All };
std::string_view to_string(LinkGroup g);

struct EfficiencyGroup {
  LinkGroup group = LinkGroup::All;
  std::optional<BoxStats> seen;
  std::optional<BoxStats> repost;
};

struct EfficiencyReport {
  double horizon = 0.0;
  std::size_t excluded = 0;  // links created at the horizon
  std::vector<LinkEfficiency> links;
  std::vector<EfficiencyGroup> groups;
};

/// Messages seen / reposted through each Follow edge per time unit after its
/// creation, up to `horizon` (defaults to the time of the last event).
EfficiencyReport link_efficiency(const NetworkState& state, std::span<const LinkContext> contexts,
                                 std::optional<double> horizon = std::nullopt);

// ---------------------------------------------------------------------------
// LinkContext interchange file

void write_contexts(std::span<const LinkContext> contexts, std::ostream& out, const std::string& header = {});
std::vector<LinkContext> read_contexts(std::istream& in);

}  // namespace socnet
