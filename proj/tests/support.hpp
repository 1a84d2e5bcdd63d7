// Test helpers: random valid logs built without the replay engine, and a
// from-scratch recomputation of link contexts over an event prefix.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "socnet/eventlog.hpp"
#include "socnet/netstate.hpp"

namespace socnet::test_support {

struct RandomLogOptions {
  std::size_t events = 300;
  double join = 0.08;
  double post = 0.22;
  double repost = 0.35;
  double follow = 0.35;
  std::size_t initial_users = 4;
};

/// Valid log with reposts from arbitrary holders (not only followees), so
/// that shortcut roles arise outside the follower graph as well.
inline EventLog random_log(std::uint64_t seed, const RandomLogOptions& o = {}) {
  std::mt19937_64 rng(seed);
  std::vector<Event> ev;
  std::set<std::pair<UserId, UserId>> follows;  // (creator, target)
  std::vector<std::set<UserId>> holders;         // per message
  UserId users = 0;
  double t = 0;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  for (std::size_t i = 0; i < o.initial_users; ++i) ev.push_back(Event::join(t, users++));
  std::discrete_distribution<int> kind({o.join, o.post, o.repost, o.follow});
  std::size_t attempts = 0;
  while (ev.size() < o.events && attempts++ < o.events * 50) {
    t += static_cast<double>(pick(3));
    switch (kind(rng)) {
      case 0: ev.push_back(Event::join(t, users++)); break;
      case 1: {
        const auto m = static_cast<MessageId>(holders.size());
        const auto u = static_cast<UserId>(pick(users));
        holders.push_back({u});
        ev.push_back(Event::post(t, u, m));
        break;
      }
      case 2: {
        if (holders.empty()) break;
        const auto m = static_cast<MessageId>(pick(holders.size()));
        const auto u = static_cast<UserId>(pick(users));
        if (holders[m].count(u)) break;
        auto it = holders[m].begin();
        std::advance(it, static_cast<long>(pick(holders[m].size())));
        holders[m].insert(u);
        ev.push_back(Event::repost(t, u, m, *it));
        break;
      }
      case 3: {
        if (users < 2) break;
        const auto c = static_cast<UserId>(pick(users));
        const auto g = static_cast<UserId>(pick(users));
        if (c == g || follows.count({c, g})) break;
        follows.insert({c, g});
        ev.push_back(Event::follow(t, c, g));
        break;
      }
    }
  }
  return EventLog::from_events(std::move(ev));
}

/// Brute-force state of an event prefix, rebuilt from scratch.
struct PrefixState {
  std::set<UserId> joined;
  std::map<UserId, std::set<UserId>> followees;  // creator -> targets
  std::uint64_t follows = 0;
  // viewer -> source -> count
  std::map<UserId, std::map<UserId, std::uint32_t>> seen_g, seen_o, seen_any;

  PrefixState(const EventLog& log, std::size_t end) {
    std::map<MessageId, UserId> author;
    for (std::size_t i = 0; i < end; ++i) {
      const Event& e = log.events[i];
      switch (e.kind) {
        case EventKind::Join: joined.insert(e.user); break;
        case EventKind::Follow:
          followees[e.user].insert(e.other);
          ++follows;
          break;
        case EventKind::Post:
        case EventKind::Repost: {
          if (e.kind == EventKind::Post) author[e.message] = e.user;
          const UserId sender = e.user;
          const UserId origin = author.at(e.message);
          for (const auto& [viewer, fs] : followees) {
            if (!fs.count(sender)) continue;
            std::set<UserId> involved;
            if (sender != viewer) involved.insert(sender);
            if (e.kind == EventKind::Repost && e.other != viewer) {
              ++seen_g[viewer][e.other];
              involved.insert(e.other);
            }
            if (origin != sender && origin != viewer) {
              ++seen_o[viewer][origin];
              involved.insert(origin);
            }
            for (UserId u : involved) ++seen_any[viewer][u];
          }
          break;
        }
      }
    }
  }

  bool follows_user(UserId c, UserId t) const {
    auto it = followees.find(c);
    return it != followees.end() && it->second.count(t);
  }

  std::set<UserId> role_set(UserId c, Mechanism m) const {
    std::set<UserId> out;
    auto add = [&](const auto& table) {
      auto it = table.find(c);
      if (it == table.end()) return;
      for (const auto& [u, n] : it->second)
        if (n > 0 && u != c && !follows_user(c, u)) out.insert(u);
    };
    if (m == Mechanism::Grandparent || m == Mechanism::Shortcut) add(seen_g);
    if (m == Mechanism::Origin || m == Mechanism::Shortcut) add(seen_o);
    if (m == Mechanism::Triadic) {
      auto it = followees.find(c);
      if (it != followees.end()) {
        for (UserId b : it->second) {
          auto jt = followees.find(b);
          if (jt == followees.end()) continue;
          for (UserId x : jt->second)
            if (x != c && !follows_user(c, x)) out.insert(x);
        }
      }
    }
    return out;
  }

  /// Every user a random follow by c could pick.
  std::set<UserId> null_pool(UserId c) const {
    std::set<UserId> out;
    for (UserId u : joined)
      if (u != c && !follows_user(c, u)) out.insert(u);
    return out;
  }

  std::uint32_t count_in(const std::map<UserId, std::map<UserId, std::uint32_t>>& table, UserId c, UserId u) const {
    auto it = table.find(c);
    if (it == table.end()) return 0;
    auto jt = it->second.find(u);
    return jt == it->second.end() ? 0 : jt->second;
  }

  LinkContext context(UserId c, UserId t, PoolMode pool) const {
    LinkContext x;
    x.link_index = follows + 1;
    x.creator = c;
    x.target = t;
    auto it = followees.find(c);
    x.k = it == followees.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
    const auto k = static_cast<std::int64_t>(x.k);
    x.pool = pool == PoolMode::Paper ? static_cast<std::int64_t>(x.link_index) - k - 1
                                     : static_cast<std::int64_t>(joined.size()) - k - 1;
    const auto g = role_set(c, Mechanism::Grandparent);
    const auto o = role_set(c, Mechanism::Origin);
    const auto guo = role_set(c, Mechanism::Shortcut);
    const auto tri = role_set(c, Mechanism::Triadic);
    x.n_g = static_cast<std::uint32_t>(g.size());
    x.n_o = static_cast<std::uint32_t>(o.size());
    x.n_guo = static_cast<std::uint32_t>(guo.size());
    x.n_tri = static_cast<std::uint32_t>(tri.size());
    x.is_g = g.count(t);
    x.is_o = o.count(t);
    x.is_guo = guo.count(t);
    x.is_tri = tri.count(t);
    x.seen_from_target = count_in(seen_any, c, t);
    auto rank = [&](const std::set<UserId>& cands, const auto& table, std::optional<double>& pct,
                    std::uint32_t& ties) {
      if (!cands.count(t)) return;
      const std::uint32_t mine = count_in(table, c, t);
      std::uint32_t greater = 0, equal = 0;
      for (UserId u : cands) {
        const std::uint32_t w = count_in(table, c, u);
        if (w > mine) ++greater;
        if (w == mine) ++equal;
      }
      pct = 100.0 * (greater + (equal + 1) / 2.0) / static_cast<double>(cands.size());
      ties = equal;
    };
    rank(g, seen_g, x.rank_pct_g, x.rank_ties_g);
    rank(o, seen_o, x.rank_pct_o, x.rank_ties_o);
    return x;
  }
};

/// Contexts of every Follow recomputed from its prefix.
inline std::vector<LinkContext> brute_force_contexts(const EventLog& log, PoolMode pool) {
  std::vector<LinkContext> out;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    if (e.kind != EventKind::Follow) continue;
    LinkContext c = PrefixState(log, i).context(e.user, e.other, pool);
    c.seq = e.seq;
    c.time = e.time;
    out.push_back(c);
  }
  return out;
}

}  // namespace socnet::test_support
