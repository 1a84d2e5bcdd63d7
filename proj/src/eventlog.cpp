#include "socnet/eventlog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace socnet {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Join: return "join";
    case EventKind::Post: return "post";
    case EventKind::Repost: return "repost";
    case EventKind::Follow: return "follow";
  }
  return "?";
}

std::string_view to_string(LogErrorCode code) {
  switch (code) {
    case LogErrorCode::MalformedLine: return "malformed_line";
    case LogErrorCode::SeqNotIncreasing: return "seq_not_increasing";
    case LogErrorCode::TimeDecreasing: return "time_decreasing";
    case LogErrorCode::UnknownUser: return "unknown_user";
    case LogErrorCode::DuplicateJoin: return "duplicate_join";
    case LogErrorCode::SelfFollow: return "self_follow";
    case LogErrorCode::DuplicateFollow: return "duplicate_follow";
    case LogErrorCode::DuplicateMessage: return "duplicate_message";
    case LogErrorCode::UnknownMessage: return "unknown_message";
    case LogErrorCode::SelfRepost: return "self_repost";
    case LogErrorCode::UnknownRepostSource: return "unknown_repost_source";
    case LogErrorCode::DuplicateHolding: return "duplicate_holding";
  }
  return "?";
}

namespace {

std::string error_message(LogErrorCode code, std::size_t line, const std::string& detail) {
  std::string msg(to_string(code));
  if (line > 0) msg += " at line " + std::to_string(line);
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

std::uint64_t pair_key(UserId a, UserId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<Violation> validate_impl(const EventLog& log, const std::vector<std::size_t>* lines) {
  std::vector<Violation> out;
  const auto users = log.user_count();
  const auto messages = log.message_count();
  std::vector<char> joined(users, 0);
  std::vector<char> posted(messages, 0);
  std::unordered_set<std::uint64_t> edges;
  std::unordered_set<std::uint64_t> holders;  // (message, user)

  auto report = [&](std::size_t i, LogErrorCode code, std::string detail) {
    out.push_back({log.events[i].seq, lines ? (*lines)[i] : 0, code, std::move(detail)});
  };
  auto check_user = [&](std::size_t i, UserId u) {
    if (u >= users) {
      report(i, LogErrorCode::UnknownUser, "user id " + std::to_string(u) + " out of range");
      return false;
    }
    if (!joined[u]) {
      report(i, LogErrorCode::UnknownUser, "user " + std::to_string(log.user_labels[u]) + " has no join");
      return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    if (i > 0) {
      const Event& prev = log.events[i - 1];
      if (e.seq <= prev.seq) report(i, LogErrorCode::SeqNotIncreasing, "");
      if (e.time < prev.time) report(i, LogErrorCode::TimeDecreasing, "");
    }
    if (!std::isfinite(e.time) || e.time < 0) {
      report(i, LogErrorCode::MalformedLine, "time must be finite and non-negative");
    }
    switch (e.kind) {
      case EventKind::Join:
        if (e.user >= users) {
          report(i, LogErrorCode::UnknownUser, "user id out of range");
        } else if (joined[e.user]) {
          report(i, LogErrorCode::DuplicateJoin, "user " + std::to_string(log.user_labels[e.user]));
        } else {
          joined[e.user] = 1;
        }
        break;
      case EventKind::Post:
        if (!check_user(i, e.user)) break;
        if (e.message >= messages) {
          report(i, LogErrorCode::UnknownMessage, "message id out of range");
        } else if (posted[e.message]) {
          report(i, LogErrorCode::DuplicateMessage, "message " + std::to_string(log.message_labels[e.message]));
        } else {
          posted[e.message] = 1;
          holders.insert(pair_key(e.message, e.user));
        }
        break;
      case EventKind::Repost: {
        if (!check_user(i, e.user) || !check_user(i, e.other)) break;
        if (e.message >= messages || !posted[e.message]) {
          report(i, LogErrorCode::UnknownMessage, "repost of a message never posted");
          break;
        }
        if (e.user == e.other) {
          report(i, LogErrorCode::SelfRepost, "");
          break;
        }
        if (!holders.count(pair_key(e.message, e.other))) {
          report(i, LogErrorCode::UnknownRepostSource,
                 "parent " + std::to_string(log.user_labels[e.other]) + " never held the message");
          break;
        }
        if (!holders.insert(pair_key(e.message, e.user)).second) {
          report(i, LogErrorCode::DuplicateHolding, "user already holds the message");
        }
        break;
      }
      case EventKind::Follow:
        if (!check_user(i, e.user) || !check_user(i, e.other)) break;
        if (e.user == e.other) {
          report(i, LogErrorCode::SelfFollow, "");
        } else if (!edges.insert(pair_key(e.other, e.user)).second) {
          report(i, LogErrorCode::DuplicateFollow,
                 std::to_string(log.user_labels[e.user]) + " already follows " +
                     std::to_string(log.user_labels[e.other]));
        }
        break;
    }
  }
  return out;
}

class Interner {
 public:
  explicit Interner(std::vector<std::uint64_t>& labels) : labels_(labels) {}

  std::uint32_t intern(std::uint64_t label, bool& fresh) {
    auto [it, inserted] = index_.try_emplace(label, static_cast<std::uint32_t>(labels_.size()));
    fresh = inserted;
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  const std::uint32_t* find(std::uint64_t label) const {
    auto it = index_.find(label);
    return it == index_.end() ? nullptr : &it->second;
  }

 private:
  std::vector<std::uint64_t>& labels_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != '\t' && line[end] != ' ') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool parse_id(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_time(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out) && out >= 0;
}

}  // namespace

LogError::LogError(LogErrorCode code, std::size_t line, const std::string& detail)
    : std::runtime_error(error_message(code, line, detail)), code_(code), line_(line) {}

EventLog EventLog::from_events(std::vector<Event> events) {
  EventLog log;
  UserId max_user = 0;
  MessageId max_message = 0;
  bool any_user = false, any_message = false;
  for (std::size_t i = 0; i < events.size(); ++i) {
    Event& e = events[i];
    e.seq = i;
    any_user = true;
    max_user = std::max(max_user, e.user);
    if (e.kind == EventKind::Follow || e.kind == EventKind::Repost) max_user = std::max(max_user, e.other);
    if (e.kind == EventKind::Post || e.kind == EventKind::Repost) {
      any_message = true;
      max_message = std::max(max_message, e.message);
    }
  }
  if (any_user) {
    log.user_labels.resize(std::size_t{max_user} + 1);
    for (std::size_t u = 0; u < log.user_labels.size(); ++u) log.user_labels[u] = u;
  }
  if (any_message) {
    log.message_labels.resize(std::size_t{max_message} + 1);
    for (std::size_t m = 0; m < log.message_labels.size(); ++m) log.message_labels[m] = m;
  }
  log.events = std::move(events);
  return log;
}

std::string format_time(double t) {
  if (t == std::floor(t) && std::fabs(t) < 9.007199254740992e15) {
    return std::to_string(static_cast<std::int64_t>(t));
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, t);
  return std::string(buf, ptr);
}

EventLog parse_log(std::istream& in) {
  EventLog log;
  Interner users(log.user_labels);
  Interner messages(log.message_labels);
  std::vector<char> joined;
  std::vector<std::size_t> lines;

  auto fail = [](LogErrorCode code, std::size_t line, const std::string& why) {
    throw LogError(code, line, why);
  };
  auto push = [&](Event e, std::size_t line) {
    log.events.push_back(e);
    lines.push_back(line);
  };
  // Interns a user id and synthesizes a Join when it is first referenced
  // by something other than an explicit join.
  auto user_ref = [&](std::string_view field, double t, std::size_t line) {
    std::uint64_t label = 0;
    if (!parse_id(field, label)) fail(LogErrorCode::MalformedLine, line, "bad user id '" + std::string(field) + "'");
    bool fresh = false;
    UserId u = users.intern(label, fresh);
    if (fresh) joined.push_back(0);
    if (!joined[u]) {
      joined[u] = 1;
      push(Event::join(t, u), line);
    }
    return u;
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() < 3) fail(LogErrorCode::MalformedLine, line_no, "too few fields");

    double t = 0;
    if (!parse_time(fields[0], t)) fail(LogErrorCode::MalformedLine, line_no, "bad time '" + std::string(fields[0]) + "'");
    if (!log.events.empty() && t < log.events.back().time) {
      fail(LogErrorCode::TimeDecreasing, line_no, "time " + std::string(fields[0]) + " precedes previous event");
    }
    const std::string_view kind = fields[1];
    auto expect = [&](std::size_t n) {
      if (fields.size() != n) {
        fail(LogErrorCode::MalformedLine, line_no,
             std::string(kind) + " expects " + std::to_string(n) + " fields, got " + std::to_string(fields.size()));
      }
    };

    if (kind == "join") {
      expect(3);
      std::uint64_t label = 0;
      if (!parse_id(fields[2], label)) fail(LogErrorCode::MalformedLine, line_no, "bad user id");
      bool fresh = false;
      UserId u = users.intern(label, fresh);
      if (fresh) joined.push_back(0);
      if (joined[u]) fail(LogErrorCode::DuplicateJoin, line_no, "user " + std::to_string(label));
      joined[u] = 1;
      push(Event::join(t, u), line_no);
    } else if (kind == "post") {
      expect(4);
      UserId author = user_ref(fields[2], t, line_no);
      std::uint64_t label = 0;
      if (!parse_id(fields[3], label)) fail(LogErrorCode::MalformedLine, line_no, "bad message id");
      bool fresh = false;
      MessageId m = messages.intern(label, fresh);
      if (!fresh) fail(LogErrorCode::DuplicateMessage, line_no, "message " + std::to_string(label));
      push(Event::post(t, author, m), line_no);
    } else if (kind == "repost") {
      expect(5);
      UserId u = user_ref(fields[2], t, line_no);
      std::uint64_t label = 0;
      if (!parse_id(fields[3], label)) fail(LogErrorCode::MalformedLine, line_no, "bad message id");
      const MessageId* m = messages.find(label);
      if (!m) fail(LogErrorCode::UnknownMessage, line_no, "message " + std::to_string(label));
      UserId parent = user_ref(fields[4], t, line_no);
      push(Event::repost(t, u, *m, parent), line_no);
    } else if (kind == "follow") {
      expect(4);
      UserId creator = user_ref(fields[2], t, line_no);
      UserId target = user_ref(fields[3], t, line_no);
      push(Event::follow(t, creator, target), line_no);
    } else {
      fail(LogErrorCode::MalformedLine, line_no, "unknown event kind '" + std::string(kind) + "'");
    }
  }

  for (std::size_t i = 0; i < log.events.size(); ++i) log.events[i].seq = i;
  auto violations = validate_impl(log, &lines);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw LogError(v.code, v.line, v.detail);
  }
  return log;
}

EventLog parse_log_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_log(in);
}

EventLog read_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_log(in);
}

std::vector<Violation> validate_log(const EventLog& log) { return validate_impl(log, nullptr); }

void write_log(const EventLog& log, std::ostream& out) {
  auto violations = validate_log(log);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw LogError(v.code, 0, "refusing to serialize: seq " + std::to_string(v.seq) + " " + v.detail);
  }
  const auto& ul = log.user_labels;
  const auto& ml = log.message_labels;
  for (const Event& e : log.events) {
    out << format_time(e.time) << '\t' << to_string(e.kind) << '\t' << ul[e.user];
    switch (e.kind) {
      case EventKind::Join: break;
      case EventKind::Post: out << '\t' << ml[e.message]; break;
      case EventKind::Repost: out << '\t' << ml[e.message] << '\t' << ul[e.other]; break;
      case EventKind::Follow: out << '\t' << ul[e.other]; break;
    }
    out << '\n';
  }
}

std::string write_log_string(const EventLog& log) {
  std::ostringstream out;
  write_log(log, out);
  return out.str();
}

void write_log_file(const EventLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_log(log, out);
}

}  // namespace socnet
