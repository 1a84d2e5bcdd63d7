// Event types, ordering rules and the line-delimited log format shared by
// every stage of the toolkit.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace socnet {

using UserId = std::uint32_t;
using MessageId = std::uint32_t;

enum class EventKind : std::uint8_t { Join, Post, Repost, Follow };

std::string_view to_string(EventKind kind);

/// One timestamped action.
///
/// Field use depends on the kind:
///   Join    user
///   Post    user = author, message
///   Repost  user, message, other = parent user (the holder reposted from)
///   Follow  user = creator (the new follower), other = target (the followee)
///
/// A Follow creates the edge target -> creator: information flows from the
/// target to the creator.
struct Event {
  std::uint64_t seq = 0;
  double time = 0.0;
  EventKind kind = EventKind::Join;
  UserId user = 0;
  UserId other = 0;
  MessageId message = 0;

  static Event join(double t, UserId u) { return {0, t, EventKind::Join, u, 0, 0}; }
  static Event post(double t, UserId author, MessageId m) {
    return {0, t, EventKind::Post, author, 0, m};
  }
  static Event repost(double t, UserId u, MessageId m, UserId parent) {
    return {0, t, EventKind::Repost, u, parent, m};
  }
  static Event follow(double t, UserId creator, UserId target) {
    return {0, t, EventKind::Follow, creator, target, 0};
  }

  bool operator==(const Event&) const = default;
};

/// A parsed log. Internal ids are dense; the label tables map them back to
/// the decimal identifiers found in (or written to) the file.
struct EventLog {
  std::vector<Event> events;
  std::vector<std::uint64_t> user_labels;
  std::vector<std::uint64_t> message_labels;

  std::size_t user_count() const { return user_labels.size(); }
  std::size_t message_count() const { return message_labels.size(); }

  /// Builds a log whose external labels equal the internal ids and whose
  /// seq fields are 0..n-1. Label tables are sized from the largest id used.
  static EventLog from_events(std::vector<Event> events);

  bool operator==(const EventLog&) const = default;
};

enum class LogErrorCode : std::uint8_t {
  MalformedLine,
  SeqNotIncreasing,
  TimeDecreasing,
  UnknownUser,
  DuplicateJoin,
  SelfFollow,
  DuplicateFollow,
  DuplicateMessage,
  UnknownMessage,
  SelfRepost,
  UnknownRepostSource,
  DuplicateHolding,
};

/// Stable machine-readable name, e.g. "duplicate_follow".
std::string_view to_string(LogErrorCode code);

struct Violation {
  std::uint64_t seq = 0;
  std::size_t line = 0;  // 0 when the event did not come from a file
  LogErrorCode code = LogErrorCode::MalformedLine;
  std::string detail;
};

class LogError : public std::runtime_error {
 public:
  LogError(LogErrorCode code, std::size_t line, const std::string& detail);

  LogErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  LogErrorCode code_;
  std::size_t line_;
};

/// Parses the tab-separated line format. Blank lines and lines starting with
/// '#' are skipped. Users referenced before any Join get a Join synthesized
/// immediately before the referencing event. Throws LogError on the first
/// malformed line or invariant violation.
EventLog parse_log(std::istream& in);
EventLog parse_log_string(std::string_view text);
EventLog read_log_file(const std::string& path);

/// Serializes a valid log; throws LogError if validate_log reports anything.
void write_log(const EventLog& log, std::ostream& out);
std::string write_log_string(const EventLog& log);
void write_log_file(const EventLog& log, const std::string& path);

/// Every invariant violation in the log, in seq order. Empty iff valid.
std::vector<Violation> validate_log(const EventLog& log);

std::string format_time(double t);

}  // namespace socnet
