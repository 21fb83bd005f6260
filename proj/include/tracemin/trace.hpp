#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tracemin/term.hpp"

namespace tracemin {

enum class EventKind
{
  RECEIVE,
  SEND,
  SPAWN,
  REGISTER,
  LINK,
  IO,
  CALL,
  RETURN
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// Erlang-style {MegaSecs, Secs, MicroSecs}.
struct Timestamp
{
  std::int64_t mega  = 0;
  std::int64_t secs  = 0;
  std::int64_t micro = 0;

  static Timestamp from_micros(std::int64_t us);
  std::int64_t to_micros() const { return (mega * 1000000 + secs) * 1000000 + micro; }

  auto operator<=>(const Timestamp&) const = default;
  bool operator==(const Timestamp&) const  = default;
};

/**
 * One record of a trace.
 *
 * The payload layout depends on the kind:
 *   receive   Msg
 *   send      {Msg, To}
 *   spawn     {NewPid, {Module, Function, Args}}
 *   register  Name
 *   link      OtherPid
 *   other     whatever the tracer recorded
 */
struct Event
{
  std::size_t seq = 0;
  Pid pid;
  EventKind kind = EventKind::CALL;
  Term payload;
  Timestamp ts;

  bool operator==(const Event&) const = default;
};

struct Trace
{
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  /** Events [0, n). */
  Trace prefix(std::size_t n) const;
  bool operator==(const Trace&) const = default;
};

/// An external input the replay harness can re-inject.
struct Stimulus
{
  Term target;
  Term payload;

  Term to_term() const { return Term::tuple({target, payload}); }
  std::string to_string() const { return to_term().to_string(); }
  bool operator==(const Stimulus& o) const
  {
    return target == o.target && payload == o.payload;
  }
};

enum class EventClass
{
  EXTERNAL_STIMULUS,
  ENVIRONMENT_INTERACTION,
  SYSTEM_ACTION
};

std::string_view to_string(EventClass c);

enum class MockOption
{
  /** Mock stimuli and environment interactions. */
  A,
  /** Mock stimuli only; interactions reach the live environment. */
  B
};

/**
 * The system/environment split. Process references are rendered pids
 * ("<0.23.0>") or registered names ("db").
 */
struct Boundary
{
  std::set<std::string> mocked;
  MockOption mode = MockOption::A;

  bool mocks(std::string_view ref) const { return mocked.count(std::string(ref)) > 0; }
  bool operator==(const Boundary&) const = default;
};

/** Environment = the user and the user's I/O server. */
Boundary default_boundary();

/**
 * Streaming event classifier.
 *
 * Classification of a receive depends on what came before it (was the
 * message sent by a traced system process, is the receiver awaiting a reply),
 * so events must be fed in trace order. A fresh Classifier classifies a
 * single event in isolation.
 */
class Classifier
{
 public:
  struct Result
  {
    EventClass cls = EventClass::SYSTEM_ACTION;
    /** For environment interactions: the environment process involved. */
    std::optional<std::string> peer;
    /** For replies: the head of the request being answered. */
    std::optional<std::string> request;
  };

  explicit Classifier(Boundary boundary) : d_boundary(std::move(boundary)) {}

  Result classify(const Event& event);

  /** Registered name of 'pid' if known, else the pid itself. */
  Term name_of(const Pid& pid) const;
  /** Rendered reference used for boundary checks. */
  std::string ref_of(const Pid& pid) const;
  const Boundary& boundary() const { return d_boundary; }

 private:
  struct PendingSend
  {
    Pid from;
    Term msg;
  };
  struct OutstandingCall
  {
    std::string to;
    std::string head;
  };

  bool is_mocked_pid(const Pid& pid) const;
  std::optional<Pid> resolve(const Term& dest) const;
  std::string ref_of_term(const Term& dest) const;

  Boundary d_boundary;
  std::map<Pid, std::string> d_names;
  std::map<std::string, Pid> d_pids;
  std::map<Pid, std::vector<PendingSend>> d_in_flight;
  std::map<Pid, std::vector<OutstandingCall>> d_calls;
};

/** Classify 'event' in isolation. */
EventClass classify(const Event& event, const Boundary& boundary);
/** Classify every event of 'trace' in order. */
std::vector<EventClass> classify(const Trace& trace, const Boundary& boundary);

/** True if a send message is an I/O request (a sink-only notification). */
bool is_io_request(const Term& msg);

/** Project the external stimuli of 'trace' to (target, payload), in order. */
std::vector<Stimulus> extract_stimuli(const Trace& trace, const Boundary& boundary);

/** True iff 'candidate' is obtainable from 'original' by deletions. */
bool is_subsequence(std::span<const Stimulus> candidate, std::span<const Stimulus> original);

/**
 * Parse the tuple-style tracer output: a comma/newline separated sequence of
 * {trace_ts, Pid, Kind, Args..., Ts} (or {trace, Pid, Kind, Args...}),
 * optionally wrapped in [ ]. A trailing "..." marks a truncated capture.
 */
Trace parse_raw(std::string_view text);

/** seq TAB ts TAB pid TAB kind TAB payload, one event per line. */
std::string render_canonical(const Trace& trace);
Trace parse_canonical(std::string_view text);

/** Either format, chosen by the first non-comment character. */
Trace parse_trace(std::string_view text);

/** One {target,payload} term per line. */
std::string render_stimuli(std::span<const Stimulus> stimuli);
std::vector<Stimulus> parse_stimuli(std::string_view text);

}  // namespace tracemin
