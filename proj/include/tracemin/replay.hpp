#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tracemin/trace.hpp"

namespace tracemin {

/** 2012-06-16 10:32:27.273 UTC, the first timestamp of the case-study capture. */
inline constexpr std::int64_t k_replay_epoch_micros = 1339842747273000;

/**
 * Collects events emitted during a replay, assigning contiguous seq numbers
 * and fabricated, strictly increasing timestamps. Emission stops silently at
 * the cap and the sink is marked truncated.
 */
class EventSink
{
 public:
  explicit EventSink(std::size_t max_events = 100000,
                     std::int64_t base_micros = k_replay_epoch_micros);

  void emit(const Pid& pid, EventKind kind, Term payload);

  bool truncated() const { return d_truncated; }
  std::size_t size() const { return d_trace.size(); }
  const Trace& trace() const { return d_trace; }
  Trace take() { return std::move(d_trace); }

 private:
  Trace d_trace;
  std::size_t d_max;
  std::int64_t d_base;
  bool d_truncated = false;
};

/** How a simulated system reaches processes outside its boundary. */
class EnvironmentPort
{
 public:
  virtual ~EnvironmentPort() = default;

  virtual bool is_environment(const std::string& ref) const = 0;
  /** One-way message (e.g. an io_request) to an environment process. */
  virtual void notify(const std::string& ref, const Term& msg) = 0;
  /** Request/response; nullopt means no answer will ever come. */
  virtual std::optional<Term> call(const std::string& ref, const Term& request) = 0;
};

/**
 * A replay target. The harness drives it with reset, then alternating
 * inject/drain, then finish.
 */
class CapturedSystem
{
 public:
  struct Traits
  {
    bool nondeterministic = false;
    bool resettable       = true;
    bool deterministic    = true;
    bool side_effect_free = true;

    /** Mode B is only allowed against such systems. */
    bool allows_live_environment() const
    {
      return resettable && deterministic && side_effect_free;
    }
  };

  virtual ~CapturedSystem() = default;

  virtual Traits traits() const = 0;
  virtual void reset(std::uint64_t seed, EnvironmentPort& env, EventSink& sink) = 0;
  virtual void inject(const Stimulus& s, EnvironmentPort& env, EventSink& sink) = 0;
  /** Run until no process can make progress. */
  virtual void drain(EnvironmentPort& env, EventSink& sink) = 0;
  /** End of input: release anything held back, then drain. */
  virtual void finish(EnvironmentPort& env, EventSink& sink) { drain(env, sink); }

  /** The real environment's answer, used in mode B. */
  virtual std::optional<Term> live_call(const std::string& ref, const Term& request) = 0;
  virtual void live_notify(const std::string& ref, const Term& msg) = 0;

  virtual std::unique_ptr<CapturedSystem> clone() const = 0;
};

struct RecordedResponse
{
  /** Head of the request this answers ("" if unknown). */
  std::string request;
  Term response;

  bool operator==(const RecordedResponse&) const = default;
};

/** Environment responses recorded from a capture, per environment process. */
struct MockEnvironment
{
  std::map<std::string, std::vector<RecordedResponse>> recorded;
  MockOption mode = MockOption::A;

  bool covers(const std::string& ref) const { return recorded.count(ref) > 0; }
  /** All responses of 'ref' in capture order. */
  std::vector<Term> responses(const std::string& ref) const;
  /** Responses of 'ref' to requests with head 'request', in capture order. */
  std::vector<Term> responses(const std::string& ref, const std::string& request) const;
};

/** Tag of a request message, used to key recorded responses. */
std::string request_head(const Term& msg);

MockEnvironment capture(const Trace& trace, const Boundary& boundary);

/** Union of the mocked sets; mode unchanged. */
Boundary shift_boundary(const Boundary& boundary, const std::set<std::string>& add_mocked);

struct ReplayConfig
{
  std::uint64_t seed = 0;
  Boundary boundary  = default_boundary();
  std::size_t max_events = 100000;
};

struct ReplayOutcome
{
  Trace trace;
  /** max_events was reached and the trace is truncated. */
  bool budget_exceeded = false;
  /** Interactions forwarded to the live environment (always 0 in mode A). */
  std::size_t live_interactions = 0;
  /** Mocked calls that found no recorded response and blocked. */
  std::size_t mock_misses = 0;
};

/**
 * Reset 'system' and replay 'stimuli' against it. In mode A every
 * environment interaction is answered from 'mock'; an exhausted response
 * list leaves the caller blocked. Throws std::invalid_argument for mode B
 * against a system that does not allow it.
 */
ReplayOutcome replay(CapturedSystem& system,
                     const MockEnvironment& mock,
                     std::span<const Stimulus> stimuli,
                     const ReplayConfig& cfg);

}  // namespace tracemin
