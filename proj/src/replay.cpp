#include "tracemin/replay.hpp"

#include <stdexcept>

namespace tracemin {

EventSink::EventSink(std::size_t max_events, std::int64_t base_micros)
    : d_max(max_events), d_base(base_micros)
{
  if (d_max == 0) throw std::invalid_argument("max_events must be positive");
}

void
EventSink::emit(const Pid& pid, EventKind kind, Term payload)
{
  if (d_trace.size() >= d_max)
  {
    d_truncated = true;
    return;
  }
  Event ev;
  ev.seq     = d_trace.size();
  ev.pid     = pid;
  ev.kind    = kind;
  ev.payload = std::move(payload);
  ev.ts      = Timestamp::from_micros(d_base + static_cast<std::int64_t>(ev.seq));
  d_trace.events.push_back(std::move(ev));
}

/* -------------------------------------------------------------------------- */

std::vector<Term>
MockEnvironment::responses(const std::string& ref) const
{
  std::vector<Term> out;
  auto it = recorded.find(ref);
  if (it == recorded.end()) return out;
  for (const RecordedResponse& r : it->second) out.push_back(r.response);
  return out;
}

std::vector<Term>
MockEnvironment::responses(const std::string& ref, const std::string& request) const
{
  std::vector<Term> out;
  auto it = recorded.find(ref);
  if (it == recorded.end()) return out;
  for (const RecordedResponse& r : it->second)
    if (r.request == request) out.push_back(r.response);
  return out;
}

std::string
request_head(const Term& msg)
{
  std::string head(msg.tag());
  if (head.empty()) head = msg.is_atom() ? msg.as_atom() : msg.to_string();
  return head;
}

MockEnvironment
capture(const Trace& trace, const Boundary& boundary)
{
  MockEnvironment mock;
  mock.mode = boundary.mode;
  Classifier cls(boundary);
  for (const Event& ev : trace.events)
  {
    Classifier::Result r = cls.classify(ev);
    if (r.cls != EventClass::ENVIRONMENT_INTERACTION || !r.peer) continue;
    bool actor_mocked =
        boundary.mocks(Term(ev.pid).to_string()) || boundary.mocks(cls.ref_of(ev.pid));
    if (actor_mocked) continue;  // the environment's own bookkeeping

    if (ev.kind == EventKind::SEND)
    {
      mock.recorded[*r.peer];
    }
    else if (ev.kind == EventKind::RECEIVE)
    {
      mock.recorded[*r.peer].push_back({r.request.value_or(""), ev.payload});
    }
  }
  return mock;
}

Boundary
shift_boundary(const Boundary& boundary, const std::set<std::string>& add_mocked)
{
  Boundary b = boundary;
  b.mocked.insert(add_mocked.begin(), add_mocked.end());
  return b;
}

/* -------------------------------------------------------------------------- */

namespace {

class HarnessPort : public EnvironmentPort
{
 public:
  HarnessPort(const MockEnvironment& mock, const Boundary& boundary, CapturedSystem& system)
      : d_mock(mock), d_boundary(boundary), d_system(system)
  {
  }

  bool is_environment(const std::string& ref) const override { return d_boundary.mocks(ref); }

  void notify(const std::string& ref, const Term& msg) override
  {
    if (d_boundary.mode == MockOption::B)
    {
      ++d_live;
      d_system.live_notify(ref, msg);
    }
  }

  std::optional<Term> call(const std::string& ref, const Term& request) override
  {
    if (d_boundary.mode == MockOption::B)
    {
      ++d_live;
      return d_system.live_call(ref, request);
    }
    std::string head = request_head(request);
    auto it          = d_mock.recorded.find(ref);
    if (it != d_mock.recorded.end())
    {
      std::size_t& cursor = d_cursor[{ref, head}];
      const auto& list    = it->second;
      while (cursor < list.size())
      {
        const RecordedResponse& r = list[cursor++];
        if (r.request == head || r.request.empty()) return r.response;
      }
    }
    ++d_misses;
    return std::nullopt;
  }

  std::size_t live() const { return d_live; }
  std::size_t misses() const { return d_misses; }

 private:
  const MockEnvironment& d_mock;
  const Boundary& d_boundary;
  CapturedSystem& d_system;
  std::map<std::pair<std::string, std::string>, std::size_t> d_cursor;
  std::size_t d_live   = 0;
  std::size_t d_misses = 0;
};

}  // namespace

ReplayOutcome
replay(CapturedSystem& system,
       const MockEnvironment& mock,
       std::span<const Stimulus> stimuli,
       const ReplayConfig& cfg)
{
  if (cfg.boundary.mode == MockOption::B && !system.traits().allows_live_environment())
    throw std::invalid_argument(
        "mode B requires a resettable, deterministic, side-effect-free system");

  EventSink sink(cfg.max_events);
  HarnessPort port(mock, cfg.boundary, system);

  system.reset(cfg.seed, port, sink);
  system.drain(port, sink);
  for (const Stimulus& s : stimuli)
  {
    if (sink.truncated()) break;
    system.inject(s, port, sink);
    system.drain(port, sink);
  }
  if (!sink.truncated()) system.finish(port, sink);

  ReplayOutcome out;
  out.budget_exceeded   = sink.truncated();
  out.trace             = sink.take();
  out.live_interactions = port.live();
  out.mock_misses       = port.misses();
  return out;
}

}  // namespace tracemin
