#include "tracemin/trace.hpp"

namespace tracemin {

Boundary
default_boundary()
{
  Boundary b;
  b.mocked = {"user", "<0.23.0>"};
  b.mode   = MockOption::A;
  return b;
}

bool
is_io_request(const Term& msg)
{
  return msg.tag() == "io_request";
}

Term
Classifier::name_of(const Pid& pid) const
{
  auto it = d_names.find(pid);
  if (it != d_names.end()) return Term::atom(it->second);
  return Term(pid);
}

std::string
Classifier::ref_of(const Pid& pid) const
{
  auto it = d_names.find(pid);
  if (it != d_names.end()) return it->second;
  return Term(pid).to_string();
}

bool
Classifier::is_mocked_pid(const Pid& pid) const
{
  if (d_boundary.mocks(Term(pid).to_string())) return true;
  auto it = d_names.find(pid);
  return it != d_names.end() && d_boundary.mocks(it->second);
}

std::optional<Pid>
Classifier::resolve(const Term& dest) const
{
  if (dest.is_pid()) return dest.as_pid();
  if (dest.is_atom())
  {
    auto it = d_pids.find(dest.as_atom());
    if (it != d_pids.end()) return it->second;
  }
  return std::nullopt;
}

std::string
Classifier::ref_of_term(const Term& dest) const
{
  if (dest.is_pid()) return ref_of(dest.as_pid());
  if (dest.is_atom()) return dest.as_atom();
  return dest.to_string();
}

Classifier::Result
Classifier::classify(const Event& ev)
{
  Result res;

  if (ev.kind == EventKind::REGISTER && ev.payload.is_atom())
  {
    d_names[ev.pid]                 = ev.payload.as_atom();
    d_pids[ev.payload.as_atom()]    = ev.pid;
  }

  bool actor_mocked = is_mocked_pid(ev.pid);

  switch (ev.kind)
  {
    case EventKind::SEND:
    {
      if (!ev.payload.is_tuple() || ev.payload.elements().size() != 2) break;
      const Term& msg  = ev.payload.elements()[0];
      const Term& dest = ev.payload.elements()[1];
      auto dest_pid    = resolve(dest);
      std::string dest_ref = ref_of_term(dest);
      bool dest_mocked =
          d_boundary.mocks(dest_ref) || (dest_pid && is_mocked_pid(*dest_pid));

      if (dest_pid) d_in_flight[*dest_pid].push_back({ev.pid, msg});

      // A request to a process we never see acting is answered by an
      // untraced reply; remember it so the reply is not taken for a stimulus.
      bool untraced_dest = !dest_pid && dest.is_atom();
      if (!is_io_request(msg) && (dest_mocked || untraced_dest))
      {
        std::string head(msg.tag());
        if (head.empty()) head = msg.is_atom() ? msg.as_atom() : msg.to_string();
        d_calls[ev.pid].push_back({dest_ref, head});
      }
      if (actor_mocked || dest_mocked || is_io_request(msg))
      {
        res.cls  = EventClass::ENVIRONMENT_INTERACTION;
        res.peer = actor_mocked ? ref_of(ev.pid) : dest_ref;
      }
      return res;
    }
    case EventKind::RECEIVE:
    {
      if (actor_mocked)
      {
        res.cls  = EventClass::ENVIRONMENT_INTERACTION;
        res.peer = ref_of(ev.pid);
        return res;
      }
      auto& calls = d_calls[ev.pid];
      auto& queue = d_in_flight[ev.pid];
      for (auto it = queue.begin(); it != queue.end(); ++it)
      {
        if (!(it->msg == ev.payload)) continue;
        Pid sender = it->from;
        queue.erase(it);
        std::string sender_ref = ref_of(sender);
        for (auto c = calls.begin(); c != calls.end(); ++c)
        {
          if (c->to == sender_ref)
          {
            res.request = c->head;
            calls.erase(c);
            break;
          }
        }
        if (is_mocked_pid(sender))
        {
          res.cls  = EventClass::ENVIRONMENT_INTERACTION;
          res.peer = sender_ref;
        }
        return res;
      }
      if (!calls.empty())
      {
        OutstandingCall call = calls.front();
        calls.erase(calls.begin());
        res.request = call.head;
        if (d_boundary.mocks(call.to))
        {
          res.cls  = EventClass::ENVIRONMENT_INTERACTION;
          res.peer = call.to;
        }
        return res;
      }
      res.cls = EventClass::EXTERNAL_STIMULUS;
      return res;
    }
    case EventKind::IO:
      res.cls  = EventClass::ENVIRONMENT_INTERACTION;
      res.peer = ref_of(ev.pid);
      return res;
    case EventKind::CALL:
    case EventKind::RETURN:
    {
      // {Module, Function, Args}: crossing the boundary when the module (or
      // the actor) is environment.
      const Term& p = ev.payload;
      if (p.is_tuple() && !p.elements().empty() && p.elements()[0].is_atom()
          && d_boundary.mocks(p.elements()[0].as_atom()))
      {
        res.cls  = EventClass::ENVIRONMENT_INTERACTION;
        res.peer = p.elements()[0].as_atom();
        return res;
      }
      break;
    }
    case EventKind::LINK:
      if (ev.payload.is_pid() && is_mocked_pid(ev.payload.as_pid()))
      {
        res.cls  = EventClass::ENVIRONMENT_INTERACTION;
        res.peer = ref_of(ev.payload.as_pid());
        return res;
      }
      break;
    case EventKind::SPAWN:
    case EventKind::REGISTER: break;
  }

  if (actor_mocked)
  {
    res.cls  = EventClass::ENVIRONMENT_INTERACTION;
    res.peer = ref_of(ev.pid);
  }
  return res;
}

EventClass
classify(const Event& event, const Boundary& boundary)
{
  Classifier c(boundary);
  return c.classify(event).cls;
}

std::vector<EventClass>
classify(const Trace& trace, const Boundary& boundary)
{
  Classifier c(boundary);
  std::vector<EventClass> out;
  out.reserve(trace.size());
  for (const Event& ev : trace.events) out.push_back(c.classify(ev).cls);
  return out;
}

std::vector<Stimulus>
extract_stimuli(const Trace& trace, const Boundary& boundary)
{
  Classifier c(boundary);
  std::vector<Stimulus> out;
  for (const Event& ev : trace.events)
  {
    if (c.classify(ev).cls == EventClass::EXTERNAL_STIMULUS)
      out.push_back(Stimulus{c.name_of(ev.pid), ev.payload});
  }
  return out;
}

}  // namespace tracemin
