#include "tracemin/monitor.hpp"

#include <sstream>

namespace tracemin {

bool
same_violation(const Violation& a, const Violation& b)
{
  return a.automaton_id == b.automaton_id && a.bad_state == b.bad_state;
}

Monitor::Monitor(std::vector<ContractAutomaton> contracts, Boundary boundary)
    : d_contracts(std::make_shared<const std::vector<ContractAutomaton>>(std::move(contracts))),
      d_classifier(std::move(boundary))
{
  for (std::size_t i = 0; i < d_contracts->size(); ++i)
  {
    const ContractAutomaton& a = (*d_contracts)[i];
    if (!a.foreach) d_instances.push_back({i, initial_state(a)});
  }
}

std::optional<Violation>
Monitor::feed(const Event& ev)
{
  if (d_violation) return std::nullopt;
  ++d_steps;

  Classifier::Result cls = d_classifier.classify(ev);
  EventView view         = make_view(ev, cls.cls, d_classifier.name_of(ev.pid));

  // Instances are kept in (declaration, launch) order so the first violation
  // found in a scan is the tie-break winner.
  for (std::size_t c = 0; c < d_contracts->size(); ++c)
  {
    const ContractAutomaton& a = (*d_contracts)[c];
    for (Instance& inst : d_instances)
    {
      if (inst.contract != c) continue;
      StepResult r = step(a, inst.state, view);
      if (r.kind == StepResult::Kind::UNCHANGED) continue;
      inst.state = std::move(r.state);
      if (r.kind == StepResult::Kind::VIOLATED)
      {
        Violation v;
        v.automaton_id = a.id;
        v.bad_state    = r.bad_state;
        v.instance_key = inst.state.instance_key;
        v.at_seq       = ev.seq;
        d_violation    = v;
        return v;
      }
    }
  }

  std::vector<Instance> launched;
  for (std::size_t c = 0; c < d_contracts->size(); ++c)
  {
    const ContractAutomaton& a = (*d_contracts)[c];
    if (!a.foreach) continue;
    if (auto replica = spawn_replica(*a.foreach, a, view))
      launched.push_back({c, std::move(*replica)});
  }
  for (Instance& inst : launched)
  {
    // Keep instances grouped by contract.
    auto pos = d_instances.begin();
    while (pos != d_instances.end() && pos->contract <= inst.contract) ++pos;
    d_instances.insert(pos, std::move(inst));
  }
  return std::nullopt;
}

std::string
Monitor::state_key() const
{
  std::ostringstream out;
  for (const Instance& inst : d_instances)
  {
    out << inst.contract << ':';
    if (inst.state.instance_key) out << *inst.state.instance_key;
    out << ':' << inst.state.current;
    for (const auto& [name, value] : inst.state.store)
    {
      out << ',' << name << '=';
      if (const auto* i = std::get_if<std::int64_t>(&value))
      {
        out << *i;
      }
      else
      {
        for (const Term& t : std::get<TermSet>(value)) out << t << ' ';
      }
    }
    out << ';';
  }
  return out.str();
}

MonitorReport
run(const std::vector<ContractAutomaton>& contracts, const Trace& trace, const Boundary& boundary)
{
  Monitor m(contracts, boundary);
  MonitorReport report;
  for (std::size_t i = 0; i < trace.size(); ++i)
  {
    if (auto v = m.feed(trace.events[i]))
    {
      v->witness             = trace.prefix(i + 1);
      report.violation       = std::move(v);
      report.steps_consumed  = i + 1;
      return report;
    }
  }
  report.steps_consumed = trace.size();
  return report;
}

std::string
render_report(const MonitorReport& report)
{
  if (!report.violation) return "OK\n";
  const Violation& v = *report.violation;
  std::ostringstream out;
  out << "VIOLATION " << v.automaton_id << ' ' << v.bad_state << " instance="
      << (v.instance_key ? v.instance_key->to_string() : std::string("-")) << " at=" << v.at_seq
      << '\n'
      << render_canonical(v.witness);
  return out.str();
}

}  // namespace tracemin
