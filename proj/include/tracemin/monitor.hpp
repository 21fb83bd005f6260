#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracemin/contract.hpp"
#include "tracemin/trace.hpp"

namespace tracemin {

struct Violation
{
  std::string automaton_id;
  std::string bad_state;
  std::optional<Term> instance_key;
  std::size_t at_seq = 0;
  /** Events up to and including the violating one. */
  Trace witness;
};

/** Same automaton and same bad state; instance and position are ignored. */
bool same_violation(const Violation& a, const Violation& b);

struct MonitorReport
{
  std::optional<Violation> violation;
  std::size_t steps_consumed = 0;

  bool violated() const { return violation.has_value(); }
};

/**
 * Incremental monitor over a fixed contract set.
 *
 * Events are offered in order to every live replica of every contract
 * (declaration order, then launch order); spawn-matching events then launch
 * new replicas. The first violation is latched and later events are ignored.
 */
class Monitor
{
 public:
  struct Instance
  {
    std::size_t contract = 0;
    MonitorState state;
  };

  explicit Monitor(std::vector<ContractAutomaton> contracts,
                   Boundary boundary = default_boundary());

  /**
   * Process one event. Returns the violation it caused, if any (witness left
   * empty; see run()). Throws AmbiguousMatch.
   */
  std::optional<Violation> feed(const Event& ev);

  bool violated() const { return d_violation.has_value(); }
  const std::optional<Violation>& violation() const { return d_violation; }
  std::size_t steps() const { return d_steps; }
  const std::vector<Instance>& instances() const { return d_instances; }
  const std::vector<ContractAutomaton>& contracts() const { return *d_contracts; }

  /** Rendering of every instance state, for search deduplication. */
  std::string state_key() const;

 private:
  std::shared_ptr<const std::vector<ContractAutomaton>> d_contracts;
  Classifier d_classifier;
  std::vector<Instance> d_instances;
  std::optional<Violation> d_violation;
  std::size_t d_steps = 0;
};

MonitorReport run(const std::vector<ContractAutomaton>& contracts,
                  const Trace& trace,
                  const Boundary& boundary = default_boundary());

/** "VIOLATION <automaton> <bad_state> instance=<term|-> at=<seq>" + witness, or "OK". */
std::string render_report(const MonitorReport& report);

}  // namespace tracemin
