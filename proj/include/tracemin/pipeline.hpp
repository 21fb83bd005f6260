#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tracemin/library.hpp"
#include "tracemin/monitor.hpp"
#include "tracemin/simplifier.hpp"

namespace tracemin {

enum class Strategy
{
  DDMIN,
  FOREACH
};

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

struct PipelineConfig
{
  Strategy strategy = Strategy::FOREACH;
  std::size_t replays = 1;
  std::uint64_t seed = 0;
  Boundary boundary = default_boundary();
  bool nondeterministic = false;
  std::size_t max_events = 100000;
};

struct PipelineResult
{
  Violation target;
  std::vector<Stimulus> original;
  SimplifyResult result;
  Strategy used = Strategy::FOREACH;
  std::vector<std::string> warnings;
};

/** Replay the library system under 'stimuli' (deterministic, default boundary). */
Trace record_library_run(const std::vector<Stimulus>& stimuli, std::uint64_t seed = 0);

/**
 * Monitor 'trace', then minimize its stimuli against the first violation by
 * replaying the library system. nullopt if the trace violates nothing.
 * Falls back to ddmin (with a warning) when the violated contract has no
 * Foreach clause. Throws NotReproducible.
 */
std::optional<PipelineResult> simplify_trace(const Trace& trace,
                                             const std::vector<ContractAutomaton>& contracts,
                                             const PipelineConfig& cfg);

}  // namespace tracemin
