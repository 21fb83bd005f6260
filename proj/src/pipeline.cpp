#include "tracemin/pipeline.hpp"

#include <algorithm>

namespace tracemin {

std::string_view
to_string(Strategy s)
{
  return s == Strategy::DDMIN ? "ddmin" : "foreach";
}

std::optional<Strategy>
strategy_from_string(std::string_view s)
{
  if (s == "ddmin") return Strategy::DDMIN;
  if (s == "foreach") return Strategy::FOREACH;
  return std::nullopt;
}

Trace
record_library_run(const std::vector<Stimulus>& stimuli, std::uint64_t seed)
{
  LibrarySystem sys;
  ReplayConfig cfg;
  cfg.seed = seed;
  return replay(sys, MockEnvironment{}, stimuli, cfg).trace;
}

std::optional<PipelineResult>
simplify_trace(const Trace& trace,
               const std::vector<ContractAutomaton>& contracts,
               const PipelineConfig& cfg)
{
  MonitorReport report = run(contracts, trace);
  if (!report.violation) return std::nullopt;

  PipelineResult res;
  res.target   = *report.violation;
  res.original = extract_stimuli(trace, cfg.boundary);
  res.used     = cfg.strategy;

  auto contract = std::find_if(contracts.begin(), contracts.end(), [&](const auto& c) {
    return c.id == res.target.automaton_id;
  });
  if (res.used == Strategy::FOREACH && !contract->foreach)
  {
    res.warnings.push_back("contract " + contract->id + " has no foreach clause; using ddmin");
    res.used = Strategy::DDMIN;
  }

  OracleConfig ocfg;
  ocfg.replays   = cfg.replays;
  ocfg.seed_base = cfg.seed;
  ocfg.target    = res.target;
  ReplayConfig rcfg;
  rcfg.seed       = cfg.seed;
  rcfg.boundary   = cfg.boundary;
  rcfg.max_events = cfg.max_events;

  LibrarySystem prototype(cfg.nondeterministic);
  ReplayOracle oracle(prototype, capture(trace, cfg.boundary), contracts, ocfg, rcfg);
  res.result = res.used == Strategy::FOREACH ? foreach_ddmin(res.original, *contract, oracle)
                                             : ddmin(res.original, oracle);
  if (res.result.stats.warnings > 0)
  {
    res.warnings.push_back(std::to_string(res.result.stats.warnings)
                           + " replays exceeded the event budget");
  }
  return res;
}

}  // namespace tracemin
