#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tracemin/contract.hpp"
#include "tracemin/monitor.hpp"
#include "tracemin/replay.hpp"

namespace tracemin {

/** A violating run as the simpler-than relation sees it. */
struct ViolatingRun
{
  std::vector<Stimulus> stimuli;
  Violation violation;
};

/** Same bad state, and a's stimuli a strict subsequence of b's. */
bool simpler_than(const ViolatingRun& a, const ViolatingRun& b);

/**
 * "Does this stimulus list still reproduce the target violation?"
 *
 * Implementations count steps (replay invocations) and successful checks.
 */
class Oracle
{
 public:
  virtual ~Oracle() = default;

  virtual bool reproduces(const std::vector<Stimulus>& candidate) = 0;

  std::size_t steps() const { return d_steps; }
  std::size_t successes() const { return d_successes; }
  std::size_t warnings() const { return d_warnings; }

  /** Trace and violation of a reproducing candidate, if recorded. */
  virtual std::optional<std::pair<Trace, Violation>> witness(
      const std::vector<Stimulus>& candidate) const
  {
    (void)candidate;
    return std::nullopt;
  }

 protected:
  std::size_t d_steps     = 0;
  std::size_t d_successes = 0;
  std::size_t d_warnings  = 0;
};

/** One step per call; for tests and synthetic predicates. */
class PredicateOracle : public Oracle
{
 public:
  explicit PredicateOracle(std::function<bool(const std::vector<Stimulus>&)> pred)
      : d_pred(std::move(pred))
  {
  }

  bool reproduces(const std::vector<Stimulus>& candidate) override;

 private:
  std::function<bool(const std::vector<Stimulus>&)> d_pred;
};

struct OracleConfig
{
  /** Replays per candidate; a candidate reproduces if any replay does. */
  std::size_t replays = 1;
  std::uint64_t seed_base = 0;
  Violation target;
};

/**
 * Replays the captured system under a candidate and monitors the result.
 * Replay i of a candidate uses seed seed_base + i; the first reproduction
 * ends the check. Budget overruns count as non-reproduction plus a warning.
 */
class ReplayOracle : public Oracle
{
 public:
  ReplayOracle(const CapturedSystem& prototype,
               MockEnvironment mock,
               std::vector<ContractAutomaton> contracts,
               OracleConfig cfg,
               ReplayConfig replay_cfg = {});

  bool reproduces(const std::vector<Stimulus>& candidate) override;
  std::optional<std::pair<Trace, Violation>> witness(
      const std::vector<Stimulus>& candidate) const override;

  const OracleConfig& config() const { return d_cfg; }

 private:
  std::unique_ptr<CapturedSystem> d_system;
  MockEnvironment d_mock;
  std::vector<ContractAutomaton> d_contracts;
  OracleConfig d_cfg;
  ReplayConfig d_replay;
  std::map<std::vector<Term>, std::pair<Trace, Violation>> d_witnesses;
};

struct PassStats
{
  std::string name;
  std::size_t input  = 0;
  std::size_t output = 0;
  std::size_t steps  = 0;
  std::size_t successful_steps = 0;
};

struct SimplifyStats
{
  std::string strategy;
  std::size_t original_stimuli = 0;
  std::size_t final_stimuli    = 0;
  std::size_t steps            = 0;
  std::size_t successful_steps = 0;
  std::size_t warnings         = 0;
  std::vector<PassStats> passes;
};

struct SimplifyResult
{
  std::vector<Stimulus> stimuli;
  /** Empty when the oracle does not record witnesses. */
  Trace trace;
  std::optional<Violation> violation;
  SimplifyStats stats;
  /** Lengths of the accepted candidates, in order (starts with the input). */
  std::vector<std::size_t> accepted;
};

/**
 * Delta debugging over stimuli, followed by a check that no single stimulus
 * can be removed. Throws NotReproducible if the full list does not reproduce.
 */
SimplifyResult ddmin(const std::vector<Stimulus>& stimuli, Oracle& oracle);

/**
 * Two passes: ddmin over the Foreach instance groups (stimuli no attribution
 * rule claims are always kept), then plain ddmin over what remains.
 * Throws std::invalid_argument without a ForeachSpec, NotReproducible as ddmin.
 */
SimplifyResult foreach_ddmin(const std::vector<Stimulus>& stimuli,
                             const ContractAutomaton& contract,
                             Oracle& oracle);

/** Instance groups in order of first appearance; the ambient group is empty-keyed. */
struct StimulusGroups
{
  std::vector<std::size_t> ambient;
  std::vector<std::pair<Term, std::vector<std::size_t>>> instances;
};

StimulusGroups group_stimuli(const std::vector<Stimulus>& stimuli, const ForeachSpec& spec);

/** Versioned key=value rendering. */
std::string render_stats(const SimplifyStats& stats);
SimplifyStats parse_stats(std::string_view text);

}  // namespace tracemin
