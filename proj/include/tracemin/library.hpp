#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tracemin/contract.hpp"
#include "tracemin/replay.hpp"

namespace tracemin {

/**
 * Simulated library service.
 *
 * Processes: the library server <0.35.0> (registered 'library'), a book
 * database <0.36.0> ('db') unless the boundary makes it environment, and one
 * handler per client from <0.38.0> on, registered under the client's name.
 * The user's I/O server <0.23.0> is always environment.
 *
 * Stimuli:
 *   {library,{newClient,C}}   spawn a handler for C unless C is registered
 *   {library,{addBook,B}}     one more copy of B; the library stores B in db
 *   {C,{borrowBook,B}}        lend a copy of B to C if one is available
 *   {C,{returnBook,B}}        put a copy of B back, whether C holds it or not
 *   {C,{borrowBook,B,X}}      as above, on behalf of name X
 *   {C,{returnBook,B,X}}
 * Stimuli addressed to unknown processes are dropped. The system never
 * enforces the library contracts.
 *
 * In nondeterministic mode the scheduler picks a random runnable process and
 * a stimulus may be delayed past the next one.
 */
class LibrarySystem : public CapturedSystem
{
 public:
  explicit LibrarySystem(bool nondeterministic = false);

  Traits traits() const override;
  void reset(std::uint64_t seed, EnvironmentPort& env, EventSink& sink) override;
  void inject(const Stimulus& s, EnvironmentPort& env, EventSink& sink) override;
  void drain(EnvironmentPort& env, EventSink& sink) override;
  void finish(EnvironmentPort& env, EventSink& sink) override;
  std::optional<Term> live_call(const std::string& ref, const Term& request) override;
  void live_notify(const std::string& ref, const Term& msg) override;
  std::unique_ptr<CapturedSystem> clone() const override;

  /** Available copies per title. */
  const std::map<Term, std::int64_t>& catalog() const { return d_catalog; }
  /** Titles on loan per client name. */
  std::map<Term, std::map<Term, std::int64_t>> loans() const;
  /** Registered client names. */
  std::vector<Term> clients() const;
  /** available + on loan == added + injected by unmatched returns, per title. */
  bool conserved() const;
  /** Calls and notifications that reached the live environment. */
  std::size_t live_calls() const { return d_live_calls; }
  /** Canonical rendering of the whole state (deterministic mode). */
  std::string state_key() const;

 private:
  enum class Role
  {
    LIBRARY,
    DB,
    CLIENT
  };
  struct Message
  {
    Pid from;
    Term msg;
  };
  struct Process
  {
    Pid pid;
    Role role = Role::CLIENT;
    Term name;
    std::deque<Message> mailbox;
    /** Selective receive: only messages with this tag are taken. */
    std::optional<std::string> awaiting;
    bool blocked = false;
    std::map<Term, std::int64_t> loans;
  };

  Process* find(const Pid& pid);
  Process* resolve(const Term& target);
  bool runnable(const Process& p) const;
  void deliver(const Stimulus& s, EventSink& sink);
  void send(Process& from, const Term& to_term, Process* to, Term msg, EventSink& sink);
  void run_once(Process& p, EnvironmentPort& env, EventSink& sink);
  void library_handle(Process& p, const Message& m, EnvironmentPort& env, EventSink& sink);
  void client_handle(Process& p, const Message& m, EnvironmentPort& env, EventSink& sink);
  void db_handle(Process& p, const Message& m, EventSink& sink);
  std::uint64_t draw(std::uint64_t bound);

  bool d_nondeterministic;
  std::mt19937_64 d_rng;
  std::map<Pid, Process> d_procs;
  std::map<Term, Pid> d_registry;
  std::uint32_t d_next_pid = 38;
  std::map<Term, std::int64_t> d_catalog;
  std::map<Term, std::int64_t> d_added;
  std::map<Term, std::int64_t> d_injected;
  std::vector<Stimulus> d_held;
  // Live environment (mode B only).
  std::map<Term, std::int64_t> d_live_db;
  std::size_t d_live_calls = 0;
};

/** Deliver one stimulus to 'sys' and drain, returning the emitted events. */
Trace library_step(LibrarySystem& sys, const Stimulus& s);

/** The four library contracts in DSL form. */
std::string_view library_contract_text();
/** same_book, library_user and client_identity, in that order. */
std::vector<ContractAutomaton> library_contracts();

/* -------------------------------------------------------------------------- */

enum class ScenarioKind
{
  SAME_BOOK_TWICE,
  MORE_THAN_FOUR,
  DIFFERENT_CLIENT,
  RETURN_WRONG
};

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_from_string(std::string_view s);
/** Automaton and bad state each scenario violates. */
std::string_view target_automaton(ScenarioKind k);
std::string_view target_bad_state(ScenarioKind k);
/** Length of the violating core the generator pads around. */
std::size_t core_length(ScenarioKind k);

struct Scenario
{
  ScenarioKind kind = ScenarioKind::RETURN_WRONG;
  std::size_t target_stimuli = 0;
  std::uint64_t seed = 0;
};

/**
 * A stimulus list of exactly target_stimuli entries ending in a violation of
 * the scenario's contract: a violating core interleaved with legal decoy
 * activity. Checked by replay before returning. Throws TargetTooSmall.
 */
std::vector<Stimulus> generate(const Scenario& scenario);

/** The eight configurations of the shrinking benchmark, seed 0. */
std::vector<Scenario> benchmark_grid();

/** The case-study stimulus list (11 entries). */
std::vector<Stimulus> case_study_stimuli();

}  // namespace tracemin
