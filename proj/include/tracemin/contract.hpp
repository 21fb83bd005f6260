#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "tracemin/term.hpp"
#include "tracemin/trace.hpp"

namespace tracemin {

/* -------------------------------------------------------------------------- */
/* Patterns                                                                    */
/* -------------------------------------------------------------------------- */

using Bindings = std::map<std::string, Term>;

/**
 * A term with holes: '_' matches anything, an uppercase variable binds on
 * first occurrence and must be equal on later ones.
 */
class Pattern
{
 public:
  struct Wildcard
  {
  };
  struct Variable
  {
    std::string name;
  };
  struct Compound
  {
    bool is_tuple = true;
    std::vector<Pattern> elements;
  };

  Pattern() : d_node(Wildcard{}) {}
  static Pattern wildcard() { return Pattern(); }
  static Pattern variable(std::string name);
  static Pattern literal(Term t);
  static Pattern tuple(std::vector<Pattern> elems);
  static Pattern list(std::vector<Pattern> elems);
  /** f(a, b) is sugar for {f, a, b}. */
  static Pattern call(std::string functor, std::vector<Pattern> args);

  bool is_wildcard() const { return std::holds_alternative<Wildcard>(d_node); }
  const Variable* as_variable() const { return std::get_if<Variable>(&d_node); }
  const Term* as_literal() const { return std::get_if<Term>(&d_node); }
  const Compound* as_compound() const { return std::get_if<Compound>(&d_node); }

  /** Extend 'b' so that this pattern equals 't'. 'b' is untouched on failure. */
  bool match(const Term& t, Bindings& b) const;
  /** Substitute bindings; nullopt if a wildcard or unbound variable remains. */
  std::optional<Term> instantiate(const Bindings& b) const;
  /** Variable names in order of first occurrence, duplicates included. */
  void collect_variables(std::vector<std::string>& out) const;
  /** Could some term match both patterns (variables treated as fresh)? */
  bool unifiable_with(const Pattern& other) const;

  std::string to_string() const;

 private:
  bool match_impl(const Term& t, Bindings& b) const;

  std::variant<Wildcard, Variable, Term, Compound> d_node;
};

enum class EventSelector
{
  STIMULUS,
  ENV_INTERACTION,
  SYSTEM_ACTION,
  RECEIVE,
  SEND,
  SPAWN,
  REGISTER,
  LINK,
  IO,
  CALL,
  RETURN,
  ANY
};

std::string_view to_string(EventSelector s);
std::optional<EventSelector> event_selector_from_string(std::string_view s);

/**
 * The pattern half of a transition, 'selector(subject, payload)'.
 *
 * Subject and payload are matched against a per-kind view of the event:
 *   spawn     subject = spawned module, payload = {Function, Args...}
 *   send      subject = sender, payload = message (destination ignored)
 *   stimulus  subject = receiving process, payload = message
 *   other     subject = acting process, payload = event payload
 * Processes are seen by registered name when one is known.
 */
struct EventPattern
{
  EventSelector selector = EventSelector::ANY;
  Pattern subject;
  Pattern payload;

  /** Variables bound by this pattern. */
  std::vector<std::string> variables() const;
  std::string to_string() const;
};

/** What a pattern is matched against. */
struct EventView
{
  EventClass cls = EventClass::SYSTEM_ACTION;
  std::optional<EventKind> kind;  // empty for a bare Stimulus
  Term subject;
  Term payload;
};

/** Build the match view of an event; 'actor' is the resolved actor name. */
EventView make_view(const Event& ev, EventClass cls, const Term& actor);
EventView make_view(const Stimulus& s);

bool selector_admits(EventSelector sel, const EventView& view);
bool match(const EventPattern& p, const EventView& view, Bindings& b);

/* -------------------------------------------------------------------------- */
/* Store, conditions, actions                                                  */
/* -------------------------------------------------------------------------- */

using TermSet = std::set<Term>;
using Value   = std::variant<std::int64_t, TermSet>;
using Store   = std::map<std::string, Value>;

struct VarDecl
{
  enum class Type
  {
    INT,
    SET
  };
  std::string name;
  Type type             = Type::INT;
  std::int64_t initial  = 0;
};

/** Integer literal or integer variable. */
struct IntOperand
{
  std::variant<std::int64_t, std::string> value;
};

/** operand, operand + operand or operand - operand. */
struct IntExpr
{
  IntOperand lhs;
  char op = 0;
  IntOperand rhs;
};

enum class CmpOp
{
  EQ,
  NE,
  LT,
  LE,
  GT,
  GE
};

class Condition
{
 public:
  enum class Kind
  {
    LITERAL,
    NOT,
    AND,
    OR,
    COMPARE,
    CONTAINS
  };

  Condition() = default;

  static Condition literal(bool value);
  static Condition always() { return literal(true); }
  static Condition negate(Condition c);
  static Condition conjunction(Condition a, Condition b);
  static Condition disjunction(Condition a, Condition b);
  static Condition compare(IntExpr lhs, CmpOp op, IntExpr rhs);
  static Condition contains(std::string set_var, Pattern element);

  Kind kind() const { return d_kind; }
  bool literal_value() const { return d_value; }
  const std::vector<Condition>& operands() const { return d_operands; }
  const IntExpr& lhs() const { return d_lhs; }
  const IntExpr& rhs() const { return d_rhs; }
  CmpOp cmp() const { return d_cmp; }
  const std::string& set_var() const { return d_set; }
  const Pattern& element() const { return d_element; }

  bool is_literally_true() const { return d_kind == Kind::LITERAL && d_value; }
  /** Total: undeclared or mistyped variables read as 0 / the empty set. */
  bool evaluate(const Store& store, const Bindings& b) const;
  std::string to_string() const;

 private:
  Kind d_kind  = Kind::LITERAL;
  bool d_value = true;
  std::vector<Condition> d_operands;
  IntExpr d_lhs;
  CmpOp d_cmp = CmpOp::EQ;
  IntExpr d_rhs;
  std::string d_set;
  Pattern d_element;
};

struct Statement
{
  enum class Op
  {
    SKIP,
    ASSIGN,
    ADD_ASSIGN,
    SUB_ASSIGN,
    SET_INSERT,
    SET_REMOVE
  };
  Op op = Op::SKIP;
  std::string var;
  IntExpr expr;     // integer ops
  Pattern element;  // set ops
};

struct Action
{
  std::vector<Statement> stmts;

  static Action skip() { return {}; }
  void apply(Store& store, const Bindings& b) const;
  std::string to_string() const;
};

/* -------------------------------------------------------------------------- */
/* Automata                                                                    */
/* -------------------------------------------------------------------------- */

struct Transition
{
  std::string from;
  std::string to;
  EventPattern on;
  Condition when;
  Action action;
  /** 1-based source line, 0 when built programmatically. */
  std::size_t line = 0;
};

struct AttributionRule
{
  EventPattern pattern;
  std::string key_var;
};

/**
 * Foreach replication: a replica is launched for every event matching
 * 'spawn', keyed by the value bound to 'key_var'. 'attribution' maps
 * stimuli to replica keys for group-wise minimization.
 */
struct ForeachSpec
{
  EventPattern spawn;
  std::string key_var;
  std::vector<AttributionRule> attribution;

  /** Instance key a stimulus belongs to, if any rule claims it. */
  std::optional<Term> attribute(const Stimulus& s) const;
};

struct ContractAutomaton
{
  std::string id;
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> bad;
  std::vector<VarDecl> vars;
  std::vector<Transition> transitions;
  std::optional<ForeachSpec> foreach;

  bool has_state(const std::string& s) const;
  bool is_bad(const std::string& s) const;
  const VarDecl* var(const std::string& name) const;
  Store initial_store() const;
};

struct MonitorState
{
  std::string current;
  Store store;
  std::optional<Term> instance_key;

  bool operator==(const MonitorState&) const = default;
};

MonitorState initial_state(const ContractAutomaton& a,
                           std::optional<Term> key = std::nullopt);

struct Diagnostic
{
  enum class Severity
  {
    ERROR,
    WARNING
  };
  Severity severity = Severity::ERROR;
  std::string message;

  bool is_error() const { return severity == Severity::ERROR; }
};

/** Static checks; an empty result means the automaton is well formed. */
std::vector<Diagnostic> validate(const ContractAutomaton& automaton);

bool has_errors(const std::vector<Diagnostic>& diags);

struct StepResult
{
  enum class Kind
  {
    UNCHANGED,
    MOVED,
    VIOLATED
  };
  Kind kind = Kind::UNCHANGED;
  MonitorState state;
  /** Bad state reached when kind == VIOLATED. */
  std::string bad_state;
};

/**
 * Offer one event to one automaton instance. Throws AmbiguousMatch if more
 * than one enabled transition matches.
 */
StepResult step(const ContractAutomaton& automaton,
                const MonitorState& state,
                const EventView& event);

/** Convenience overload resolving the actor by pid only. */
StepResult step(const ContractAutomaton& automaton,
                const MonitorState& state,
                const Event& event);

/** A fresh replica if 'event' matches the spawn pattern. */
std::optional<MonitorState> spawn_replica(const ForeachSpec& spec,
                                          const ContractAutomaton& automaton,
                                          const EventView& event);
std::optional<MonitorState> spawn_replica(const ForeachSpec& spec,
                                          const ContractAutomaton& automaton,
                                          const Event& event);

}  // namespace tracemin
