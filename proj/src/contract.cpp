#include "tracemin/contract.hpp"

#include <algorithm>
#include <sstream>

#include "tracemin/errors.hpp"

namespace tracemin {

/* -------------------------------------------------------------------------- */

Pattern
Pattern::variable(std::string name)
{
  Pattern p;
  p.d_node = Variable{std::move(name)};
  return p;
}

Pattern
Pattern::literal(Term t)
{
  Pattern p;
  p.d_node = std::move(t);
  return p;
}

Pattern
Pattern::tuple(std::vector<Pattern> elems)
{
  Pattern p;
  p.d_node = Compound{true, std::move(elems)};
  return p;
}

Pattern
Pattern::list(std::vector<Pattern> elems)
{
  Pattern p;
  p.d_node = Compound{false, std::move(elems)};
  return p;
}

Pattern
Pattern::call(std::string functor, std::vector<Pattern> args)
{
  args.insert(args.begin(), literal(Term::atom(std::move(functor))));
  return tuple(std::move(args));
}

bool
Pattern::match(const Term& t, Bindings& b) const
{
  Bindings tmp = b;
  if (!match_impl(t, tmp)) return false;
  b = std::move(tmp);
  return true;
}

bool
Pattern::match_impl(const Term& t, Bindings& b) const
{
  if (is_wildcard()) return true;
  if (const Variable* v = as_variable())
  {
    auto [it, inserted] = b.emplace(v->name, t);
    return inserted || it->second == t;
  }
  if (const Term* lit = as_literal()) return *lit == t;

  const Compound& c = *as_compound();
  if (c.is_tuple ? !t.is_tuple() : !t.is_list()) return false;
  const auto& elems = t.elements();
  if (elems.size() != c.elements.size()) return false;
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (!c.elements[i].match_impl(elems[i], b)) return false;
  return true;
}

std::optional<Term>
Pattern::instantiate(const Bindings& b) const
{
  if (is_wildcard()) return std::nullopt;
  if (const Variable* v = as_variable())
  {
    auto it = b.find(v->name);
    if (it == b.end()) return std::nullopt;
    return it->second;
  }
  if (const Term* lit = as_literal()) return *lit;
  const Compound& c = *as_compound();
  std::vector<Term> elems;
  for (const Pattern& p : c.elements)
  {
    auto t = p.instantiate(b);
    if (!t) return std::nullopt;
    elems.push_back(std::move(*t));
  }
  return c.is_tuple ? Term::tuple(std::move(elems)) : Term::list(std::move(elems));
}

void
Pattern::collect_variables(std::vector<std::string>& out) const
{
  if (const Variable* v = as_variable()) out.push_back(v->name);
  if (const Compound* c = as_compound())
    for (const Pattern& p : c->elements) p.collect_variables(out);
}

bool
Pattern::unifiable_with(const Pattern& other) const
{
  if (is_wildcard() || as_variable() || other.is_wildcard() || other.as_variable())
    return true;
  if (as_literal() && other.as_literal()) return *as_literal() == *other.as_literal();
  if (as_literal()) return other.unifiable_with(*this);

  const Compound& c = *as_compound();
  if (const Term* lit = other.as_literal())
  {
    if (c.is_tuple ? !lit->is_tuple() : !lit->is_list()) return false;
    if (lit->elements().size() != c.elements.size()) return false;
    for (std::size_t i = 0; i < c.elements.size(); ++i)
      if (!c.elements[i].unifiable_with(literal(lit->elements()[i]))) return false;
    return true;
  }
  const Compound& d = *other.as_compound();
  if (c.is_tuple != d.is_tuple || c.elements.size() != d.elements.size()) return false;
  for (std::size_t i = 0; i < c.elements.size(); ++i)
    if (!c.elements[i].unifiable_with(d.elements[i])) return false;
  return true;
}

std::string
Pattern::to_string() const
{
  if (is_wildcard()) return "_";
  if (const Variable* v = as_variable()) return v->name;
  if (const Term* lit = as_literal()) return lit->to_string();
  const Compound& c = *as_compound();
  std::ostringstream out;
  std::size_t first = 0;
  if (c.is_tuple && !c.elements.empty() && c.elements[0].as_literal()
      && c.elements[0].as_literal()->is_atom())
  {
    out << c.elements[0].to_string() << '(';
    first = 1;
  }
  else
  {
    out << (c.is_tuple ? '{' : '[');
  }
  for (std::size_t i = first; i < c.elements.size(); ++i)
  {
    if (i > first) out << ", ";
    out << c.elements[i].to_string();
  }
  out << (first == 1 ? ')' : (c.is_tuple ? '}' : ']'));
  return out.str();
}

/* -------------------------------------------------------------------------- */

namespace {

constexpr std::pair<EventSelector, std::string_view> s_selector_names[] = {
    {EventSelector::STIMULUS, "stimulus"},
    {EventSelector::ENV_INTERACTION, "env_interaction"},
    {EventSelector::SYSTEM_ACTION, "system_action"},
    {EventSelector::RECEIVE, "receive"},
    {EventSelector::SEND, "send"},
    {EventSelector::SPAWN, "spawn"},
    {EventSelector::REGISTER, "register"},
    {EventSelector::LINK, "link"},
    {EventSelector::IO, "io"},
    {EventSelector::CALL, "call"},
    {EventSelector::RETURN, "return"},
    {EventSelector::ANY, "any"},
};

std::optional<EventKind>
kind_of(EventSelector s)
{
  switch (s)
  {
    case EventSelector::RECEIVE: return EventKind::RECEIVE;
    case EventSelector::SEND: return EventKind::SEND;
    case EventSelector::SPAWN: return EventKind::SPAWN;
    case EventSelector::REGISTER: return EventKind::REGISTER;
    case EventSelector::LINK: return EventKind::LINK;
    case EventSelector::IO: return EventKind::IO;
    case EventSelector::CALL: return EventKind::CALL;
    case EventSelector::RETURN: return EventKind::RETURN;
    default: return std::nullopt;
  }
}

bool
selectors_overlap(EventSelector a, EventSelector b)
{
  if (a == b || a == EventSelector::ANY || b == EventSelector::ANY) return true;
  auto ka = kind_of(a);
  auto kb = kind_of(b);
  if (ka && kb) return false;
  if (!ka && !kb) return false;
  EventSelector cls = ka ? b : a;
  EventKind kind    = ka ? *ka : *kb;
  if (cls == EventSelector::STIMULUS) return kind == EventKind::RECEIVE;
  return true;
}

}  // namespace

std::string_view
to_string(EventSelector s)
{
  for (const auto& [k, name] : s_selector_names)
    if (k == s) return name;
  return "any";
}

std::optional<EventSelector>
event_selector_from_string(std::string_view s)
{
  for (const auto& [k, name] : s_selector_names)
    if (name == s) return k;
  return std::nullopt;
}

std::vector<std::string>
EventPattern::variables() const
{
  std::vector<std::string> out;
  subject.collect_variables(out);
  payload.collect_variables(out);
  return out;
}

std::string
EventPattern::to_string() const
{
  return std::string(tracemin::to_string(selector)) + "(" + subject.to_string() + ", "
         + payload.to_string() + ")";
}

EventView
make_view(const Event& ev, EventClass cls, const Term& actor)
{
  EventView v;
  v.cls     = cls;
  v.kind    = ev.kind;
  v.subject = actor;
  v.payload = ev.payload;

  if (ev.kind == EventKind::SPAWN && ev.payload.is_tuple()
      && ev.payload.elements().size() == 2)
  {
    const Term& mfa = ev.payload.elements()[1];
    if (mfa.is_tuple() && mfa.elements().size() == 3 && mfa.elements()[0].is_atom())
    {
      v.subject = mfa.elements()[0];
      std::vector<Term> call{mfa.elements()[1]};
      const Term& args = mfa.elements()[2];
      if (args.is_list())
        call.insert(call.end(), args.elements().begin(), args.elements().end());
      else
        call.push_back(args);
      v.payload = Term::tuple(std::move(call));
    }
  }
  else if (ev.kind == EventKind::SEND && ev.payload.is_tuple()
           && ev.payload.elements().size() == 2)
  {
    v.payload = ev.payload.elements()[0];
  }
  return v;
}

EventView
make_view(const Stimulus& s)
{
  EventView v;
  v.cls     = EventClass::EXTERNAL_STIMULUS;
  v.subject = s.target;
  v.payload = s.payload;
  return v;
}

bool
selector_admits(EventSelector sel, const EventView& view)
{
  switch (sel)
  {
    case EventSelector::ANY: return true;
    case EventSelector::STIMULUS: return view.cls == EventClass::EXTERNAL_STIMULUS;
    case EventSelector::ENV_INTERACTION:
      return view.cls == EventClass::ENVIRONMENT_INTERACTION;
    case EventSelector::SYSTEM_ACTION: return view.cls == EventClass::SYSTEM_ACTION;
    default: return view.kind && view.kind == kind_of(sel);
  }
}

bool
match(const EventPattern& p, const EventView& view, Bindings& b)
{
  if (!selector_admits(p.selector, view)) return false;
  Bindings tmp = b;
  if (!p.subject.match(view.subject, tmp)) return false;
  if (!p.payload.match(view.payload, tmp)) return false;
  b = std::move(tmp);
  return true;
}

/* -------------------------------------------------------------------------- */

namespace {

std::int64_t
read_int(const IntOperand& o, const Store& store)
{
  if (auto lit = std::get_if<std::int64_t>(&o.value)) return *lit;
  auto it = store.find(std::get<std::string>(o.value));
  if (it == store.end()) return 0;
  if (auto v = std::get_if<std::int64_t>(&it->second)) return *v;
  return 0;
}

std::int64_t
eval(const IntExpr& e, const Store& store)
{
  std::int64_t l = read_int(e.lhs, store);
  if (e.op == '+') return l + read_int(e.rhs, store);
  if (e.op == '-') return l - read_int(e.rhs, store);
  return l;
}

std::string
operand_string(const IntOperand& o)
{
  if (auto lit = std::get_if<std::int64_t>(&o.value)) return std::to_string(*lit);
  return std::get<std::string>(o.value);
}

std::string
expr_string(const IntExpr& e)
{
  std::string s = operand_string(e.lhs);
  if (e.op) s += std::string(" ") + e.op + " " + operand_string(e.rhs);
  return s;
}

std::string_view
cmp_string(CmpOp op)
{
  switch (op)
  {
    case CmpOp::EQ: return "==";
    case CmpOp::NE: return "!=";
    case CmpOp::LT: return "<";
    case CmpOp::LE: return "<=";
    case CmpOp::GT: return ">";
    case CmpOp::GE: return ">=";
  }
  return "==";
}

}  // namespace

Condition
Condition::literal(bool value)
{
  Condition c;
  c.d_kind  = Kind::LITERAL;
  c.d_value = value;
  return c;
}

Condition
Condition::negate(Condition c)
{
  Condition r;
  r.d_kind = Kind::NOT;
  r.d_operands.push_back(std::move(c));
  return r;
}

Condition
Condition::conjunction(Condition a, Condition b)
{
  Condition r;
  r.d_kind = Kind::AND;
  r.d_operands.push_back(std::move(a));
  r.d_operands.push_back(std::move(b));
  return r;
}

Condition
Condition::disjunction(Condition a, Condition b)
{
  Condition r = conjunction(std::move(a), std::move(b));
  r.d_kind    = Kind::OR;
  return r;
}

Condition
Condition::compare(IntExpr lhs, CmpOp op, IntExpr rhs)
{
  Condition r;
  r.d_kind = Kind::COMPARE;
  r.d_lhs  = std::move(lhs);
  r.d_cmp  = op;
  r.d_rhs  = std::move(rhs);
  return r;
}

Condition
Condition::contains(std::string set_var, Pattern element)
{
  Condition r;
  r.d_kind    = Kind::CONTAINS;
  r.d_set     = std::move(set_var);
  r.d_element = std::move(element);
  return r;
}

bool
Condition::evaluate(const Store& store, const Bindings& b) const
{
  switch (d_kind)
  {
    case Kind::LITERAL: return d_value;
    case Kind::NOT: return !d_operands[0].evaluate(store, b);
    case Kind::AND:
      return d_operands[0].evaluate(store, b) && d_operands[1].evaluate(store, b);
    case Kind::OR:
      return d_operands[0].evaluate(store, b) || d_operands[1].evaluate(store, b);
    case Kind::COMPARE:
    {
      std::int64_t l = eval(d_lhs, store);
      std::int64_t r = eval(d_rhs, store);
      switch (d_cmp)
      {
        case CmpOp::EQ: return l == r;
        case CmpOp::NE: return l != r;
        case CmpOp::LT: return l < r;
        case CmpOp::LE: return l <= r;
        case CmpOp::GT: return l > r;
        case CmpOp::GE: return l >= r;
      }
      return false;
    }
    case Kind::CONTAINS:
    {
      auto it = store.find(d_set);
      if (it == store.end()) return false;
      auto set = std::get_if<TermSet>(&it->second);
      auto elem = d_element.instantiate(b);
      return set && elem && set->count(*elem) > 0;
    }
  }
  return false;
}

std::string
Condition::to_string() const
{
  switch (d_kind)
  {
    case Kind::LITERAL: return d_value ? "true" : "false";
    case Kind::NOT: return "!" + d_operands[0].to_string();
    case Kind::AND:
      return "(" + d_operands[0].to_string() + " && " + d_operands[1].to_string() + ")";
    case Kind::OR:
      return "(" + d_operands[0].to_string() + " || " + d_operands[1].to_string() + ")";
    case Kind::COMPARE:
      return expr_string(d_lhs) + " " + std::string(cmp_string(d_cmp)) + " "
             + expr_string(d_rhs);
    case Kind::CONTAINS: return "contains(" + d_set + ", " + d_element.to_string() + ")";
  }
  return "true";
}

void
Action::apply(Store& store, const Bindings& b) const
{
  for (const Statement& s : stmts)
  {
    if (s.op == Statement::Op::SKIP) continue;
    auto it = store.find(s.var);
    if (it == store.end()) continue;
    Value& v = it->second;
    switch (s.op)
    {
      case Statement::Op::ASSIGN:
      case Statement::Op::ADD_ASSIGN:
      case Statement::Op::SUB_ASSIGN:
      {
        auto cur = std::get_if<std::int64_t>(&v);
        if (!cur) break;
        std::int64_t x = eval(s.expr, store);
        if (s.op == Statement::Op::ASSIGN) *cur = x;
        if (s.op == Statement::Op::ADD_ASSIGN) *cur += x;
        if (s.op == Statement::Op::SUB_ASSIGN) *cur -= x;
        break;
      }
      case Statement::Op::SET_INSERT:
      case Statement::Op::SET_REMOVE:
      {
        auto set  = std::get_if<TermSet>(&v);
        auto elem = s.element.instantiate(b);
        if (!set || !elem) break;
        if (s.op == Statement::Op::SET_INSERT)
          set->insert(*elem);
        else
          set->erase(*elem);
        break;
      }
      case Statement::Op::SKIP: break;
    }
  }
}

std::string
Action::to_string() const
{
  if (stmts.empty()) return "skip";
  std::string out;
  for (const Statement& s : stmts)
  {
    if (!out.empty()) out += "; ";
    switch (s.op)
    {
      case Statement::Op::SKIP: out += "skip"; break;
      case Statement::Op::ASSIGN: out += s.var + " = " + expr_string(s.expr); break;
      case Statement::Op::ADD_ASSIGN: out += s.var + " += " + expr_string(s.expr); break;
      case Statement::Op::SUB_ASSIGN: out += s.var + " -= " + expr_string(s.expr); break;
      case Statement::Op::SET_INSERT:
        out += "add(" + s.var + ", " + s.element.to_string() + ")";
        break;
      case Statement::Op::SET_REMOVE:
        out += "del(" + s.var + ", " + s.element.to_string() + ")";
        break;
    }
  }
  return out;
}

/* -------------------------------------------------------------------------- */

std::optional<Term>
ForeachSpec::attribute(const Stimulus& s) const
{
  EventView view = make_view(s);
  for (const AttributionRule& rule : attribution)
  {
    Bindings b;
    if (!match(rule.pattern, view, b)) continue;
    auto it = b.find(rule.key_var);
    if (it != b.end()) return it->second;
  }
  return std::nullopt;
}

bool
ContractAutomaton::has_state(const std::string& s) const
{
  return std::find(states.begin(), states.end(), s) != states.end();
}

bool
ContractAutomaton::is_bad(const std::string& s) const
{
  return std::find(bad.begin(), bad.end(), s) != bad.end();
}

const VarDecl*
ContractAutomaton::var(const std::string& name) const
{
  for (const VarDecl& v : vars)
    if (v.name == name) return &v;
  return nullptr;
}

Store
ContractAutomaton::initial_store() const
{
  Store s;
  for (const VarDecl& v : vars)
  {
    if (v.type == VarDecl::Type::INT)
      s.emplace(v.name, v.initial);
    else
      s.emplace(v.name, TermSet{});
  }
  return s;
}

MonitorState
initial_state(const ContractAutomaton& a, std::optional<Term> key)
{
  return MonitorState{a.initial, a.initial_store(), std::move(key)};
}

/* -------------------------------------------------------------------------- */

namespace {

class Validator
{
 public:
  explicit Validator(const ContractAutomaton& a) : d_a(a) {}

  std::vector<Diagnostic> run();

 private:
  void error(std::string msg)
  {
    d_diags.push_back({Diagnostic::Severity::ERROR, d_a.id + ": " + std::move(msg)});
  }
  void warning(std::string msg)
  {
    d_diags.push_back({Diagnostic::Severity::WARNING, d_a.id + ": " + std::move(msg)});
  }
  std::string where(const Transition& t) const
  {
    std::string s = "transition " + t.from + " -> " + t.to;
    if (t.line) s += " (line " + std::to_string(t.line) + ")";
    return s;
  }

  void check_pattern_vars(const EventPattern& p, const std::string& ctx);
  void check_int_operand(const IntOperand& o, const std::string& ctx);
  void check_int_expr(const IntExpr& e, const std::string& ctx)
  {
    check_int_operand(e.lhs, ctx);
    if (e.op) check_int_operand(e.rhs, ctx);
  }
  void check_set_element(const std::string& set,
                         const Pattern& elem,
                         const std::vector<std::string>& bound,
                         const std::string& ctx);
  void check_condition(const Condition& c,
                       const std::vector<std::string>& bound,
                       const std::string& ctx);

  const ContractAutomaton& d_a;
  std::vector<Diagnostic> d_diags;
};

void
Validator::check_pattern_vars(const EventPattern& p, const std::string& ctx)
{
  std::vector<std::string> vars = p.variables();
  std::sort(vars.begin(), vars.end());
  auto dup = std::adjacent_find(vars.begin(), vars.end());
  if (dup != vars.end()) error(ctx + ": variable " + *dup + " occurs more than once");
}

void
Validator::check_int_operand(const IntOperand& o, const std::string& ctx)
{
  auto name = std::get_if<std::string>(&o.value);
  if (!name) return;
  const VarDecl* v = d_a.var(*name);
  if (!v)
    error(ctx + ": undeclared variable " + *name);
  else if (v->type != VarDecl::Type::INT)
    error(ctx + ": " + *name + " is not an integer variable");
}

void
Validator::check_set_element(const std::string& set,
                             const Pattern& elem,
                             const std::vector<std::string>& bound,
                             const std::string& ctx)
{
  const VarDecl* v = d_a.var(set);
  if (!v)
    error(ctx + ": undeclared variable " + set);
  else if (v->type != VarDecl::Type::SET)
    error(ctx + ": " + set + " is not a set variable");

  std::vector<std::string> used;
  elem.collect_variables(used);
  for (const std::string& u : used)
    if (std::find(bound.begin(), bound.end(), u) == bound.end())
      error(ctx + ": variable " + u + " is not bound by the event pattern");
  Bindings probe;
  for (const std::string& u : used) probe[u] = Term();
  if (!elem.instantiate(probe)) error(ctx + ": set element may not contain '_'");
}

void
Validator::check_condition(const Condition& c,
                           const std::vector<std::string>& bound,
                           const std::string& ctx)
{
  switch (c.kind())
  {
    case Condition::Kind::LITERAL: break;
    case Condition::Kind::NOT:
    case Condition::Kind::AND:
    case Condition::Kind::OR:
      for (const Condition& o : c.operands()) check_condition(o, bound, ctx);
      break;
    case Condition::Kind::COMPARE:
      check_int_expr(c.lhs(), ctx);
      check_int_expr(c.rhs(), ctx);
      break;
    case Condition::Kind::CONTAINS: check_set_element(c.set_var(), c.element(), bound, ctx);
  }
}

std::vector<Diagnostic>
Validator::run()
{
  if (d_a.id.empty()) error("automaton has no name");

  std::vector<std::string> seen;
  for (const std::string& s : d_a.states)
  {
    if (std::find(seen.begin(), seen.end(), s) != seen.end())
      error("state " + s + " declared twice");
    seen.push_back(s);
  }
  std::vector<std::string> seen_bad;
  for (const std::string& b : d_a.bad)
  {
    if (!d_a.has_state(b)) error("bad state " + b + " is not a declared state");
    if (std::find(seen_bad.begin(), seen_bad.end(), b) != seen_bad.end())
      error("bad state " + b + " declared twice");
    seen_bad.push_back(b);
  }
  if (!d_a.has_state(d_a.initial)) error("undeclared initial state '" + d_a.initial + "'");
  else if (d_a.is_bad(d_a.initial)) warning("initial state is a bad state");

  std::vector<std::string> var_names;
  for (const VarDecl& v : d_a.vars)
  {
    if (std::find(var_names.begin(), var_names.end(), v.name) != var_names.end())
      error("variable " + v.name + " declared twice");
    var_names.push_back(v.name);
  }

  std::optional<std::string> key;
  if (d_a.foreach)
  {
    const ForeachSpec& f = *d_a.foreach;
    key                  = f.key_var;
    check_pattern_vars(f.spawn, "foreach");
    auto sv = f.spawn.variables();
    if (std::find(sv.begin(), sv.end(), f.key_var) == sv.end())
      error("foreach key " + f.key_var + " is not bound by the spawn pattern");
    for (const AttributionRule& r : f.attribution)
    {
      std::string ctx = "attribution " + r.pattern.to_string();
      check_pattern_vars(r.pattern, ctx);
      auto rv = r.pattern.variables();
      if (std::find(rv.begin(), rv.end(), r.key_var) == rv.end())
        error(ctx + ": does not bind " + r.key_var);
      if (r.pattern.selector != EventSelector::STIMULUS
          && r.pattern.selector != EventSelector::ANY)
        warning(ctx + ": attribution only applies to stimuli");
    }
  }

  for (const Transition& t : d_a.transitions)
  {
    std::string ctx = where(t);
    if (!d_a.has_state(t.from)) error(ctx + ": undeclared source state " + t.from);
    if (!d_a.has_state(t.to)) error(ctx + ": undeclared target state " + t.to);
    if (d_a.is_bad(t.from)) warning(ctx + ": leaves a bad state");
    check_pattern_vars(t.on, ctx);

    std::vector<std::string> bound = t.on.variables();
    if (key) bound.push_back(*key);
    check_condition(t.when, bound, ctx);
    for (const Statement& s : t.action.stmts)
    {
      switch (s.op)
      {
        case Statement::Op::SKIP: break;
        case Statement::Op::ASSIGN:
        case Statement::Op::ADD_ASSIGN:
        case Statement::Op::SUB_ASSIGN:
          check_int_operand(IntOperand{s.var}, ctx);
          check_int_expr(s.expr, ctx);
          break;
        case Statement::Op::SET_INSERT:
        case Statement::Op::SET_REMOVE:
          check_set_element(s.var, s.element, bound, ctx);
          break;
      }
    }
  }

  const auto& ts = d_a.transitions;
  for (std::size_t i = 0; i < ts.size(); ++i)
  {
    for (std::size_t j = i + 1; j < ts.size(); ++j)
    {
      if (ts[i].from != ts[j].from) continue;
      if (!ts[i].when.is_literally_true() || !ts[j].when.is_literally_true()) continue;
      if (!selectors_overlap(ts[i].on.selector, ts[j].on.selector)) continue;
      if (!ts[i].on.subject.unifiable_with(ts[j].on.subject)) continue;
      if (!ts[i].on.payload.unifiable_with(ts[j].on.payload)) continue;
      error("ambiguous: " + where(ts[i]) + " and " + where(ts[j]) + " both match "
            + ts[i].on.to_string());
    }
  }
  return d_diags;
}

}  // namespace

std::vector<Diagnostic>
validate(const ContractAutomaton& automaton)
{
  return Validator(automaton).run();
}

bool
has_errors(const std::vector<Diagnostic>& diags)
{
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) {
    return d.is_error();
  });
}

/* -------------------------------------------------------------------------- */

StepResult
step(const ContractAutomaton& automaton, const MonitorState& state, const EventView& event)
{
  Bindings base;
  if (state.instance_key && automaton.foreach)
    base.emplace(automaton.foreach->key_var, *state.instance_key);

  const Transition* taken = nullptr;
  Bindings taken_bindings;
  for (const Transition& t : automaton.transitions)
  {
    if (t.from != state.current) continue;
    Bindings b = base;
    if (!match(t.on, event, b)) continue;
    if (!t.when.evaluate(state.store, b)) continue;
    if (taken)
    {
      throw AmbiguousMatch(automaton.id + ": transitions " + taken->from + " -> "
                           + taken->to + " and " + t.from + " -> " + t.to
                           + " both enabled in state " + state.current);
    }
    taken          = &t;
    taken_bindings = std::move(b);
  }

  StepResult res;
  res.state = state;
  if (!taken) return res;

  res.state.current = taken->to;
  taken->action.apply(res.state.store, taken_bindings);
  if (automaton.is_bad(taken->to))
  {
    res.kind      = StepResult::Kind::VIOLATED;
    res.bad_state = taken->to;
  }
  else
  {
    res.kind = StepResult::Kind::MOVED;
  }
  return res;
}

StepResult
step(const ContractAutomaton& automaton, const MonitorState& state, const Event& event)
{
  return step(automaton,
              state,
              make_view(event, classify(event, default_boundary()), Term(event.pid)));
}

std::optional<MonitorState>
spawn_replica(const ForeachSpec& spec,
              const ContractAutomaton& automaton,
              const EventView& event)
{
  Bindings b;
  if (!match(spec.spawn, event, b)) return std::nullopt;
  auto it = b.find(spec.key_var);
  if (it == b.end()) return std::nullopt;
  return initial_state(automaton, it->second);
}

std::optional<MonitorState>
spawn_replica(const ForeachSpec& spec, const ContractAutomaton& automaton, const Event& event)
{
  return spawn_replica(
      spec, automaton, make_view(event, classify(event, default_boundary()), Term(event.pid)));
}

}  // namespace tracemin
