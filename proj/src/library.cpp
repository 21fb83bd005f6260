#include "tracemin/library.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tracemin/contract_dsl.hpp"
#include "tracemin/errors.hpp"
#include "tracemin/monitor.hpp"

namespace tracemin {

namespace {

const Pid k_library_pid{0, 35, 0};
const Pid k_db_pid{0, 36, 0};
const Pid k_io_pid{0, 23, 0};
const Pid k_user_pid{0, 0, 0};

const std::string k_io_ref = "<0.23.0>";

Term
atom(const char* s)
{
  return Term::atom(s);
}

/** The format string a handler prints on registration, as a char list. */
Term
registration_format()
{
  static const std::string fmt = "~n*--- Client ~p registered successfully ~n";
  std::vector<Term> chars;
  for (unsigned char c : fmt) chars.push_back(Term::integer(c));
  return Term::list(std::move(chars));
}

/** Matches {Tag, A} or {Tag, A, B}; returns the arguments. */
std::optional<std::vector<Term>>
args_of(const Term& msg, std::string_view tag, std::size_t min_args, std::size_t max_args)
{
  if (msg.tag() != tag) return std::nullopt;
  std::size_t n = msg.elements().size() - 1;
  if (n < min_args || n > max_args) return std::nullopt;
  return std::vector<Term>(msg.elements().begin() + 1, msg.elements().end());
}

/** Port used outside the harness: nothing is environment except I/O. */
class QuietPort : public EnvironmentPort
{
 public:
  bool is_environment(const std::string& ref) const override { return ref == k_io_ref; }
  void notify(const std::string&, const Term&) override {}
  std::optional<Term> call(const std::string&, const Term&) override { return std::nullopt; }
};

}  // namespace

LibrarySystem::LibrarySystem(bool nondeterministic) : d_nondeterministic(nondeterministic) {}

CapturedSystem::Traits
LibrarySystem::traits() const
{
  Traits t;
  t.nondeterministic = d_nondeterministic;
  t.deterministic    = !d_nondeterministic;
  return t;
}

std::uint64_t
LibrarySystem::draw(std::uint64_t bound)
{
  return d_rng() % bound;
}

void
LibrarySystem::reset(std::uint64_t seed, EnvironmentPort& env, EventSink& sink)
{
  d_rng.seed(seed);
  d_procs.clear();
  d_registry.clear();
  d_catalog.clear();
  d_added.clear();
  d_injected.clear();
  d_held.clear();
  d_live_db.clear();
  d_live_calls = 0;
  d_next_pid   = 38;

  Process& lib = d_procs[k_library_pid];
  lib.pid      = k_library_pid;
  lib.role     = Role::LIBRARY;
  lib.name     = atom("library");
  d_registry[lib.name] = lib.pid;
  sink.emit(lib.pid, EventKind::REGISTER, lib.name);

  if (!env.is_environment("db") && !env.is_environment(Term(k_db_pid).to_string()))
  {
    Process& db = d_procs[k_db_pid];
    db.pid      = k_db_pid;
    db.role     = Role::DB;
    db.name     = atom("db");
    d_registry[db.name] = db.pid;
    sink.emit(db.pid, EventKind::REGISTER, db.name);
  }
}

LibrarySystem::Process*
LibrarySystem::find(const Pid& pid)
{
  auto it = d_procs.find(pid);
  return it == d_procs.end() ? nullptr : &it->second;
}

LibrarySystem::Process*
LibrarySystem::resolve(const Term& target)
{
  if (target.is_pid()) return find(target.as_pid());
  auto it = d_registry.find(target);
  return it == d_registry.end() ? nullptr : find(it->second);
}

void
LibrarySystem::deliver(const Stimulus& s, EventSink&)
{
  if (Process* p = resolve(s.target)) p->mailbox.push_back({k_user_pid, s.payload});
}

void
LibrarySystem::inject(const Stimulus& s, EnvironmentPort&, EventSink& sink)
{
  if (!d_nondeterministic)
  {
    deliver(s, sink);
    return;
  }
  std::vector<Stimulus> released = std::move(d_held);
  d_held.clear();
  if (draw(5) == 0)
    d_held.push_back(s);
  else
    deliver(s, sink);
  for (const Stimulus& r : released) deliver(r, sink);
}

bool
LibrarySystem::runnable(const Process& p) const
{
  if (p.blocked || p.mailbox.empty()) return false;
  if (!p.awaiting) return true;
  return std::any_of(p.mailbox.begin(), p.mailbox.end(), [&](const Message& m) {
    return m.msg.tag() == *p.awaiting;
  });
}

void
LibrarySystem::drain(EnvironmentPort& env, EventSink& sink)
{
  std::vector<Process*> ready;
  while (!sink.truncated())
  {
    ready.clear();
    for (auto& [pid, p] : d_procs)
      if (runnable(p)) ready.push_back(&p);
    if (ready.empty()) return;
    Process* next = d_nondeterministic ? ready[draw(ready.size())] : ready.front();
    run_once(*next, env, sink);
  }
}

void
LibrarySystem::finish(EnvironmentPort& env, EventSink& sink)
{
  std::vector<Stimulus> released = std::move(d_held);
  d_held.clear();
  for (const Stimulus& r : released) deliver(r, sink);
  drain(env, sink);
}

void
LibrarySystem::send(Process& from, const Term& to_term, Process* to, Term msg, EventSink& sink)
{
  sink.emit(from.pid, EventKind::SEND, Term::tuple({msg, to_term}));
  if (to) to->mailbox.push_back({from.pid, std::move(msg)});
}

void
LibrarySystem::run_once(Process& p, EnvironmentPort& env, EventSink& sink)
{
  auto it = p.mailbox.begin();
  if (p.awaiting)
  {
    it = std::find_if(p.mailbox.begin(), p.mailbox.end(), [&](const Message& m) {
      return m.msg.tag() == *p.awaiting;
    });
  }
  Message m = std::move(*it);
  p.mailbox.erase(it);
  sink.emit(p.pid, EventKind::RECEIVE, m.msg);

  switch (p.role)
  {
    case Role::LIBRARY: library_handle(p, m, env, sink); break;
    case Role::CLIENT: client_handle(p, m, env, sink); break;
    case Role::DB: db_handle(p, m, sink); break;
  }
}

void
LibrarySystem::library_handle(Process& p, const Message& m, EnvironmentPort& env, EventSink& sink)
{
  if (p.awaiting)
  {
    p.awaiting.reset();
    return;
  }

  if (auto a = args_of(m.msg, "newClient", 1, 1))
  {
    const Term& name = (*a)[0];
    if (!name.is_atom() || d_registry.count(name)) return;
    Pid child{0, d_next_pid++, 0};
    sink.emit(p.pid,
              EventKind::SPAWN,
              Term::tuple({Term(child),
                           Term::tuple({atom("client"), atom("newClient"), Term::list({name})})}));
    sink.emit(p.pid, EventKind::LINK, Term(child));
    Process& c = d_procs[child];
    c.pid      = child;
    c.role     = Role::CLIENT;
    c.name     = name;
    d_registry[name] = child;
    sink.emit(child, EventKind::REGISTER, name);
    send(p, Term(child), &c, Term::tuple({atom("confirm_reg"), name}), sink);
    return;
  }

  if (auto a = args_of(m.msg, "addBook", 1, 1))
  {
    const Term& book = (*a)[0];
    ++d_catalog[book];
    ++d_added[book];
    Term request = Term::tuple({atom("store"), book});
    if (Process* db = find(k_db_pid))
    {
      send(p, atom("db"), db, request, sink);
      p.awaiting = "db";
      return;
    }
    sink.emit(p.pid, EventKind::SEND, Term::tuple({request, atom("db")}));
    if (auto reply = env.call("db", request))
    {
      p.mailbox.push_back({k_db_pid, *reply});
      p.awaiting = "db";
    }
    else
    {
      p.blocked = true;
    }
    return;
  }

  Process* client = find(m.from);
  if (!client || client->role != Role::CLIENT) return;

  if (auto a = args_of(m.msg, "borrow", 2, 2))
  {
    const Term& book = (*a)[1];
    auto avail       = d_catalog.find(book);
    if (avail != d_catalog.end() && avail->second > 0)
    {
      --avail->second;
      ++client->loans[book];
      send(p, Term(client->pid), client, Term::tuple({atom("lend"), book}), sink);
    }
    else
    {
      send(p, Term(client->pid), client, Term::tuple({atom("unavailable"), book}), sink);
    }
    return;
  }

  if (auto a = args_of(m.msg, "return", 2, 2))
  {
    const Term& book = (*a)[1];
    ++d_catalog[book];
    auto held = client->loans.find(book);
    if (held != client->loans.end())
    {
      if (--held->second == 0) client->loans.erase(held);
    }
    else
    {
      ++d_injected[book];
    }
    send(p, Term(client->pid), client, Term::tuple({atom("returned"), book}), sink);
  }
}

void
LibrarySystem::client_handle(Process& p, const Message& m, EnvironmentPort& env, EventSink& sink)
{
  if (auto a = args_of(m.msg, "confirm_reg", 1, 1))
  {
    Term request = Term::tuple({atom("io_request"),
                                Term(p.pid),
                                Term(k_io_pid),
                                Term::tuple({atom("put_chars"),
                                             atom("unicode"),
                                             atom("io_lib"),
                                             atom("format"),
                                             Term::list({registration_format(),
                                                         Term::list({p.name})})})});
    sink.emit(p.pid, EventKind::SEND, Term::tuple({request, Term(k_io_pid)}));
    env.notify(k_io_ref, request);
    return;
  }

  Process* lib = find(k_library_pid);
  for (const char* verb : {"borrowBook", "returnBook"})
  {
    if (auto a = args_of(m.msg, verb, 1, 2))
    {
      const Term& book = (*a)[0];
      const Term& who  = a->size() == 2 ? (*a)[1] : p.name;
      Term op          = atom(std::string_view(verb) == "borrowBook" ? "borrow" : "return");
      send(p, atom("library"), lib, Term::tuple({op, who, book}), sink);
      return;
    }
  }
}

void
LibrarySystem::db_handle(Process& p, const Message& m, EventSink& sink)
{
  if (auto a = args_of(m.msg, "store", 1, 1))
  {
    Term reply = Term::tuple({atom("db"), Term::tuple({atom("stored"), (*a)[0]})});
    send(p, Term(m.from), find(m.from), std::move(reply), sink);
  }
}

std::optional<Term>
LibrarySystem::live_call(const std::string& ref, const Term& request)
{
  ++d_live_calls;
  if (ref != "db" && ref != Term(k_db_pid).to_string()) return std::nullopt;
  auto a = args_of(request, "store", 1, 1);
  if (!a) return std::nullopt;
  ++d_live_db[(*a)[0]];
  return Term::tuple({atom("db"), Term::tuple({atom("stored"), (*a)[0]})});
}

void
LibrarySystem::live_notify(const std::string&, const Term&)
{
  ++d_live_calls;
}

std::unique_ptr<CapturedSystem>
LibrarySystem::clone() const
{
  return std::make_unique<LibrarySystem>(*this);
}

std::map<Term, std::map<Term, std::int64_t>>
LibrarySystem::loans() const
{
  std::map<Term, std::map<Term, std::int64_t>> out;
  for (const auto& [pid, p] : d_procs)
    if (p.role == Role::CLIENT) out[p.name] = p.loans;
  return out;
}

std::vector<Term>
LibrarySystem::clients() const
{
  std::vector<Term> out;
  for (const auto& [pid, p] : d_procs)
    if (p.role == Role::CLIENT) out.push_back(p.name);
  return out;
}

bool
LibrarySystem::conserved() const
{
  std::map<Term, std::int64_t> lhs = d_catalog;
  std::map<Term, std::int64_t> rhs;
  for (const auto& [pid, p] : d_procs)
    for (const auto& [book, n] : p.loans) lhs[book] += n;
  for (const auto& [book, n] : d_added) rhs[book] += n;
  for (const auto& [book, n] : d_injected) rhs[book] += n;
  for (const auto& [book, n] : lhs)
  {
    if (n < 0) return false;
    if (rhs[book] != n) return false;
  }
  for (const auto& [book, n] : rhs)
    if (lhs[book] != n) return false;
  return true;
}

std::string
LibrarySystem::state_key() const
{
  std::ostringstream out;
  for (const auto& [pid, p] : d_procs)
  {
    out << Term(pid) << '=' << p.name << (p.blocked ? "!" : "") << '[';
    for (const Message& m : p.mailbox) out << Term(m.from) << ':' << m.msg << ' ';
    out << ']';
    if (p.awaiting) out << '?' << *p.awaiting;
    for (const auto& [book, n] : p.loans) out << book << '*' << n << ' ';
    out << ';';
  }
  out << '|';
  for (const auto& [book, n] : d_catalog)
    if (n) out << book << '*' << n << ' ';
  out << '|' << d_next_pid << '|';
  for (const Stimulus& s : d_held) out << s.to_term();
  return out.str();
}

Trace
library_step(LibrarySystem& sys, const Stimulus& s)
{
  QuietPort port;
  EventSink sink;
  sys.inject(s, port, sink);
  sys.drain(port, sink);
  return sink.take();
}

/* -------------------------------------------------------------------------- */

std::string_view
library_contract_text()
{
  return R"(# Library contracts.
#
# Borrowing is observed on the library's lend reply and giving back on its
# returned reply, so only requests the library actually served count.
# Requests themselves are checked as they reach the client's handler.

automaton same_book {
  foreach spawn(client, newClient(C)) key C
    attribute stimulus(library, newClient(C)) -> C
    attribute stimulus(C, borrowBook(_)) -> C
    attribute stimulus(C, returnBook(_)) -> C
    attribute stimulus(C, borrowBook(_, _)) -> C
    attribute stimulus(C, returnBook(_, _)) -> C
  states ok
  bad same_book_twice
  initial ok
  set held
  trans ok -> ok              on receive(C, lend(B)) when !contains(held, B) do add(held, B)
  trans ok -> same_book_twice on receive(C, lend(B)) when contains(held, B)
  trans ok -> ok              on receive(C, returned(B)) when contains(held, B) do del(held, B)
}

# Counting states s0..s4 are the number of books on loan.
automaton library_user {
  foreach spawn(client, newClient(C)) key C
    attribute stimulus(library, newClient(C)) -> C
    attribute stimulus(C, borrowBook(_)) -> C
    attribute stimulus(C, returnBook(_)) -> C
    attribute stimulus(C, borrowBook(_, _)) -> C
    attribute stimulus(C, returnBook(_, _)) -> C
  states s0 s1 s2 s3 s4
  bad more_than_four return_wrong
  initial s0
  set held
  trans s0 -> s1             on receive(C, lend(B)) do add(held, B)
  trans s1 -> s2             on receive(C, lend(B)) do add(held, B)
  trans s2 -> s3             on receive(C, lend(B)) do add(held, B)
  trans s3 -> s4             on receive(C, lend(B)) do add(held, B)
  trans s4 -> more_than_four on receive(C, lend(_))
  trans s1 -> s0             on receive(C, returned(B)) when contains(held, B) do del(held, B)
  trans s2 -> s1             on receive(C, returned(B)) when contains(held, B) do del(held, B)
  trans s3 -> s2             on receive(C, returned(B)) when contains(held, B) do del(held, B)
  trans s4 -> s3             on receive(C, returned(B)) when contains(held, B) do del(held, B)
  trans s0 -> return_wrong   on receive(C, returnBook(B)) when !contains(held, B)
  trans s1 -> return_wrong   on receive(C, returnBook(B)) when !contains(held, B)
  trans s2 -> return_wrong   on receive(C, returnBook(B)) when !contains(held, B)
  trans s3 -> return_wrong   on receive(C, returnBook(B)) when !contains(held, B)
  trans s4 -> return_wrong   on receive(C, returnBook(B)) when !contains(held, B)
}

# 'me' holds the replica's own name once the handler registers it.
automaton client_identity {
  foreach spawn(client, newClient(C)) key C
    attribute stimulus(library, newClient(C)) -> C
    attribute stimulus(C, borrowBook(_)) -> C
    attribute stimulus(C, returnBook(_)) -> C
    attribute stimulus(C, borrowBook(_, _)) -> C
    attribute stimulus(C, returnBook(_, _)) -> C
  states s0 s1
  bad different_client
  initial s0
  set me
  trans s0 -> s1               on register(C, _) do add(me, C)
  trans s1 -> different_client on receive(C, borrowBook(_, X)) when !contains(me, X)
  trans s1 -> different_client on receive(C, returnBook(_, X)) when !contains(me, X)
}
)";
}

std::vector<ContractAutomaton>
library_contracts()
{
  static const std::vector<ContractAutomaton> parsed = parse_contracts(library_contract_text());
  return parsed;
}

/* -------------------------------------------------------------------------- */

namespace {

struct ScenarioInfo
{
  ScenarioKind kind;
  std::string_view name;
  std::string_view automaton;
  std::string_view bad_state;
};

constexpr ScenarioInfo s_scenarios[] = {
    {ScenarioKind::SAME_BOOK_TWICE, "same_book_twice", "same_book", "same_book_twice"},
    {ScenarioKind::MORE_THAN_FOUR, "more_than_four", "library_user", "more_than_four"},
    {ScenarioKind::DIFFERENT_CLIENT, "different_client", "client_identity", "different_client"},
    {ScenarioKind::RETURN_WRONG, "return_wrong", "library_user", "return_wrong"},
};

const ScenarioInfo&
info(ScenarioKind k)
{
  for (const ScenarioInfo& s : s_scenarios)
    if (s.kind == k) return s;
  return s_scenarios[0];
}

Stimulus
stim(const Term& target, std::vector<Term> payload)
{
  return Stimulus{target, Term::tuple(std::move(payload))};
}

Stimulus
new_client(const Term& c)
{
  return stim(atom("library"), {atom("newClient"), c});
}

Stimulus
add_book(const Term& b)
{
  return stim(atom("library"), {atom("addBook"), b});
}

Stimulus
borrow(const Term& c, const Term& b)
{
  return stim(c, {atom("borrowBook"), b});
}

Stimulus
give_back(const Term& c, const Term& b)
{
  return stim(c, {atom("returnBook"), b});
}

std::vector<Stimulus>
core_of(ScenarioKind k)
{
  Term ian = atom("ian");
  switch (k)
  {
    case ScenarioKind::RETURN_WRONG: return {new_client(ian), give_back(ian, atom("fable"))};
    case ScenarioKind::DIFFERENT_CLIENT:
      return {new_client(ian), stim(ian, {atom("borrowBook"), atom("fable"), atom("bob")})};
    case ScenarioKind::SAME_BOOK_TWICE:
      return {new_client(ian),
              add_book(atom("fable")),
              add_book(atom("fable")),
              borrow(ian, atom("fable")),
              borrow(ian, atom("fable"))};
    case ScenarioKind::MORE_THAN_FOUR:
    {
      std::vector<Stimulus> core{new_client(ian)};
      const char* titles[] = {"fable", "story", "wish", "hobby", "magic"};
      for (const char* t : titles) core.push_back(add_book(atom(t)));
      for (const char* t : titles) core.push_back(borrow(ian, atom(t)));
      return core;
    }
  }
  return {};
}

/** Legal activity by clients and titles the core never touches. */
class DecoyModel
{
 public:
  explicit DecoyModel(std::mt19937_64& rng) : d_rng(rng) {}

  Stimulus next()
  {
    static const char* names[] = {"amy", "ben", "cal", "dan", "eva", "fay", "gus", "hal",
                                  "ida", "jay", "kay", "lou", "mia", "nia", "oz",  "pam"};
    static const char* titles[] = {"atlas", "bible", "chess", "drama", "epic",
                                   "fairy", "gothic", "haiku", "idyll", "jungle"};

    std::vector<std::size_t> kinds;  // 0 register, 1 addBook, 2 borrow, 3 return
    if (d_registered.size() < std::size(names)) kinds.push_back(0);
    kinds.push_back(1);
    std::vector<std::pair<Term, Term>> borrows, returns;
    for (const Term& c : d_registered)
    {
      auto& held = d_holds[c];
      for (const Term& b : held) returns.push_back({c, b});
      if (held.size() >= 3) continue;
      for (const auto& [b, n] : d_catalog)
        if (n > 0 && !held.count(b)) borrows.push_back({c, b});
    }
    if (!borrows.empty()) kinds.push_back(2);
    if (!returns.empty()) kinds.push_back(3);

    switch (kinds[d_rng() % kinds.size()])
    {
      case 0:
      {
        Term c = atom(names[d_registered.size()]);
        d_registered.push_back(c);
        return new_client(c);
      }
      case 1:
      {
        Term b = atom(titles[d_rng() % std::size(titles)]);
        ++d_catalog[b];
        return add_book(b);
      }
      case 2:
      {
        auto [c, b] = borrows[d_rng() % borrows.size()];
        --d_catalog[b];
        d_holds[c].insert(b);
        return borrow(c, b);
      }
      default:
      {
        auto [c, b] = returns[d_rng() % returns.size()];
        ++d_catalog[b];
        d_holds[c].erase(b);
        return give_back(c, b);
      }
    }
  }

 private:
  std::mt19937_64& d_rng;
  std::vector<Term> d_registered;
  std::map<Term, std::int64_t> d_catalog;
  std::map<Term, std::set<Term>> d_holds;
};

}  // namespace

std::string_view
to_string(ScenarioKind k)
{
  return info(k).name;
}

std::optional<ScenarioKind>
scenario_from_string(std::string_view s)
{
  for (const ScenarioInfo& i : s_scenarios)
    if (i.name == s) return i.kind;
  return std::nullopt;
}

std::string_view
target_automaton(ScenarioKind k)
{
  return info(k).automaton;
}

std::string_view
target_bad_state(ScenarioKind k)
{
  return info(k).bad_state;
}

std::size_t
core_length(ScenarioKind k)
{
  return core_of(k).size();
}

std::vector<Stimulus>
case_study_stimuli()
{
  Term ian = atom("ian"), bob = atom("bob");
  return {new_client(ian),
          add_book(atom("fable")),
          add_book(atom("story")),
          add_book(atom("wish")),
          new_client(bob),
          add_book(atom("hobby")),
          borrow(ian, atom("story")),
          borrow(ian, atom("wish")),
          borrow(bob, atom("fable")),
          give_back(ian, atom("story")),
          give_back(ian, atom("fable"))};
}

std::vector<Stimulus>
generate(const Scenario& scenario)
{
  std::vector<Stimulus> core = core_of(scenario.kind);
  if (scenario.target_stimuli < core.size())
  {
    throw TargetTooSmall(std::string(to_string(scenario.kind)) + " needs at least "
                         + std::to_string(core.size()) + " stimuli");
  }

  std::vector<Stimulus> out;
  if (scenario.kind == ScenarioKind::RETURN_WRONG && scenario.target_stimuli == 11
      && scenario.seed == 0)
  {
    out = case_study_stimuli();
  }
  else
  {
    std::mt19937_64 rng(scenario.seed);
    std::size_t n = scenario.target_stimuli;
    // Choose slots for all but the last core stimulus among the first n-1.
    std::vector<std::size_t> slots(n - 1);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng() % i]);
    slots.resize(core.size() - 1);
    std::sort(slots.begin(), slots.end());

    DecoyModel decoys(rng);
    std::size_t next_core = 0;
    for (std::size_t i = 0; i + 1 < n; ++i)
    {
      if (next_core < slots.size() && slots[next_core] == i)
        out.push_back(core[next_core++]);
      else
        out.push_back(decoys.next());
    }
    out.push_back(core.back());
  }

  LibrarySystem sys;
  ReplayOutcome r = replay(sys, MockEnvironment{}, out, ReplayConfig{});
  MonitorReport report = run(library_contracts(), r.trace);
  if (!report.violation || report.violation->automaton_id != target_automaton(scenario.kind)
      || report.violation->bad_state != target_bad_state(scenario.kind))
  {
    throw std::logic_error("generated " + std::string(to_string(scenario.kind))
                           + " scenario does not reproduce its violation");
  }
  return out;
}

std::vector<Scenario>
benchmark_grid()
{
  return {{ScenarioKind::SAME_BOOK_TWICE, 23, 0},
          {ScenarioKind::SAME_BOOK_TWICE, 58, 0},
          {ScenarioKind::MORE_THAN_FOUR, 20, 0},
          {ScenarioKind::MORE_THAN_FOUR, 73, 0},
          {ScenarioKind::DIFFERENT_CLIENT, 9, 0},
          {ScenarioKind::DIFFERENT_CLIENT, 23, 0},
          {ScenarioKind::RETURN_WRONG, 11, 0},
          {ScenarioKind::RETURN_WRONG, 60, 0}};
}

}  // namespace tracemin
