#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracemin/contract_dsl.hpp"
#include "tracemin/monitor.hpp"

using namespace tracemin;
using namespace tracemin::testing;

namespace {

// Raw traces written by hand. The library registers first so that the
// monitor sees clients by name.
const char* k_prelude =
    "{trace,<0.35.0>,register,library}\n"
    "{trace,<0.35.0>,'receive',{newClient,ian}}\n"
    "{trace,<0.35.0>,spawn,<0.38.0>,{client,newClient,[ian]}}\n"
    "{trace,<0.38.0>,register,ian}\n";

Trace
hand(const std::string& body)
{
  return parse_raw(std::string(k_prelude) + body);
}

void
expect_violation(const Trace& t, const char* automaton, const char* bad, std::size_t at)
{
  MonitorReport r = run(library_contracts(), t);
  ASSERT_TRUE(r.violated());
  EXPECT_EQ(r.violation->automaton_id, automaton);
  EXPECT_EQ(r.violation->bad_state, bad);
  EXPECT_EQ(r.violation->at_seq, at);
  EXPECT_EQ(r.violation->instance_key, Term::atom("ian"));
  EXPECT_EQ(r.steps_consumed, at + 1);
  EXPECT_EQ(r.violation->witness, t.prefix(at + 1));
}

Violation
violation(const char* automaton, const char* bad)
{
  Violation v;
  v.automaton_id = automaton;
  v.bad_state    = bad;
  return v;
}

}  // namespace

TEST(HandTraces, ReturnWrong)
{
  expect_violation(hand("{trace,<0.38.0>,'receive',{returnBook,fable}}\n"),
                   "library_user", "return_wrong", 4);
}

TEST(HandTraces, MoreThanFour)
{
  std::string body;
  for (const char* b : {"a", "b", "c", "d", "e"})
    body += std::string("{trace,<0.38.0>,'receive',{lend,") + b + "}}\n";
  expect_violation(hand(body), "library_user", "more_than_four", 8);
}

TEST(HandTraces, SameBookTwice)
{
  expect_violation(hand("{trace,<0.38.0>,'receive',{lend,fable}}\n"
                        "{trace,<0.38.0>,'receive',{lend,fable}}\n"),
                   "same_book", "same_book_twice", 5);
}

TEST(HandTraces, DifferentClient)
{
  expect_violation(hand("{trace,<0.38.0>,'receive',{lend,fable}}\n"
                        "{trace,<0.38.0>,'receive',{borrowBook,story,bob}}\n"),
                   "client_identity", "different_client", 5);
}

TEST(HandTraces, ReturnAfterLendIsFine)
{
  Trace t = hand("{trace,<0.38.0>,'receive',{lend,fable}}\n"
                 "{trace,<0.38.0>,'receive',{returnBook,fable}}\n"
                 "{trace,<0.38.0>,'receive',{returned,fable}}\n"
                 "{trace,<0.38.0>,'receive',{borrowBook,fable,ian}}\n");
  MonitorReport r = run(library_contracts(), t);
  EXPECT_FALSE(r.violated());
  EXPECT_EQ(r.steps_consumed, t.size());
}

TEST(HandTraces, TieBreakByDeclarationOrder)
{
  // One event drives both automata to a bad state; the first declared wins.
  auto contracts = parse_contracts(R"(
automaton first {
  states s
  bad b1
  initial s
  trans s -> b1 on receive(_, boom)
}
automaton second {
  states s
  bad b2
  initial s
  trans s -> b2 on receive(_, boom)
}
)");
  Trace t = parse_raw("{trace,<0.1.0>,'receive',boom}");
  MonitorReport r = run(contracts, t);
  ASSERT_TRUE(r.violated());
  EXPECT_EQ(r.violation->automaton_id, "first");
  std::reverse(contracts.begin(), contracts.end());
  EXPECT_EQ(run(contracts, t).violation->automaton_id, "second");
}

TEST(Run, CaseStudy)
{
  MonitorReport r = run(library_contracts(), record_library_run(case_study_stimuli()));
  ASSERT_TRUE(r.violated());
  EXPECT_EQ(r.violation->automaton_id, "library_user");
  EXPECT_EQ(r.violation->bad_state, "return_wrong");
  EXPECT_EQ(r.violation->instance_key, Term::atom("ian"));
}

TEST(Run, EmptyTrace)
{
  MonitorReport r = run(library_contracts(), Trace{});
  EXPECT_FALSE(r.violated());
  EXPECT_EQ(r.steps_consumed, 0u);
  EXPECT_EQ(render_report(r), "OK\n");
}

TEST(Run, FiveBorrowsOfOneTitle)
{
  // Five copies of f, borrowed five times: the second lend already repeats
  // a title, so same_book fires first; with distinct titles the counter does.
  auto same = stimuli({"{library,{newClient,bob}}", "{library,{addBook,f}}",
                       "{library,{addBook,f}}", "{library,{addBook,f}}",
                       "{library,{addBook,f}}", "{library,{addBook,f}}", "{bob,{borrowBook,f}}",
                       "{bob,{borrowBook,f}}", "{bob,{borrowBook,f}}", "{bob,{borrowBook,f}}",
                       "{bob,{borrowBook,f}}"});
  auto v = library_violation(same);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->bad_state, "same_book_twice");

  auto distinct = stimuli({"{library,{newClient,bob}}", "{library,{addBook,a}}",
                           "{library,{addBook,b}}", "{library,{addBook,c}}",
                           "{library,{addBook,d}}", "{library,{addBook,e}}",
                           "{bob,{borrowBook,a}}", "{bob,{borrowBook,b}}", "{bob,{borrowBook,c}}",
                           "{bob,{borrowBook,d}}", "{bob,{borrowBook,e}}"});
  v = library_violation(distinct);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->automaton_id, "library_user");
  EXPECT_EQ(v->bad_state, "more_than_four");
  EXPECT_EQ(v->instance_key, Term::atom("bob"));
}

TEST(Run, ReplicasPerClient)
{
  Monitor m(library_contracts());
  Trace t = record_library_run(case_study_stimuli());
  for (const Event& ev : t.events)
  {
    m.feed(ev);
    if (m.violated()) break;
  }
  std::set<Term> keys;
  for (const auto& inst : m.instances())
    if (inst.contract == 1) keys.insert(*inst.state.instance_key);
  EXPECT_EQ(keys, (std::set<Term>{Term::atom("ian"), Term::atom("bob")}));
}

TEST(SameViolation, Relation)
{
  Violation a = violation("library_user", "return_wrong");
  Violation b = a;
  b.instance_key = Term::atom("bob");
  b.at_seq       = 99;
  a.instance_key = Term::atom("ian");
  EXPECT_TRUE(same_violation(a, b));
  EXPECT_FALSE(same_violation(a, violation("library_user", "more_than_four")));
  EXPECT_FALSE(same_violation(a, violation("other", "return_wrong")));

  std::vector<Violation> all = {a, b, violation("library_user", "more_than_four"),
                                violation("other", "return_wrong")};
  for (const auto& x : all)
  {
    EXPECT_TRUE(same_violation(x, x));
    for (const auto& y : all)
    {
      EXPECT_EQ(same_violation(x, y), same_violation(y, x));
      for (const auto& z : all)
        if (same_violation(x, y) && same_violation(y, z)) { EXPECT_TRUE(same_violation(x, z)); }
    }
  }
}

TEST(Run, PrefixMonotonicityAndWitness)
{
  std::mt19937_64 rng(17);
  auto contracts = library_contracts();
  int violated   = 0;
  for (int i = 0; i < 150; ++i)
  {
    auto s     = random_library_stimuli(rng, 4 + rng() % 8);
    Trace t    = record_library_run(s);
    auto first = run(contracts, t);
    EXPECT_EQ(run(contracts, t).violated(), first.violated());
    if (!first.violated()) continue;
    ++violated;
    const Violation& v = *first.violation;
    EXPECT_LT(v.at_seq, t.size());
    auto owner = std::find_if(contracts.begin(), contracts.end(), [&](const auto& c) {
      return c.id == v.automaton_id;
    });
    ASSERT_NE(owner, contracts.end());
    EXPECT_TRUE(owner->is_bad(v.bad_state));
    Trace longer = record_library_run([&] {
      auto ext = s;
      auto more = random_library_stimuli(rng, 3);
      ext.insert(ext.end(), more.begin(), more.end());
      return ext;
    }());
    auto ext_report = run(contracts, longer);
    ASSERT_TRUE(ext_report.violated());
    EXPECT_TRUE(same_violation(*ext_report.violation, v));
    EXPECT_EQ(ext_report.violation->at_seq, v.at_seq);

    auto w = run(contracts, v.witness);
    ASSERT_TRUE(w.violated());
    EXPECT_TRUE(same_violation(*w.violation, v));
    EXPECT_EQ(w.steps_consumed, v.witness.size());
  }
  EXPECT_GT(violated, 20);
}

TEST(Report, Format)
{
  Trace t         = hand("{trace,<0.38.0>,'receive',{returnBook,fable}}\n");
  MonitorReport r = run(library_contracts(), t);
  std::string text = render_report(r);
  std::string head = "VIOLATION library_user return_wrong instance=ian at=4\n";
  ASSERT_EQ(text.substr(0, head.size()), head);
  EXPECT_EQ(parse_canonical(text.substr(head.size())), t.prefix(5));
}
