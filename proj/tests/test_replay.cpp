#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracemin/replay.hpp"

using namespace tracemin;
using namespace tracemin::testing;

namespace {

Boundary
with_db(MockOption mode = MockOption::A)
{
  Boundary b = shift_boundary(default_boundary(), {"db"});
  b.mode     = mode;
  return b;
}

ReplayConfig
config(Boundary b, std::uint64_t seed = 0)
{
  ReplayConfig c;
  c.seed     = seed;
  c.boundary = std::move(b);
  return c;
}

std::size_t
count_kind(const Trace& t, EventKind k)
{
  return static_cast<std::size_t>(std::count_if(
      t.events.begin(), t.events.end(), [&](const Event& e) { return e.kind == k; }));
}

}  // namespace

TEST(Capture, IoServerIsSinkOnly)
{
  Trace t = parse_raw(read_text(TRACEMIN_TEST_DATA "/case_study_excerpt.txt"));
  MockEnvironment m = capture(t, default_boundary());
  ASSERT_TRUE(m.covers("<0.23.0>"));
  EXPECT_TRUE(m.responses("<0.23.0>").empty());
  EXPECT_EQ(m.mode, MockOption::A);
}

TEST(Capture, ResponsesInOrder)
{
  Boundary b = shift_boundary(default_boundary(), {"<0.50.0>"});
  Trace t    = parse_raw(
      "{trace,<0.35.0>,send,{ask,1},<0.50.0>}\n"
      "{trace,<0.35.0>,'receive',{confirm,x}}\n"
      "{trace,<0.35.0>,send,{ask,2},<0.50.0>}\n"
      "{trace,<0.50.0>,send,{confirm,x},<0.35.0>}\n"
      "{trace,<0.35.0>,'receive',{confirm,x}}\n");
  MockEnvironment m = capture(t, b);
  ASSERT_TRUE(m.covers("<0.50.0>"));
  EXPECT_EQ(m.responses("<0.50.0>"),
            (std::vector<Term>{parse_term("{confirm,x}"), parse_term("{confirm,x}")}));
  EXPECT_EQ(m.responses("<0.50.0>", "ask").size(), 2u);
  EXPECT_TRUE(m.responses("<0.50.0>", "other").empty());
}

TEST(Capture, StimuliAreNotRecorded)
{
  Trace t           = record_library_run(case_study_stimuli());
  MockEnvironment m = capture(t, default_boundary());
  for (const auto& [ref, list] : m.recorded) EXPECT_TRUE(list.empty()) << ref;
}

TEST(Capture, DatabaseReplies)
{
  auto s            = stimuli({"{library,{addBook,x}}", "{library,{addBook,y}}"});
  Trace t           = record_library_run(s);
  MockEnvironment m = capture(t, with_db());
  ASSERT_TRUE(m.covers("db"));
  EXPECT_EQ(m.responses("db", "store"),
            (std::vector<Term>{parse_term("{db,{stored,x}}"), parse_term("{db,{stored,y}}")}));
}

TEST(Replay, ModeAStaysConfined)
{
  auto s     = case_study_stimuli();
  Trace full = record_library_run(s);
  Boundary b = with_db();
  LibrarySystem sys;
  ReplayOutcome out = replay(sys, capture(full, b), s, config(b));
  EXPECT_EQ(out.live_interactions, 0u);
  EXPECT_EQ(sys.live_calls(), 0u);
  EXPECT_EQ(out.mock_misses, 0u);
  EXPECT_EQ(extract_stimuli(out.trace, b), s);
  auto v = run(library_contracts(), out.trace).violation;
  ASSERT_TRUE(v);
  EXPECT_EQ(v->bad_state, "return_wrong");
}

TEST(Replay, ModeBReachesLiveEnvironment)
{
  auto s     = case_study_stimuli();
  Boundary b = with_db(MockOption::B);
  LibrarySystem sys;
  ReplayOutcome out = replay(sys, MockEnvironment{}, s, config(b));
  EXPECT_GT(out.live_interactions, 0u);
  EXPECT_EQ(out.live_interactions, sys.live_calls());
  EXPECT_EQ(out.mock_misses, 0u);

  LibrarySystem nondet(true);
  EXPECT_THROW(replay(nondet, MockEnvironment{}, s, config(b)), std::invalid_argument);
}

TEST(Replay, ExhaustedMockBlocks)
{
  auto one   = stimuli({"{library,{addBook,x}}"});
  Boundary b = with_db();
  MockEnvironment m = capture(record_library_run(one), b);

  auto more = stimuli({"{library,{addBook,x}}", "{library,{addBook,y}}",
                       "{library,{newClient,ian}}"});
  LibrarySystem sys;
  ReplayOutcome out = replay(sys, m, more, config(b));
  EXPECT_EQ(out.mock_misses, 1u);
  // The blocked library never gets to spawn ian's handler.
  EXPECT_EQ(count_kind(out.trace, EventKind::SPAWN), 0u);
  EXPECT_TRUE(sys.clients().empty());
}

TEST(Replay, DeterministicIsByteIdentical)
{
  auto s = generate({ScenarioKind::MORE_THAN_FOUR, 73, 0});
  LibrarySystem a, b;
  Trace x = replay(a, MockEnvironment{}, s, config(default_boundary(), 5)).trace;
  Trace y = replay(b, MockEnvironment{}, s, config(default_boundary(), 9)).trace;
  EXPECT_EQ(render_canonical(x), render_canonical(y));
  EXPECT_EQ(x, record_library_run(s));
}

TEST(Replay, SeededNondeterminism)
{
  std::mt19937_64 rng(8);
  bool any_difference = false;
  for (int i = 0; i < 20; ++i)
  {
    auto s = random_library_stimuli(rng, 12);
    for (std::uint64_t seed = 0; seed < 4; ++seed)
    {
      LibrarySystem a(true), b(true);
      Trace x = replay(a, MockEnvironment{}, s, config(default_boundary(), seed)).trace;
      Trace y = replay(b, MockEnvironment{}, s, config(default_boundary(), seed)).trace;
      EXPECT_EQ(x, y);
      if (x != record_library_run(s)) any_difference = true;
      auto got = extract_stimuli(x, default_boundary());
      EXPECT_LE(got.size(), s.size());
      EXPECT_TRUE(a.conserved());
    }
  }
  EXPECT_TRUE(any_difference);
}

TEST(Replay, SubsequenceFidelity)
{
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i)
  {
    auto s   = random_library_stimuli(rng, 10);
    auto sub = s;
    for (std::size_t k = rng() % 6; k > 0; --k)
      sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(rng() % sub.size()));
    Trace full          = record_library_run(s);
    MockEnvironment m   = capture(full, default_boundary());
    LibrarySystem sys;
    ReplayOutcome out   = replay(sys, m, sub, config(default_boundary()));
    auto replayed       = extract_stimuli(out.trace, default_boundary());
    EXPECT_EQ(replayed, extract_stimuli(record_library_run(sub), default_boundary()));
    EXPECT_TRUE(is_subsequence(replayed, sub));
    EXPECT_TRUE(sys.conserved());
  }
}

TEST(Replay, BudgetTruncates)
{
  auto s = case_study_stimuli();
  ReplayConfig c = config(default_boundary());
  c.max_events   = 10;
  LibrarySystem sys;
  ReplayOutcome out = replay(sys, MockEnvironment{}, s, c);
  EXPECT_TRUE(out.budget_exceeded);
  EXPECT_EQ(out.trace.size(), 10u);

  c.max_events = 100000;
  EXPECT_FALSE(replay(sys, MockEnvironment{}, s, c).budget_exceeded);
}

TEST(Replay, SinkNumbersEvents)
{
  EventSink sink(3);
  for (int i = 0; i < 5; ++i) sink.emit(Pid{0, 1, 0}, EventKind::IO, Term::integer(i));
  EXPECT_TRUE(sink.truncated());
  Trace t = sink.take();
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
  {
    EXPECT_EQ(t.events[i].seq, i);
    EXPECT_EQ(t.events[i].ts.to_micros(), k_replay_epoch_micros + static_cast<std::int64_t>(i));
  }
}

TEST(Boundary, Shift)
{
  Boundary b = shift_boundary(default_boundary(), {"db", "user"});
  EXPECT_TRUE(b.mocks("db"));
  EXPECT_TRUE(b.mocks("<0.23.0>"));
  EXPECT_EQ(b.mode, MockOption::A);
  EXPECT_EQ(shift_boundary(b, {}), b);
}

TEST(Boundary, ShiftingReclassifiesDatabaseTraffic)
{
  Trace t    = record_library_run(stimuli({"{library,{addBook,x}}"}));
  auto plain = classify(t, default_boundary());
  auto moved = classify(t, with_db());
  std::size_t env_plain = static_cast<std::size_t>(
      std::count(plain.begin(), plain.end(), EventClass::ENVIRONMENT_INTERACTION));
  std::size_t env_moved = static_cast<std::size_t>(
      std::count(moved.begin(), moved.end(), EventClass::ENVIRONMENT_INTERACTION));
  EXPECT_GT(env_moved, env_plain);
  EXPECT_EQ(extract_stimuli(t, default_boundary()), extract_stimuli(t, with_db()));
}
