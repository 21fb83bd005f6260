#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tracemin/errors.hpp"
#include "tracemin/trace.hpp"

using namespace tracemin;
using namespace tracemin::testing;

namespace {

Trace
excerpt()
{
  return parse_raw(read_text(TRACEMIN_TEST_DATA "/case_study_excerpt.txt"));
}

Trace
random_trace(std::mt19937_64& rng, std::size_t n)
{
  static const EventKind kinds[] = {EventKind::RECEIVE, EventKind::SEND,  EventKind::SPAWN,
                                    EventKind::REGISTER, EventKind::LINK, EventKind::IO,
                                    EventKind::CALL,     EventKind::RETURN};
  static const char* payloads[] = {"{newClient,bob}",
                                   "{{confirm_reg,bob},<0.38.0>}",
                                   "{<0.38.0>,{client,newClient,[bob]}}",
                                   "bob",
                                   "<0.38.0>",
                                   "{io_request,<0.38.0>,<0.23.0>,{put_chars,unicode,\"x y\"}}",
                                   "'odd atom'",
                                   "-17",
                                   "[]"};
  Trace t;
  std::int64_t us = k_replay_epoch_micros;
  for (std::size_t i = 0; i < n; ++i)
  {
    Event ev;
    ev.seq     = i;
    ev.pid     = Pid{0, static_cast<std::uint32_t>(20 + rng() % 30), static_cast<std::uint32_t>(rng() % 2)};
    ev.kind    = kinds[rng() % 8];
    ev.payload = parse_term(payloads[rng() % 9]);
    us += static_cast<std::int64_t>(rng() % 3);
    ev.ts = Timestamp::from_micros(us);
    t.events.push_back(ev);
  }
  return t;
}

}  // namespace

TEST(RawTrace, FirstCaseStudyLine)
{
  Trace t = parse_raw("{trace_ts,<0.35.0>,'receive',{newClient,bob},{1339,842747,273000}}");
  ASSERT_EQ(t.size(), 1u);
  const Event& ev = t.events[0];
  EXPECT_EQ(ev.seq, 0u);
  EXPECT_EQ(ev.pid, (Pid{0, 35, 0}));
  EXPECT_EQ(ev.kind, EventKind::RECEIVE);
  EXPECT_EQ(ev.payload, parse_term("{newClient,bob}"));
  EXPECT_EQ(ev.ts, (Timestamp{1339, 842747, 273000}));
}

TEST(RawTrace, EmptyInput)
{
  EXPECT_TRUE(parse_raw("").empty());
  EXPECT_TRUE(parse_raw("[]").empty());
}

TEST(RawTrace, CaseStudyExcerpt)
{
  Trace t = excerpt();
  ASSERT_EQ(t.size(), 9u);
  std::set<Pid> pids;
  for (std::size_t i = 0; i < t.size(); ++i)
  {
    EXPECT_EQ(t.events[i].seq, i);
    pids.insert(t.events[i].pid);
    if (i > 0) { EXPECT_LE(t.events[i - 1].ts, t.events[i].ts); }
  }
  EXPECT_EQ(t.events[0].pid, (Pid{0, 35, 0}));
  EXPECT_EQ(pids, (std::set<Pid>{{0, 35, 0}, {0, 38, 0}}));
  EXPECT_EQ(t.events[1].kind, EventKind::SPAWN);
  EXPECT_EQ(t.events[3].kind, EventKind::REGISTER);
  EXPECT_EQ(t.events[8].payload.elements()[1], Term::pid(0, 23, 0));
}

TEST(RawTrace, UnknownKindBecomesCall)
{
  Trace t = parse_raw("{trace,<0.1.0>,gc_start,[]}");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.events[0].kind, EventKind::CALL);
  EXPECT_NE(t.events[0].payload.to_string().find("gc_start"), std::string::npos);
}

TEST(RawTrace, MalformedReportsPosition)
{
  try
  {
    parse_raw("{trace_ts,<0.35.0>,'receive',\n{newClient,bob");
    FAIL();
  }
  catch (const ParseError& e)
  {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Classify, CaseStudyExcerpt)
{
  auto cls = classify(excerpt(), default_boundary());
  ASSERT_EQ(cls.size(), 9u);
  EXPECT_EQ(cls[0], EventClass::EXTERNAL_STIMULUS);
  for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(cls[i], EventClass::SYSTEM_ACTION) << i;
  EXPECT_EQ(cls[8], EventClass::ENVIRONMENT_INTERACTION);
}

TEST(Classify, SingleEvents)
{
  Trace t = excerpt();
  EXPECT_EQ(classify(t.events[0], default_boundary()), EventClass::EXTERNAL_STIMULUS);
  EXPECT_EQ(classify(t.events[1], default_boundary()), EventClass::SYSTEM_ACTION);
  Boundary b = default_boundary();
  b.mocked.insert("<0.23.0>");
  EXPECT_EQ(classify(t.events[8], b), EventClass::ENVIRONMENT_INTERACTION);
}

TEST(Stimuli, ExtractedFromCaseStudyRun)
{
  Trace t = record_library_run(case_study_stimuli());
  auto s = extract_stimuli(t, default_boundary());
  ASSERT_EQ(s.size(), 11u);
  EXPECT_EQ(s.front().to_string(), "{library,{newClient,ian}}");
  EXPECT_EQ(s.back().to_string(), "{ian,{returnBook,fable}}");
  EXPECT_EQ(s, case_study_stimuli());
}

TEST(Stimuli, EmptyProjection)
{
  EXPECT_TRUE(extract_stimuli(Trace{}, default_boundary()).empty());
  Trace t = excerpt();
  t.events.erase(t.events.begin());
  EXPECT_TRUE(extract_stimuli(t, default_boundary()).empty());
}

TEST(Stimuli, GeneratedSixtyProjectsToSixty)
{
  auto gen = generate({ScenarioKind::RETURN_WRONG, 60, 0});
  Trace t  = record_library_run(gen);
  EXPECT_EQ(extract_stimuli(t, default_boundary()), gen);
}

TEST(Stimuli, ListRoundTrip)
{
  auto s = case_study_stimuli();
  std::string text = render_stimuli(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), "{library,{newClient,ian}}");
  EXPECT_EQ(parse_stimuli(text), s);
  EXPECT_TRUE(parse_stimuli("").empty());
}

TEST(Subsequence, Examples)
{
  auto abc = stimuli({"{a,1}", "{b,2}", "{c,3}"});
  auto ac  = stimuli({"{a,1}", "{c,3}"});
  auto ca  = stimuli({"{c,3}", "{a,1}"});
  auto aa  = stimuli({"{a,1}", "{a,1}"});
  EXPECT_TRUE(is_subsequence(ac, abc));
  EXPECT_FALSE(is_subsequence(ca, abc));
  EXPECT_FALSE(is_subsequence(aa, abc));
  EXPECT_TRUE(is_subsequence({}, abc));
  auto minimal = stimuli({"{library,{newClient,ian}}", "{ian,{returnBook,story}}"});
  EXPECT_TRUE(is_subsequence(minimal, case_study_stimuli()));
}

TEST(Subsequence, IsAPartialOrderOnRandomLists)
{
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i)
  {
    auto a = random_library_stimuli(rng, rng() % 6);
    auto b = a;
    // Deleting random elements always gives a subsequence.
    for (std::size_t k = rng() % (b.size() + 1); k > 0 && !b.empty(); --k)
      b.erase(b.begin() + static_cast<std::ptrdiff_t>(rng() % b.size()));
    EXPECT_TRUE(is_subsequence(b, a));
    EXPECT_TRUE(is_subsequence(a, a));
    if (is_subsequence(a, b)) { EXPECT_EQ(a, b); }
    auto c = random_library_stimuli(rng, rng() % 6);
    if (is_subsequence(c, b)) { EXPECT_TRUE(is_subsequence(c, a)); }
  }
}

TEST(Canonical, EmptyRoundTrip)
{
  EXPECT_EQ(render_canonical(Trace{}), "");
  EXPECT_TRUE(parse_canonical("").empty());
}

TEST(Canonical, FirstLineRoundTrip)
{
  Trace t = excerpt().prefix(1);
  std::string text = render_canonical(t);
  EXPECT_EQ(parse_canonical(text), t);
  EXPECT_EQ(render_canonical(parse_canonical(text)), text);
  EXPECT_EQ(parse_trace(text), t);
}

TEST(Canonical, ExcerptRoundTrip)
{
  Trace t = excerpt();
  EXPECT_EQ(parse_canonical(render_canonical(t)), t);
}

TEST(Canonical, RandomRoundTrip)
{
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i)
  {
    Trace t = random_trace(rng, rng() % 12);
    std::string text = render_canonical(t);
    Trace back = parse_canonical(text);
    ASSERT_EQ(back, t) << text;
    ASSERT_EQ(render_canonical(back), text);
  }
}

TEST(Canonical, MalformedLine)
{
  EXPECT_THROW(parse_canonical("0\tnot-a-ts\t<0.1.0>\treceive\tok\n"), ParseError);
}
