#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "tracemin/cli.hpp"

using namespace tracemin;
namespace fs = std::filesystem;

namespace {

struct Result
{
  int code = 0;
  std::string out;
  std::string err;
};

Result
cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "tracemin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out  = out.str();
  r.err  = err.str();
  return r;
}

class Cli : public ::testing::Test
{
 protected:
  void SetUp() override
  {
    d_dir = fs::temp_directory_path()
            / ("tracemin_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed())
               + "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(d_dir);
    fs::create_directories(d_dir);
  }
  void TearDown() override { fs::remove_all(d_dir); }

  std::string path(const std::string& name) const { return (d_dir / name).string(); }

  std::string write(const std::string& name, const std::string& text) const
  {
    std::ofstream(path(name), std::ios::binary) << text;
    return path(name);
  }

  fs::path d_dir;
};

std::size_t
lines(const std::string& s)
{
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_F(Cli, GenCaseStudy)
{
  Result r = cli({"gen", "--scenario", "return_wrong", "--stimuli", "11", "--seed", "0"});
  EXPECT_EQ(r.code, exit_code::ok);
  EXPECT_EQ(r.out, render_stimuli(case_study_stimuli()));

  std::string out = path("s.txt");
  r = cli({"gen", "--scenario", "more_than_four", "--stimuli", "73", "--seed", "7", "--out", out,
           "--trace-out", path("t.txt")});
  EXPECT_EQ(r.code, exit_code::ok);
  EXPECT_EQ(lines(tracemin::testing::read_text(out)), 73u);

  r = cli({"simplify", "--trace", path("t.txt")});
  EXPECT_EQ(r.code, exit_code::ok);
  EXPECT_NE(r.err.find("target library_user more_than_four"), std::string::npos);
}

TEST_F(Cli, GenBelowCore)
{
  Result r = cli({"gen", "--scenario", "return_wrong", "--stimuli", "1"});
  EXPECT_EQ(r.code, exit_code::input_error);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"gen", "--scenario", "bogus", "--stimuli", "5"}).code, exit_code::input_error);
}

TEST_F(Cli, MonitorViolationAndOk)
{
  std::string trace = path("t.txt");
  ASSERT_EQ(cli({"gen", "--scenario", "return_wrong", "--stimuli", "11", "--out", path("s.txt"),
                 "--trace-out", trace})
                .code,
            0);
  Result r = cli({"monitor", "--contract", TRACEMIN_CONTRACT_DIR "/library.contract", "--trace", trace});
  EXPECT_EQ(r.code, exit_code::violation);
  EXPECT_EQ(r.out.rfind("VIOLATION library_user return_wrong ", 0), 0u);

  Result ok = cli({"monitor", "--trace", write("empty.txt", "")});
  EXPECT_EQ(ok.code, exit_code::ok);
  EXPECT_EQ(ok.out, "OK\n");
}

TEST_F(Cli, MonitorRawExcerpt)
{
  Result r = cli({"monitor", "--trace", TRACEMIN_TEST_DATA "/case_study_excerpt.txt"});
  EXPECT_EQ(r.code, exit_code::ok);
}

TEST_F(Cli, MalformedContract)
{
  std::string text(library_contract_text());
  std::string bad = write("bad.contract", text.substr(0, 300));
  Result r = cli({"monitor", "--contract", bad, "--trace", write("empty.txt", "")});
  EXPECT_EQ(r.code, exit_code::input_error);
  EXPECT_NE(r.err.find(bad + ":"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"validate", "--contract", bad}).code, exit_code::input_error);
  EXPECT_EQ(cli({"validate", "--contract", TRACEMIN_CONTRACT_DIR "/library.contract"}).code, 0);
}

TEST_F(Cli, MissingFileAndBadFlags)
{
  EXPECT_EQ(cli({"monitor", "--trace", path("nope.txt")}).code, exit_code::input_error);
  EXPECT_EQ(cli({"simplify", "--strategy", "quick", "--scenario", "return_wrong", "--stimuli", "11"}).code,
            exit_code::input_error);
  EXPECT_EQ(cli({"frobnicate"}).code, exit_code::input_error);
  EXPECT_EQ(cli({"--help"}).code, exit_code::ok);
}

TEST_F(Cli, SimplifyCaseStudy)
{
  std::string out = path("min.txt"), stats = path("min.stats");
  Result r = cli({"simplify", "--scenario", "return_wrong", "--stimuli", "11", "--seed", "0",
                  "--strategy", "foreach", "--out", out, "--stats", stats});
  ASSERT_EQ(r.code, exit_code::ok) << r.err;
  auto result = parse_stimuli(tracemin::testing::read_text(out));
  EXPECT_EQ(result.size(), 2u);
  EXPECT_TRUE(tracemin::testing::violates(result, "library_user", "return_wrong"));
  SimplifyStats s = parse_stats(tracemin::testing::read_text(stats));
  EXPECT_EQ(s.passes.size(), 2u);
  EXPECT_EQ(s.final_stimuli, 2u);
  EXPECT_NE(r.out.find("foreach: 11 -> 2"), std::string::npos);
}

TEST_F(Cli, SimplifySixtyDdminTakesMoreSteps)
{
  auto steps = [&](const char* strategy) {
    std::string stats = path(std::string(strategy) + ".stats");
    Result r = cli({"simplify", "--scenario", "return_wrong", "--stimuli", "60", "--strategy",
                    strategy, "--out", path("o.txt"), "--stats", stats});
    EXPECT_EQ(r.code, 0);
    SimplifyStats s = parse_stats(tracemin::testing::read_text(stats));
    EXPECT_EQ(s.final_stimuli, 2u);
    return s.steps;
  };
  std::size_t d = steps("ddmin"), f = steps("foreach");
  EXPECT_GE(d, f);
}

TEST_F(Cli, SimplifyNoViolation)
{
  std::string trace = path("t.txt");
  ASSERT_EQ(cli({"gen", "--scenario", "return_wrong", "--stimuli", "11", "--out", path("s.txt"),
                 "--trace-out", trace})
                .code,
            0);
  Trace t = parse_trace(tracemin::testing::read_text(trace));
  std::string clean = write("clean.txt", render_canonical(t.prefix(5)));
  EXPECT_EQ(cli({"simplify", "--trace", clean}).code, exit_code::no_violation);
}

TEST_F(Cli, SimplifyNotReproducible)
{
  // ian's handler exists without a newClient stimulus, so a replay of the
  // lone return never reaches it.
  std::string trace = write("t.txt",
                            "{trace,<0.35.0>,register,library}\n"
                            "{trace,<0.35.0>,spawn,<0.38.0>,{client,newClient,[ian]}}\n"
                            "{trace,<0.38.0>,register,ian}\n"
                            "{trace,<0.38.0>,'receive',{returnBook,fable}}\n");
  std::string out = path("o.txt");
  Result r = cli({"simplify", "--trace", trace, "--out", out});
  EXPECT_EQ(r.code, exit_code::not_reproduced);
  EXPECT_EQ(tracemin::testing::read_text(out), "{ian,{returnBook,fable}}\n");
}

TEST_F(Cli, SimplifyWithMockedDatabase)
{
  Result r = cli({"simplify", "--scenario", "same_book_twice", "--stimuli", "23", "--mock", "db",
                  "--out", path("o.txt")});
  EXPECT_EQ(r.code, exit_code::ok) << r.err;
  EXPECT_EQ(lines(tracemin::testing::read_text(path("o.txt"))), 5u);
  Result b = cli({"simplify", "--scenario", "return_wrong", "--stimuli", "11", "--mock", "db",
                  "--mode", "B", "--nondeterministic", "--out", path("p.txt")});
  EXPECT_EQ(b.code, exit_code::input_error);
}

TEST_F(Cli, ConvertRoundTrip)
{
  Result r = cli({"convert", "--trace", TRACEMIN_TEST_DATA "/case_study_excerpt.txt"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out), 9u);
  std::string canon = write("c.txt", r.out);
  EXPECT_EQ(cli({"convert", "--trace", canon}).out, r.out);
}

TEST_F(Cli, BenchRows)
{
  Result one = cli({"bench", "--scenario", "return_wrong", "--stats-dir", d_dir.string()});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(lines(one.out), 5u);  // header + 4 rows
  EXPECT_TRUE(fs::exists(path("return_wrong_60_foreach.stats")));

  Result all = cli({"bench"});
  ASSERT_EQ(all.code, 0);
  EXPECT_EQ(lines(all.out), 17u);
  EXPECT_EQ(cli({"bench"}).out, all.out);
}
