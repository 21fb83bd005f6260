#include "tracemin/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "tracemin/contract_dsl.hpp"
#include "tracemin/errors.hpp"
#include "tracemin/pipeline.hpp"

namespace tracemin {

namespace {

/// Input problems reported with exit code 2.
class InputError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

std::string
read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void
write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

template <class F>
auto
parse_file(const std::string& path, F&& parse)
{
  std::string text = read_file(path);
  try
  {
    return parse(text);
  }
  catch (const ParseError& e)
  {
    throw InputError(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column())
                     + ": expected " + e.expected());
  }
}

std::vector<ContractAutomaton>
load_contracts(const std::string& path, std::ostream& err)
{
  if (path.empty()) return library_contracts();
  auto contracts = parse_file(path, [](const std::string& t) { return parse_contracts(t); });
  bool failed    = false;
  for (const ContractAutomaton& a : contracts)
  {
    for (const Diagnostic& d : validate(a))
    {
      err << path << ": " << a.id << ": " << (d.is_error() ? "error: " : "warning: ")
          << d.message << '\n';
      failed = failed || d.is_error();
    }
  }
  if (failed) throw InputError(path + ": invalid contract");
  return contracts;
}

struct GenOptions
{
  std::string scenario;
  std::size_t stimuli = 0;
  std::uint64_t seed  = 0;
  std::string out;
  std::string trace_out;
};

struct SimplifyOptions
{
  std::string contract;
  std::string trace;
  std::string scenario;
  std::size_t stimuli = 0;
  std::string strategy = "foreach";
  std::size_t replays  = 1;
  std::uint64_t seed   = 0;
  std::vector<std::string> mock;
  std::string mode = "A";
  bool nondeterministic = false;
  std::size_t max_events = 100000;
  std::string out;
  std::string stats;
  std::string trace_out;
};

struct BenchOptions
{
  std::vector<std::string> scenarios;
  std::size_t replays = 1;
  bool nondeterministic = false;
  std::string stats_dir;
};

ScenarioKind
scenario_or_throw(const std::string& name)
{
  auto k = scenario_from_string(name);
  if (!k) throw InputError("unknown scenario " + name);
  return *k;
}

int
cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err)
{
  std::vector<Stimulus> stimuli;
  try
  {
    stimuli = generate({scenario_or_throw(o.scenario), o.stimuli, o.seed});
  }
  catch (const TargetTooSmall& e)
  {
    err << "gen: " << e.what() << '\n';
    return exit_code::input_error;
  }
  std::string text = render_stimuli(stimuli);
  if (o.out.empty())
    out << text;
  else
    write_file(o.out, text);
  if (!o.trace_out.empty()) write_file(o.trace_out, render_canonical(record_library_run(stimuli)));
  return exit_code::ok;
}

int
cmd_monitor(const std::string& contract, const std::string& trace_path, std::ostream& out,
            std::ostream& err)
{
  auto contracts = load_contracts(contract, err);
  Trace trace    = parse_file(trace_path, [](const std::string& t) { return parse_trace(t); });
  MonitorReport report = run(contracts, trace);
  out << render_report(report);
  return report.violated() ? exit_code::violation : exit_code::ok;
}

int
cmd_validate(const std::string& contract, std::ostream& out, std::ostream& err)
{
  auto contracts = load_contracts(contract, err);
  for (const ContractAutomaton& a : contracts)
    out << a.id << ": " << a.states.size() << " states, " << a.transitions.size()
        << " transitions" << (a.foreach ? ", foreach" : "") << '\n';
  return exit_code::ok;
}

int
cmd_convert(const std::string& trace_path, const std::string& out_path, std::ostream& out)
{
  Trace trace = parse_file(trace_path, [](const std::string& t) { return parse_trace(t); });
  std::string text = render_canonical(trace);
  if (out_path.empty())
    out << text;
  else
    write_file(out_path, text);
  return exit_code::ok;
}

int
cmd_simplify(const SimplifyOptions& o, std::ostream& out, std::ostream& err)
{
  auto contracts = load_contracts(o.contract, err);

  PipelineConfig cfg;
  cfg.strategy         = *strategy_from_string(o.strategy);
  cfg.replays          = o.replays;
  cfg.seed             = o.seed;
  cfg.nondeterministic = o.nondeterministic;
  cfg.max_events       = o.max_events;
  cfg.boundary         = shift_boundary(default_boundary(),
                                std::set<std::string>(o.mock.begin(), o.mock.end()));
  cfg.boundary.mode = o.mode == "B" ? MockOption::B : MockOption::A;

  Trace trace;
  if (!o.trace.empty())
  {
    trace = parse_file(o.trace, [](const std::string& t) { return parse_trace(t); });
  }
  else
  {
    if (o.scenario.empty() || o.stimuli == 0)
      throw InputError("simplify needs --trace or --scenario with --stimuli");
    try
    {
      trace = record_library_run(generate({scenario_or_throw(o.scenario), o.stimuli, o.seed}));
    }
    catch (const TargetTooSmall& e)
    {
      throw InputError(e.what());
    }
  }

  auto emit_stimuli = [&](const std::vector<Stimulus>& s) {
    if (o.out.empty())
      out << render_stimuli(s);
    else
      write_file(o.out, render_stimuli(s));
  };

  std::optional<PipelineResult> res;
  try
  {
    res = simplify_trace(trace, contracts, cfg);
  }
  catch (const NotReproducible& e)
  {
    err << "simplify: " << e.what() << "; returning the original stimuli\n";
    emit_stimuli(extract_stimuli(trace, cfg.boundary));
    return exit_code::not_reproduced;
  }
  catch (const std::invalid_argument& e)
  {
    throw InputError(e.what());
  }
  if (!res)
  {
    err << "simplify: the input violates no contract\n";
    return exit_code::no_violation;
  }

  for (const std::string& w : res->warnings) err << "warning: " << w << '\n';
  emit_stimuli(res->result.stimuli);
  if (!o.stats.empty()) write_file(o.stats, render_stats(res->result.stats));
  if (!o.trace_out.empty()) write_file(o.trace_out, render_canonical(res->result.trace));

  std::ostream& summary = o.out.empty() ? err : out;
  const SimplifyStats& s = res->result.stats;
  summary << "target " << res->target.automaton_id << ' ' << res->target.bad_state << '\n'
          << s.strategy << ": " << s.original_stimuli << " -> " << s.final_stimuli
          << " stimuli in " << s.steps << " steps\n";
  return exit_code::ok;
}

int
cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err)
{
  std::vector<Scenario> grid;
  for (const Scenario& s : benchmark_grid())
  {
    if (o.scenarios.empty()
        || std::find(o.scenarios.begin(), o.scenarios.end(), to_string(s.kind)) != o.scenarios.end())
      grid.push_back(s);
  }
  for (const std::string& name : o.scenarios) scenario_or_throw(name);

  auto contracts = library_contracts();
  out << std::left << std::setw(18) << "scenario" << std::setw(10) << "original" << std::setw(10)
      << "strategy" << std::setw(8) << "final" << "steps\n";
  for (const Scenario& sc : grid)
  {
    Trace trace = record_library_run(generate(sc));
    for (Strategy strategy : {Strategy::DDMIN, Strategy::FOREACH})
    {
      PipelineConfig cfg;
      cfg.strategy         = strategy;
      cfg.replays          = o.replays;
      cfg.seed             = sc.seed;
      cfg.nondeterministic = o.nondeterministic;
      auto res             = simplify_trace(trace, contracts, cfg);
      if (!res)
      {
        err << "bench: scenario " << to_string(sc.kind) << " did not violate\n";
        return exit_code::no_violation;
      }
      const SimplifyStats& s = res->result.stats;
      out << std::left << std::setw(18) << to_string(sc.kind) << std::setw(10)
          << s.original_stimuli << std::setw(10) << s.strategy << std::setw(8) << s.final_stimuli
          << s.steps << '\n';
      if (!o.stats_dir.empty())
      {
        write_file(o.stats_dir + "/" + std::string(to_string(sc.kind)) + "_"
                       + std::to_string(sc.target_stimuli) + "_" + s.strategy + ".stats",
                   render_stats(s));
      }
    }
  }
  return exit_code::ok;
}

}  // namespace

int
run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Contract-guided violation trace simplification", "tracemin"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a violating library scenario");
  gen_cmd->add_option("--scenario", gen.scenario, "same_book_twice, more_than_four, "
                                                  "different_client or return_wrong")
      ->required();
  gen_cmd->add_option("--stimuli", gen.stimuli, "Number of stimuli")->required();
  gen_cmd->add_option("--seed", gen.seed, "Padding seed");
  gen_cmd->add_option("--out", gen.out, "Stimulus list file (default: stdout)");
  gen_cmd->add_option("--trace-out", gen.trace_out, "Also write the recorded trace");

  std::string monitor_contract, monitor_trace;
  auto* monitor_cmd = app.add_subcommand("monitor", "Check a trace against contracts");
  monitor_cmd->add_option("--contract", monitor_contract, "Contract file (default: library)");
  monitor_cmd->add_option("--trace", monitor_trace, "Raw or canonical trace")->required();

  std::string validate_contract;
  auto* validate_cmd = app.add_subcommand("validate", "Check a contract file");
  validate_cmd->add_option("--contract", validate_contract, "Contract file")->required();

  std::string convert_trace, convert_out;
  auto* convert_cmd = app.add_subcommand("convert", "Rewrite a trace in canonical form");
  convert_cmd->add_option("--trace", convert_trace, "Raw or canonical trace")->required();
  convert_cmd->add_option("--out", convert_out, "Output file (default: stdout)");

  SimplifyOptions simp;
  auto* simp_cmd = app.add_subcommand("simplify", "Minimize the stimuli of a violating run");
  simp_cmd->add_option("--contract", simp.contract, "Contract file (default: library)");
  auto* trace_opt = simp_cmd->add_option("--trace", simp.trace, "Violating trace");
  auto* scen_opt  = simp_cmd->add_option("--scenario", simp.scenario, "Generate the input");
  trace_opt->excludes(scen_opt);
  simp_cmd->add_option("--stimuli", simp.stimuli, "Scenario size");
  simp_cmd->add_option("--strategy", simp.strategy, "ddmin or foreach")
      ->check(CLI::IsMember({"ddmin", "foreach"}));
  simp_cmd->add_option("--replays", simp.replays, "Replays per candidate")->check(CLI::PositiveNumber);
  simp_cmd->add_option("--seed", simp.seed, "Seed for generation and replays");
  simp_cmd->add_option("--mock", simp.mock, "Extra processes to mock")->delimiter(',');
  simp_cmd->add_option("--mode", simp.mode, "Mocking option A or B")->check(CLI::IsMember({"A", "B"}));
  simp_cmd->add_flag("--nondeterministic", simp.nondeterministic, "Random scheduling in replays");
  simp_cmd->add_option("--max-events", simp.max_events, "Replay event cap")->check(CLI::PositiveNumber);
  simp_cmd->add_option("--out", simp.out, "Simplified stimuli (default: stdout)");
  simp_cmd->add_option("--stats", simp.stats, "Statistics file");
  simp_cmd->add_option("--trace-out", simp.trace_out, "Replayed trace of the result");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the shrinking benchmark grid");
  bench_cmd->add_option("--scenario", bench.scenarios, "Restrict to these scenarios");
  bench_cmd->add_option("--replays", bench.replays, "Replays per candidate")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--nondeterministic", bench.nondeterministic, "Random scheduling in replays");
  bench_cmd->add_option("--stats-dir", bench.stats_dir, "Write one stats file per row here");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::input_error;
  }

  try
  {
    if (*gen_cmd) return cmd_gen(gen, out, err);
    if (*monitor_cmd) return cmd_monitor(monitor_contract, monitor_trace, out, err);
    if (*validate_cmd) return cmd_validate(validate_contract, out, err);
    if (*convert_cmd) return cmd_convert(convert_trace, convert_out, out);
    if (*simp_cmd) return cmd_simplify(simp, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
  }
  catch (const InputError& e)
  {
    err << "tracemin: " << e.what() << '\n';
    return exit_code::input_error;
  }
  catch (const AmbiguousMatch& e)
  {
    err << "tracemin: ambiguous contract: " << e.what() << '\n';
    return exit_code::input_error;
  }
  return exit_code::input_error;
}

}  // namespace tracemin
