#include "tracemin/simplifier.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "tracemin/errors.hpp"

namespace tracemin {

bool
simpler_than(const ViolatingRun& a, const ViolatingRun& b)
{
  return same_violation(a.violation, b.violation) && a.stimuli.size() < b.stimuli.size()
         && is_subsequence(a.stimuli, b.stimuli);
}

bool
PredicateOracle::reproduces(const std::vector<Stimulus>& candidate)
{
  ++d_steps;
  bool r = d_pred(candidate);
  if (r) ++d_successes;
  return r;
}

/* -------------------------------------------------------------------------- */

namespace {

std::vector<Term>
key_of(const std::vector<Stimulus>& stimuli)
{
  std::vector<Term> key;
  key.reserve(stimuli.size());
  for (const Stimulus& s : stimuli) key.push_back(s.to_term());
  return key;
}

}  // namespace

ReplayOracle::ReplayOracle(const CapturedSystem& prototype,
                           MockEnvironment mock,
                           std::vector<ContractAutomaton> contracts,
                           OracleConfig cfg,
                           ReplayConfig replay_cfg)
    : d_system(prototype.clone()),
      d_mock(std::move(mock)),
      d_contracts(std::move(contracts)),
      d_cfg(std::move(cfg)),
      d_replay(std::move(replay_cfg))
{
  if (d_cfg.replays == 0) throw std::invalid_argument("replays per candidate must be at least 1");
}

bool
ReplayOracle::reproduces(const std::vector<Stimulus>& candidate)
{
  for (std::size_t i = 0; i < d_cfg.replays; ++i)
  {
    ++d_steps;
    ReplayConfig rc = d_replay;
    rc.seed         = d_cfg.seed_base + i;
    ReplayOutcome out = replay(*d_system, d_mock, candidate, rc);
    if (out.budget_exceeded)
    {
      ++d_warnings;
      continue;
    }
    MonitorReport report = run(d_contracts, out.trace);
    if (report.violation && same_violation(*report.violation, d_cfg.target))
    {
      ++d_successes;
      d_witnesses[key_of(candidate)] = {std::move(out.trace), std::move(*report.violation)};
      return true;
    }
  }
  return false;
}

std::optional<std::pair<Trace, Violation>>
ReplayOracle::witness(const std::vector<Stimulus>& candidate) const
{
  auto it = d_witnesses.find(key_of(candidate));
  if (it == d_witnesses.end()) return std::nullopt;
  return it->second;
}

/* -------------------------------------------------------------------------- */

namespace {

using Units = std::vector<std::size_t>;

Units
without(const Units& c, std::size_t begin, std::size_t end)
{
  Units out(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(begin));
  out.insert(out.end(), c.begin() + static_cast<std::ptrdiff_t>(end), c.end());
  return out;
}

/**
 * Zeller-Hildebrandt ddmin over abstract units. 'test' is consulted on
 * non-empty proper subsets only; 'accept' sees every reduction.
 */
Units
ddmin_units(Units c,
            const std::function<bool(const Units&)>& test,
            const std::function<void(const Units&)>& accept)
{
  std::size_t n = 2;
  while (c.size() >= 2)
  {
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    for (std::size_t i = 0; i < n; ++i) bounds.push_back({i * c.size() / n, (i + 1) * c.size() / n});

    bool reduced = false;
    for (auto [b, e] : bounds)
    {
      Units chunk(c.begin() + static_cast<std::ptrdiff_t>(b), c.begin() + static_cast<std::ptrdiff_t>(e));
      if (test(chunk))
      {
        c       = std::move(chunk);
        n       = 2;
        reduced = true;
        break;
      }
    }
    if (!reduced && n > 2)
    {
      for (auto [b, e] : bounds)
      {
        Units complement = without(c, b, e);
        if (test(complement))
        {
          c       = std::move(complement);
          n       = std::max<std::size_t>(n - 1, 2);
          reduced = true;
          break;
        }
      }
    }
    if (reduced)
    {
      accept(c);
      continue;
    }
    if (n >= c.size()) break;
    n = std::min(c.size(), 2 * n);
  }
  return c;
}

class Search
{
 public:
  Search(const std::vector<Stimulus>& all, Oracle& oracle, SimplifyResult& result)
      : d_all(all), d_oracle(oracle), d_result(result)
  {
  }

  std::vector<Stimulus> materialize(const Units& idx) const
  {
    std::vector<Stimulus> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(d_all[i]);
    return out;
  }

  bool test(const Units& idx)
  {
    auto it = d_cache.find(idx);
    if (it != d_cache.end()) return it->second;
    bool r        = d_oracle.reproduces(materialize(idx));
    d_cache[idx]  = r;
    return r;
  }

  bool test_uncached(const Units& idx)
  {
    bool r       = d_oracle.reproduces(materialize(idx));
    d_cache[idx] = r;
    return r;
  }

  void accept(const Units& idx) { d_result.accepted.push_back(idx.size()); }

  /** ddmin over single stimuli, then singleton-removal checks until none succeeds. */
  Units minimize(Units c)
  {
    auto test_fn   = [this](const Units& u) { return test(u); };
    auto accept_fn = [this](const Units& u) { accept(u); };
    c              = ddmin_units(std::move(c), test_fn, accept_fn);
    while (true)
    {
      bool reduced = false;
      for (std::size_t i = 0; i < c.size(); ++i)
      {
        Units probe = without(c, i, i + 1);
        if (test_uncached(probe))
        {
          accept(probe);
          c       = ddmin_units(std::move(probe), test_fn, accept_fn);
          reduced = true;
          break;
        }
      }
      if (!reduced) return c;
    }
  }

 private:
  const std::vector<Stimulus>& d_all;
  Oracle& d_oracle;
  SimplifyResult& d_result;
  std::map<Units, bool> d_cache;
};

Units
iota(std::size_t n)
{
  Units u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = i;
  return u;
}

void
finish(SimplifyResult& res, const std::vector<Stimulus>& stimuli, const Search& search,
       const Units& kept, Oracle& oracle, std::size_t steps0, std::size_t successes0)
{
  res.stimuli = search.materialize(kept);
  if (auto w = oracle.witness(res.stimuli))
  {
    res.trace     = std::move(w->first);
    res.violation = std::move(w->second);
  }
  res.stats.original_stimuli = stimuli.size();
  res.stats.final_stimuli    = res.stimuli.size();
  res.stats.steps            = oracle.steps() - steps0;
  res.stats.successful_steps = oracle.successes() - successes0;
  res.stats.warnings         = oracle.warnings();
}

}  // namespace

SimplifyResult
ddmin(const std::vector<Stimulus>& stimuli, Oracle& oracle)
{
  std::size_t steps0 = oracle.steps(), successes0 = oracle.successes();
  SimplifyResult res;
  res.stats.strategy = "ddmin";
  Search search(stimuli, oracle, res);

  Units all = iota(stimuli.size());
  if (!search.test(all)) throw NotReproducible("the original stimuli do not reproduce the violation");
  res.accepted.push_back(all.size());

  Units kept = search.minimize(all);

  PassStats pass;
  pass.name             = "ddmin";
  pass.input            = stimuli.size();
  pass.output           = kept.size();
  pass.steps            = oracle.steps() - steps0;
  pass.successful_steps = oracle.successes() - successes0;
  res.stats.passes.push_back(pass);
  finish(res, stimuli, search, kept, oracle, steps0, successes0);
  return res;
}

StimulusGroups
group_stimuli(const std::vector<Stimulus>& stimuli, const ForeachSpec& spec)
{
  StimulusGroups g;
  for (std::size_t i = 0; i < stimuli.size(); ++i)
  {
    auto key = spec.attribute(stimuli[i]);
    if (!key)
    {
      g.ambient.push_back(i);
      continue;
    }
    auto it = std::find_if(g.instances.begin(), g.instances.end(), [&](const auto& p) {
      return p.first == *key;
    });
    if (it == g.instances.end())
      g.instances.push_back({*key, {i}});
    else
      it->second.push_back(i);
  }
  return g;
}

SimplifyResult
foreach_ddmin(const std::vector<Stimulus>& stimuli, const ContractAutomaton& contract, Oracle& oracle)
{
  if (!contract.foreach)
    throw std::invalid_argument("contract " + contract.id + " has no foreach clause");

  std::size_t steps0 = oracle.steps(), successes0 = oracle.successes();
  SimplifyResult res;
  res.stats.strategy = "foreach";
  Search search(stimuli, oracle, res);

  Units all = iota(stimuli.size());
  if (!search.test(all)) throw NotReproducible("the original stimuli do not reproduce the violation");
  res.accepted.push_back(all.size());

  StimulusGroups groups = group_stimuli(stimuli, *contract.foreach);
  auto flatten          = [&](const Units& group_ids) {
    Units idx = groups.ambient;
    for (std::size_t g : group_ids)
    {
      const auto& members = groups.instances[g].second;
      idx.insert(idx.end(), members.begin(), members.end());
    }
    std::sort(idx.begin(), idx.end());
    return idx;
  };

  Units kept_groups = iota(groups.instances.size());
  if (kept_groups.size() > 1)
  {
    kept_groups = ddmin_units(
        kept_groups,
        [&](const Units& g) { return search.test(flatten(g)); },
        [&](const Units& g) { search.accept(flatten(g)); });
  }
  Units remaining = flatten(kept_groups);

  PassStats p1;
  p1.name             = "groups";
  p1.input            = stimuli.size();
  p1.output           = remaining.size();
  p1.steps            = oracle.steps() - steps0;
  p1.successful_steps = oracle.successes() - successes0;
  res.stats.passes.push_back(p1);

  std::size_t steps1 = oracle.steps(), successes1 = oracle.successes();
  Units kept         = search.minimize(remaining);

  PassStats p2;
  p2.name             = "stimuli";
  p2.input            = remaining.size();
  p2.output           = kept.size();
  p2.steps            = oracle.steps() - steps1;
  p2.successful_steps = oracle.successes() - successes1;
  res.stats.passes.push_back(p2);

  finish(res, stimuli, search, kept, oracle, steps0, successes0);
  return res;
}

/* -------------------------------------------------------------------------- */

std::string
render_stats(const SimplifyStats& s)
{
  std::ostringstream out;
  out << "# tracemin-stats v1\n"
      << "strategy=" << s.strategy << '\n'
      << "original_stimuli=" << s.original_stimuli << '\n'
      << "final_stimuli=" << s.final_stimuli << '\n'
      << "steps=" << s.steps << '\n'
      << "successful_steps=" << s.successful_steps << '\n'
      << "warnings=" << s.warnings << '\n'
      << "passes=" << s.passes.size() << '\n';
  for (std::size_t i = 0; i < s.passes.size(); ++i)
  {
    const PassStats& p = s.passes[i];
    std::string pre    = "pass." + std::to_string(i + 1) + ".";
    out << pre << "name=" << p.name << '\n'
        << pre << "input=" << p.input << '\n'
        << pre << "output=" << p.output << '\n'
        << pre << "steps=" << p.steps << '\n'
        << pre << "successful_steps=" << p.successful_steps << '\n';
  }
  return out.str();
}

SimplifyStats
parse_stats(std::string_view text)
{
  SimplifyStats s;
  std::size_t line_no = 0;
  bool header         = false;
  while (!text.empty())
  {
    ++line_no;
    std::size_t nl        = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    if (line[0] == '#')
    {
      if (line == "# tracemin-stats v1") header = true;
      continue;
    }
    if (!header) throw ParseError(line_no, 1, "'# tracemin-stats v1' header");
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "key=value");
    std::string key(line.substr(0, eq));
    std::string value(line.substr(eq + 1));
    auto number = [&]() -> std::size_t {
      try
      {
        return std::stoul(value);
      }
      catch (const std::exception&)
      {
        throw ParseError(line_no, eq + 2, "unsigned integer");
      }
    };

    if (key == "strategy")
      s.strategy = value;
    else if (key == "original_stimuli")
      s.original_stimuli = number();
    else if (key == "final_stimuli")
      s.final_stimuli = number();
    else if (key == "steps")
      s.steps = number();
    else if (key == "successful_steps")
      s.successful_steps = number();
    else if (key == "warnings")
      s.warnings = number();
    else if (key == "passes")
      s.passes.resize(number());
    else if (key.starts_with("pass."))
    {
      std::size_t dot = key.find('.', 5);
      if (dot == std::string::npos) throw ParseError(line_no, 1, "pass.N.field");
      std::size_t idx = std::stoul(key.substr(5, dot - 5));
      if (idx == 0 || idx > s.passes.size()) throw ParseError(line_no, 6, "declared pass index");
      PassStats& p      = s.passes[idx - 1];
      std::string field = key.substr(dot + 1);
      if (field == "name")
        p.name = value;
      else if (field == "input")
        p.input = number();
      else if (field == "output")
        p.output = number();
      else if (field == "steps")
        p.steps = number();
      else if (field == "successful_steps")
        p.successful_steps = number();
    }
  }
  if (!header) throw ParseError(1, 1, "'# tracemin-stats v1' header");
  return s;
}

}  // namespace tracemin
