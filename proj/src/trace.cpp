#include <algorithm>
#include <sstream>

#include "tracemin/errors.hpp"
#include "tracemin/trace.hpp"

namespace tracemin {

namespace {

constexpr std::pair<EventKind, std::string_view> s_kind_names[] = {
    {EventKind::RECEIVE, "receive"},   {EventKind::SEND, "send"},
    {EventKind::SPAWN, "spawn"},       {EventKind::REGISTER, "register"},
    {EventKind::LINK, "link"},         {EventKind::IO, "io"},
    {EventKind::CALL, "call"},         {EventKind::RETURN, "return"},
};

}  // namespace

std::string_view
to_string(EventKind kind)
{
  for (const auto& [k, name] : s_kind_names)
    if (k == kind) return name;
  return "call";
}

std::optional<EventKind>
event_kind_from_string(std::string_view s)
{
  for (const auto& [k, name] : s_kind_names)
    if (name == s) return k;
  return std::nullopt;
}

std::string_view
to_string(EventClass c)
{
  switch (c)
  {
    case EventClass::EXTERNAL_STIMULUS: return "stimulus";
    case EventClass::ENVIRONMENT_INTERACTION: return "env_interaction";
    case EventClass::SYSTEM_ACTION: return "system_action";
  }
  return "system_action";
}

Timestamp
Timestamp::from_micros(std::int64_t us)
{
  Timestamp ts;
  ts.micro = us % 1000000;
  std::int64_t secs = us / 1000000;
  ts.secs  = secs % 1000000;
  ts.mega  = secs / 1000000;
  return ts;
}

Trace
Trace::prefix(std::size_t n) const
{
  Trace t;
  n = std::min(n, events.size());
  t.events.assign(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(n));
  return t;
}

/* -------------------------------------------------------------------------- */

namespace {

std::optional<Timestamp>
timestamp_of(const Term& t)
{
  if (!t.is_tuple() || t.elements().size() != 3) return std::nullopt;
  for (const Term& e : t.elements())
    if (!e.is_integer()) return std::nullopt;
  return Timestamp{t.elements()[0].as_integer(),
                   t.elements()[1].as_integer(),
                   t.elements()[2].as_integer()};
}

Term
timestamp_term(const Timestamp& ts)
{
  return Term::tuple({ts.mega, ts.secs, ts.micro});
}

Event
event_from_raw(const Term& t, std::size_t seq, std::size_t line, std::size_t col)
{
  auto bad = [&](const std::string& what) -> Event { throw ParseError(line, col, what); };

  if (!t.is_tuple()) return bad("trace tuple");
  const auto& e = t.elements();
  bool has_ts = !e.empty() && e[0].is_atom("trace_ts");
  if (e.empty() || !(has_ts || e[0].is_atom("trace")))
    return bad("trace_ts or trace tag");
  std::size_t min_size = has_ts ? 4 : 3;
  if (e.size() < min_size) return bad("{trace_ts, Pid, Kind, ..., Ts}");
  if (!e[1].is_pid()) return bad("pid as second element");
  if (!e[2].is_atom()) return bad("event kind atom");

  Event ev;
  ev.seq = seq;
  ev.pid = e[1].as_pid();
  std::size_t args_end = e.size();
  if (has_ts)
  {
    auto ts = timestamp_of(e.back());
    if (!ts) return bad("timestamp {Mega, Secs, Micro}");
    ev.ts = *ts;
    --args_end;
  }
  std::vector<Term> args(e.begin() + 3, e.begin() + static_cast<std::ptrdiff_t>(args_end));

  const std::string& kind = e[2].as_atom();
  auto known = event_kind_from_string(kind);
  if (kind == "return_from" || kind == "return_to") known = EventKind::RETURN;
  if (known)
  {
    ev.kind = *known;
    if (args.size() == 1)
      ev.payload = args.front();
    else
      ev.payload = Term::tuple(std::move(args));
  }
  else
  {
    ev.kind = EventKind::CALL;
    args.insert(args.begin(), e[2]);
    ev.payload = Term::tuple(std::move(args));
  }
  return ev;
}

}  // namespace

Trace
parse_raw(std::string_view text)
{
  Trace trace;
  TermReader reader(text);
  bool bracketed = reader.accept('[');
  while (!reader.at_end())
  {
    if (reader.lookahead("..."))
    {
      for (int i = 0; i < 3; ++i) reader.expect('.');
      break;
    }
    if (bracketed && reader.peek() == ']') break;
    std::size_t line = reader.line();
    std::size_t col  = reader.column();
    Term t = reader.read();
    trace.events.push_back(event_from_raw(t, trace.events.size(), line, col));
    reader.accept(',');
  }
  if (bracketed) reader.accept(']');
  if (!reader.at_end()) reader.fail("end of trace");
  return trace;
}

/* -------------------------------------------------------------------------- */

std::string
render_canonical(const Trace& trace)
{
  std::ostringstream out;
  for (const Event& ev : trace.events)
  {
    out << ev.seq << '\t' << timestamp_term(ev.ts) << '\t' << Term(ev.pid) << '\t'
        << to_string(ev.kind) << '\t' << ev.payload << '\n';
  }
  return out.str();
}

namespace {

/** Iterate lines, skipping blanks and '#' comments. */
template <class F>
void
for_each_content_line(std::string_view text, F&& f)
{
  std::size_t line_no = 0;
  while (!text.empty())
  {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    f(line, line_no);
  }
}

Term
read_field(std::string_view field, std::size_t line, std::size_t col)
{
  try
  {
    return parse_term(field);
  }
  catch (const ParseError& e)
  {
    throw ParseError(line, col + e.column() - 1, e.expected());
  }
}

}  // namespace

Trace
parse_canonical(std::string_view text)
{
  Trace trace;
  for_each_content_line(text, [&](std::string_view line, std::size_t line_no) {
    std::vector<std::string_view> fields;
    std::vector<std::size_t> cols;
    std::size_t start = 0;
    while (true)
    {
      std::size_t tab = line.find('\t', start);
      cols.push_back(start + 1);
      fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 5)
      throw ParseError(line_no, 1, "5 tab-separated fields");

    Event ev;
    Term seq = read_field(fields[0], line_no, cols[0]);
    if (!seq.is_integer() || seq.as_integer() != static_cast<std::int64_t>(trace.size()))
      throw ParseError(line_no, cols[0], "seq " + std::to_string(trace.size()));
    ev.seq = trace.size();

    auto ts = timestamp_of(read_field(fields[1], line_no, cols[1]));
    if (!ts) throw ParseError(line_no, cols[1], "timestamp {Mega,Secs,Micro}");
    ev.ts = *ts;

    Term pid = read_field(fields[2], line_no, cols[2]);
    if (!pid.is_pid()) throw ParseError(line_no, cols[2], "pid");
    ev.pid = pid.as_pid();

    auto kind = event_kind_from_string(fields[3]);
    if (!kind) throw ParseError(line_no, cols[3], "event kind");
    ev.kind = *kind;

    ev.payload = read_field(fields[4], line_no, cols[4]);
    trace.events.push_back(std::move(ev));
  });
  return trace;
}

Trace
parse_trace(std::string_view text)
{
  bool raw = false;
  std::size_t i = 0;
  while (i < text.size())
  {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
    {
      ++i;
      continue;
    }
    if (c == '#')
    {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    raw = c == '[' || c == '{';
    break;
  }
  return raw ? parse_raw(text) : parse_canonical(text);
}

/* -------------------------------------------------------------------------- */

std::string
render_stimuli(std::span<const Stimulus> stimuli)
{
  std::ostringstream out;
  for (const Stimulus& s : stimuli) out << s.to_term() << '\n';
  return out.str();
}

std::vector<Stimulus>
parse_stimuli(std::string_view text)
{
  std::vector<Stimulus> out;
  auto add = [&](const Term& t, std::size_t line, std::size_t col) {
    if (!t.is_tuple() || t.elements().size() != 2)
      throw ParseError(line, col, "{target,payload}");
    out.push_back(Stimulus{t.elements()[0], t.elements()[1]});
  };

  // Strip comment lines first so a bracketed list may span several lines.
  std::string body;
  std::size_t line_no = 0;
  std::string_view rest = text;
  while (!rest.empty())
  {
    ++line_no;
    std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    std::size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') body += line;
    body += '\n';
  }

  TermReader reader(body);
  bool bracketed = reader.accept('[');
  while (!reader.at_end())
  {
    if (bracketed && reader.peek() == ']') break;
    std::size_t line = reader.line();
    std::size_t col  = reader.column();
    add(reader.read(), line, col);
    reader.accept(',');
  }
  if (bracketed) reader.expect(']');
  if (!reader.at_end()) reader.fail("end of stimulus list");
  return out;
}

bool
is_subsequence(std::span<const Stimulus> candidate, std::span<const Stimulus> original)
{
  std::size_t j = 0;
  for (const Stimulus& s : original)
  {
    if (j == candidate.size()) break;
    if (candidate[j] == s) ++j;
  }
  return j == candidate.size();
}

}  // namespace tracemin
