#include "tracemin/term.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

#include "tracemin/errors.hpp"

namespace tracemin {

ParseError::ParseError(std::size_t line, std::size_t column, std::string expected)
    : std::runtime_error("parse error at " + std::to_string(line) + ":"
                         + std::to_string(column) + ": expected " + expected),
      d_line(line),
      d_column(column),
      d_expected(std::move(expected))
{
}

/* -------------------------------------------------------------------------- */

bool
Term::is_atom(std::string_view name) const
{
  return is_atom() && as_atom() == name;
}

const std::vector<Term>&
Term::elements() const
{
  if (is_tuple()) return std::get<Tuple>(d_value).elements;
  return std::get<List>(d_value).elements;
}

std::string_view
Term::tag() const
{
  if (!is_tuple()) return {};
  const auto& elems = elements();
  if (elems.empty() || !elems.front().is_atom()) return {};
  return elems.front().as_atom();
}

int
compare(const Term& a, const Term& b)
{
  if (a.d_value.index() != b.d_value.index())
  {
    return a.d_value.index() < b.d_value.index() ? -1 : 1;
  }
  switch (a.kind())
  {
    case Term::Kind::ATOM: return a.as_atom().compare(b.as_atom());
    case Term::Kind::STRING: return a.as_string().compare(b.as_string());
    case Term::Kind::INTEGER:
      return a.as_integer() < b.as_integer() ? -1 : (a.as_integer() > b.as_integer());
    case Term::Kind::PID:
      return a.as_pid() < b.as_pid() ? -1 : (a.as_pid() == b.as_pid() ? 0 : 1);
    case Term::Kind::TUPLE:
    case Term::Kind::LIST:
    {
      const auto& x = a.elements();
      const auto& y = b.elements();
      if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
      for (std::size_t i = 0; i < x.size(); ++i)
      {
        int c = compare(x[i], y[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool
is_bare_atom(std::string_view name)
{
  if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
  for (char c : name)
  {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')
              || (c >= '0' && c <= '9') || c == '_' || c == '@';
    if (!ok) return false;
  }
  return true;
}

namespace {

void
write_escaped(std::ostream& out, const std::string& s, char quote)
{
  out << quote;
  for (char c : s)
  {
    switch (c)
    {
      case '\\': out << "\\\\"; break;
      case '\n': out << "\\n"; break;
      case '\t': out << "\\t"; break;
      case '\r': out << "\\r"; break;
      default:
        if (c == quote)
          out << '\\' << c;
        else
          out << c;
    }
  }
  out << quote;
}

void
write_term(std::ostream& out, const Term& t)
{
  switch (t.kind())
  {
    case Term::Kind::ATOM:
      if (is_bare_atom(t.as_atom()))
        out << t.as_atom();
      else
        write_escaped(out, t.as_atom(), '\'');
      break;
    case Term::Kind::INTEGER: out << t.as_integer(); break;
    case Term::Kind::STRING: write_escaped(out, t.as_string(), '"'); break;
    case Term::Kind::PID:
    {
      const Pid& p = t.as_pid();
      out << '<' << p.node << '.' << p.id << '.' << p.serial << '>';
      break;
    }
    case Term::Kind::TUPLE:
    case Term::Kind::LIST:
    {
      out << (t.is_tuple() ? '{' : '[');
      bool first = true;
      for (const Term& e : t.elements())
      {
        if (!first) out << ',';
        first = false;
        write_term(out, e);
      }
      out << (t.is_tuple() ? '}' : ']');
      break;
    }
  }
}

bool
is_atom_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')
         || c == '_' || c == '@';
}

bool
is_digit(char c)
{
  return c >= '0' && c <= '9';
}

}  // namespace

std::string
Term::to_string() const
{
  std::ostringstream ss;
  write_term(ss, *this);
  return ss.str();
}

std::ostream&
operator<<(std::ostream& out, const Term& t)
{
  write_term(out, t);
  return out;
}

/* -------------------------------------------------------------------------- */

TermReader::TermReader(std::string_view text, std::size_t line)
    : d_text(text), d_line(line)
{
}

char
TermReader::get()
{
  char c = d_text[d_pos++];
  if (c == '\n')
  {
    ++d_line;
    d_col = 1;
  }
  else
  {
    ++d_col;
  }
  return c;
}

void
TermReader::skip_ws()
{
  while (d_pos < d_text.size())
  {
    char c = d_text[d_pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      get();
    else
      break;
  }
}

bool
TermReader::at_end()
{
  skip_ws();
  return d_pos >= d_text.size();
}

char
TermReader::peek()
{
  skip_ws();
  return d_pos < d_text.size() ? d_text[d_pos] : '\0';
}

bool
TermReader::accept(char c)
{
  if (peek() != c || d_pos >= d_text.size()) return false;
  get();
  return true;
}

void
TermReader::expect(char c)
{
  if (!accept(c)) fail(std::string("'") + c + "'");
}

bool
TermReader::lookahead(std::string_view s)
{
  skip_ws();
  return d_text.substr(d_pos).starts_with(s);
}

void
TermReader::fail(const std::string& expected) const
{
  throw ParseError(d_line, d_col, expected);
}

std::string
TermReader::read_quoted(char quote)
{
  get();  // opening quote
  std::string out;
  while (true)
  {
    if (d_pos >= d_text.size()) fail(std::string("closing ") + quote);
    char c = get();
    if (c == quote) break;
    if (c == '\\')
    {
      if (d_pos >= d_text.size()) fail("escape character");
      char e = get();
      switch (e)
      {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: out += e;
      }
      continue;
    }
    out += c;
  }
  return out;
}

Term
TermReader::read()
{
  skip_ws();
  if (d_pos >= d_text.size()) fail("term");
  char c = d_text[d_pos];

  if (c == '{' || c == '[')
  {
    char close = c == '{' ? '}' : ']';
    get();
    std::vector<Term> elems;
    if (!accept(close))
    {
      do
      {
        elems.push_back(read());
      } while (accept(','));
      expect(close);
    }
    return c == '{' ? Term::tuple(std::move(elems)) : Term::list(std::move(elems));
  }
  if (c == '\'') return Term::atom(read_quoted('\''));
  if (c == '"') return Term::string(read_quoted('"'));
  if (c == '<')
  {
    get();
    std::uint32_t parts[3];
    for (int i = 0; i < 3; ++i)
    {
      std::size_t start = d_pos;
      while (d_pos < d_text.size() && is_digit(d_text[d_pos])) get();
      if (start == d_pos) fail("pid component");
      std::from_chars(d_text.data() + start, d_text.data() + d_pos, parts[i]);
      if (i < 2 && (d_pos >= d_text.size() || get() != '.')) fail("'.' in pid");
    }
    if (d_pos >= d_text.size() || get() != '>') fail("'>' closing pid");
    return Term::pid(parts[0], parts[1], parts[2]);
  }
  if (is_digit(c) || c == '-')
  {
    std::size_t start = d_pos;
    get();
    while (d_pos < d_text.size() && is_digit(d_text[d_pos])) get();
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(d_text.data() + start, d_text.data() + d_pos, v);
    if (ec != std::errc() || ptr != d_text.data() + d_pos) fail("integer");
    return Term::integer(v);
  }
  if (c >= 'a' && c <= 'z')
  {
    std::size_t start = d_pos;
    while (d_pos < d_text.size() && is_atom_char(d_text[d_pos])) get();
    return Term::atom(std::string(d_text.substr(start, d_pos - start)));
  }
  fail("term");
}

Term
parse_term(std::string_view text)
{
  TermReader reader(text);
  Term t = reader.read();
  if (!reader.at_end()) reader.fail("end of input");
  return t;
}

}  // namespace tracemin
