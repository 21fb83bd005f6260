#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tracemin {

struct Atom
{
  std::string name;
};

struct String
{
  std::string text;
};

/// Process identifier rendered as <node.id.serial>.
struct Pid
{
  std::uint32_t node   = 0;
  std::uint32_t id     = 0;
  std::uint32_t serial = 0;

  auto operator<=>(const Pid&) const = default;
  bool operator==(const Pid&) const  = default;
};

class Term;

struct Tuple
{
  std::vector<Term> elements;
};

struct List
{
  std::vector<Term> elements;
};

/**
 * An Erlang-style data value: atom, integer, string, pid, tuple or list.
 *
 * Terms are immutable values with a total order, so they can be used as map
 * keys and set elements.
 */
class Term
{
 public:
  enum class Kind
  {
    ATOM,
    INTEGER,
    STRING,
    PID,
    TUPLE,
    LIST
  };

  Term() : d_value(Atom{"undefined"}) {}
  Term(Atom a) : d_value(std::move(a)) {}
  Term(std::int64_t i) : d_value(i) {}
  Term(String s) : d_value(std::move(s)) {}
  Term(Pid p) : d_value(p) {}
  Term(Tuple t) : d_value(std::move(t)) {}
  Term(List l) : d_value(std::move(l)) {}

  static Term atom(std::string name) { return Term(Atom{std::move(name)}); }
  static Term integer(std::int64_t i) { return Term(i); }
  static Term string(std::string s) { return Term(String{std::move(s)}); }
  static Term pid(std::uint32_t a, std::uint32_t b, std::uint32_t c)
  {
    return Term(Pid{a, b, c});
  }
  static Term tuple(std::vector<Term> elems) { return Term(Tuple{std::move(elems)}); }
  static Term list(std::vector<Term> elems) { return Term(List{std::move(elems)}); }

  Kind kind() const { return static_cast<Kind>(d_value.index()); }

  bool is_atom() const { return kind() == Kind::ATOM; }
  bool is_atom(std::string_view name) const;
  bool is_integer() const { return kind() == Kind::INTEGER; }
  bool is_string() const { return kind() == Kind::STRING; }
  bool is_pid() const { return kind() == Kind::PID; }
  bool is_tuple() const { return kind() == Kind::TUPLE; }
  bool is_list() const { return kind() == Kind::LIST; }

  const std::string& as_atom() const { return std::get<Atom>(d_value).name; }
  std::int64_t as_integer() const { return std::get<std::int64_t>(d_value); }
  const std::string& as_string() const { return std::get<String>(d_value).text; }
  const Pid& as_pid() const { return std::get<Pid>(d_value); }
  /** Elements of a tuple or list. */
  const std::vector<Term>& elements() const;

  /** First element of a non-empty tuple if it is an atom, else empty. */
  std::string_view tag() const;

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
  friend int compare(const Term& a, const Term& b);

 private:
  std::variant<Atom, std::int64_t, String, Pid, Tuple, List> d_value;
};

std::ostream& operator<<(std::ostream& out, const Term& t);

/** True if 'name' can be written as an atom without quotes. */
bool is_bare_atom(std::string_view name);

/**
 * Parse exactly one term from 'text' (surrounding whitespace allowed).
 * Throws ParseError with 1-based line/column of the offending character.
 */
Term parse_term(std::string_view text);

/**
 * Incremental term reader over a larger buffer; tracks line and column so
 * callers that parse term sequences can report positions.
 */
class TermReader
{
 public:
  explicit TermReader(std::string_view text, std::size_t line = 1);

  Term read();
  void skip_ws();
  bool at_end();
  /** Consume 'c' after skipping whitespace; false if next char differs. */
  bool accept(char c);
  void expect(char c);
  /** True if the remaining input starts with 's' (after whitespace). */
  bool lookahead(std::string_view s);
  char peek();

  std::size_t line() const { return d_line; }
  std::size_t column() const { return d_col; }
  [[noreturn]] void fail(const std::string& expected) const;

 private:
  char get();
  std::string read_quoted(char quote);

  std::string_view d_text;
  std::size_t d_pos  = 0;
  std::size_t d_line = 1;
  std::size_t d_col  = 1;
};

}  // namespace tracemin
