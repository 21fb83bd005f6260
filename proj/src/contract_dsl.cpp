#include "tracemin/contract_dsl.hpp"

#include <algorithm>
#include <charconv>

#include "tracemin/errors.hpp"

namespace tracemin {

namespace {

struct Token
{
  enum class Type
  {
    IDENT,
    VAR,
    WILDCARD,
    INT,
    STRING,
    QATOM,
    PID,
    PUNCT,
    NEWLINE,
    END
  };
  Type type = Type::END;
  std::string text;
  std::size_t line = 0;
  std::size_t col  = 0;
};

bool
ident_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')
         || c == '_' || c == '@';
}

std::vector<Token>
tokenize(std::string_view src)
{
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k)
    {
      if (src[i] == '\n')
      {
        ++line;
        col = 1;
      }
      else
      {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Token::Type type, std::size_t len, std::string text) {
    out.push_back({type, std::move(text), line, col});
    advance(len);
  };

  static constexpr std::string_view two_char[] = {
      "->", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-="};

  while (i < src.size())
  {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r')
    {
      advance(1);
      continue;
    }
    if (c == '#')
    {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n')
    {
      push(Token::Type::NEWLINE, 1, "\\n");
      continue;
    }
    if (c >= '0' && c <= '9')
    {
      std::size_t j = i;
      while (j < src.size() && src[j] >= '0' && src[j] <= '9') ++j;
      push(Token::Type::INT, j - i, std::string(src.substr(i, j - i)));
      continue;
    }
    if (ident_char(c) && c != '@')
    {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      Token::Type type = Token::Type::IDENT;
      if (word == "_")
        type = Token::Type::WILDCARD;
      else if ((c >= 'A' && c <= 'Z') || c == '_')
        type = Token::Type::VAR;
      push(type, j - i, std::move(word));
      continue;
    }
    if (c == '\'' || c == '"')
    {
      std::size_t start_line = line, start_col = col;
      std::string text;
      advance(1);
      while (true)
      {
        if (i >= src.size() || src[i] == '\n')
          throw ParseError(start_line, start_col, std::string("closing ") + c);
        char d = src[i];
        if (d == c)
        {
          advance(1);
          break;
        }
        if (d == '\\' && i + 1 < src.size())
        {
          advance(1);
          char e = src[i];
          text += e == 'n' ? '\n' : (e == 't' ? '\t' : e);
          advance(1);
          continue;
        }
        text += d;
        advance(1);
      }
      out.push_back({c == '"' ? Token::Type::STRING : Token::Type::QATOM,
                     std::move(text),
                     start_line,
                     start_col});
      continue;
    }
    if (c == '<')
    {
      // <A.B.C> is a pid, anything else is a comparison operator.
      std::size_t j   = i + 1;
      int dots        = 0;
      bool digits_ok  = true;
      std::size_t run = 0;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
      {
        if (src[j] == '.')
        {
          digits_ok = digits_ok && run > 0;
          run       = 0;
          ++dots;
        }
        else
        {
          ++run;
        }
        ++j;
      }
      if (dots == 2 && digits_ok && run > 0 && j < src.size() && src[j] == '>')
      {
        push(Token::Type::PID, j + 1 - i, std::string(src.substr(i, j + 1 - i)));
        continue;
      }
    }
    bool matched = false;
    for (std::string_view op : two_char)
    {
      if (src.substr(i).starts_with(op))
      {
        push(Token::Type::PUNCT, 2, std::string(op));
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("{}()[],;=<>+-!").find(c) != std::string_view::npos)
    {
      push(Token::Type::PUNCT, 1, std::string(1, c));
      continue;
    }
    throw ParseError(line, col, "token");
  }
  out.push_back({Token::Type::END, "", line, col});
  return out;
}

class Parser
{
 public:
  explicit Parser(std::vector<Token> toks) : d_toks(std::move(toks)) {}

  std::vector<ContractAutomaton> file();
  EventPattern event_pattern();
  void expect_end()
  {
    skip_newlines();
    if (peek().type != Token::Type::END) fail("end of input");
  }

 private:
  const Token& peek() const { return d_toks[d_pos]; }
  const Token& next() { return d_toks[d_pos++]; }
  [[noreturn]] void fail(const std::string& expected) const
  {
    const Token& t = peek();
    std::string found = t.type == Token::Type::END ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.line, t.col, expected + " (found " + found + ")");
  }
  bool is_punct(std::string_view p) const
  {
    return peek().type == Token::Type::PUNCT && peek().text == p;
  }
  bool is_word(std::string_view w) const
  {
    return peek().type == Token::Type::IDENT && peek().text == w;
  }
  bool accept_punct(std::string_view p)
  {
    if (!is_punct(p)) return false;
    ++d_pos;
    return true;
  }
  bool accept_word(std::string_view w)
  {
    if (!is_word(w)) return false;
    ++d_pos;
    return true;
  }
  void expect_punct(std::string_view p)
  {
    if (!accept_punct(p)) fail("'" + std::string(p) + "'");
  }
  void expect_word(std::string_view w)
  {
    if (!accept_word(w)) fail("'" + std::string(w) + "'");
  }
  std::string ident(const char* what)
  {
    if (peek().type != Token::Type::IDENT) fail(what);
    return next().text;
  }
  std::string var(const char* what)
  {
    if (peek().type != Token::Type::VAR) fail(what);
    return next().text;
  }
  void skip_newlines()
  {
    while (peek().type == Token::Type::NEWLINE) ++d_pos;
  }
  void end_of_directive()
  {
    if (peek().type == Token::Type::NEWLINE || is_punct("}")) return;
    fail("end of line");
  }
  std::int64_t integer(bool negative)
  {
    if (peek().type != Token::Type::INT) fail("integer");
    const Token& t = next();
    std::int64_t v = 0;
    auto [p, ec]   = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) throw ParseError(t.line, t.col, "integer in range");
    return negative ? -v : v;
  }

  ContractAutomaton automaton();
  Pattern pattern();
  std::vector<Pattern> pattern_list(std::string_view close);
  Condition condition();
  Condition conjunction();
  Condition unary();
  IntOperand operand();
  IntExpr int_expr();
  Action action();
  Statement statement();

  std::vector<Token> d_toks;
  std::size_t d_pos = 0;
};

std::vector<ContractAutomaton>
Parser::file()
{
  std::vector<ContractAutomaton> out;
  skip_newlines();
  while (peek().type != Token::Type::END)
  {
    out.push_back(automaton());
    skip_newlines();
  }
  return out;
}

ContractAutomaton
Parser::automaton()
{
  ContractAutomaton a;
  expect_word("automaton");
  a.id = ident("automaton name");
  expect_punct("{");
  while (true)
  {
    skip_newlines();
    if (accept_punct("}")) break;
    if (peek().type != Token::Type::IDENT) fail("directive");
    const Token& dir = next();
    const std::string& d = dir.text;
    if (d == "foreach")
    {
      ForeachSpec f;
      f.spawn = event_pattern();
      expect_word("key");
      f.key_var = var("key variable");
      a.foreach = std::move(f);
    }
    else if (d == "attribute")
    {
      if (!a.foreach) throw ParseError(dir.line, dir.col, "'foreach' before 'attribute'");
      AttributionRule r;
      r.pattern = event_pattern();
      expect_punct("->");
      r.key_var = var("key variable");
      a.foreach->attribution.push_back(std::move(r));
    }
    else if (d == "states" || d == "bad")
    {
      if (peek().type != Token::Type::IDENT) fail("state name");
      while (peek().type == Token::Type::IDENT)
      {
        std::string s = next().text;
        if (d == "bad")
        {
          a.bad.push_back(s);
          if (!a.has_state(s)) a.states.push_back(s);
        }
        else
        {
          a.states.push_back(s);
        }
      }
    }
    else if (d == "initial")
    {
      a.initial = ident("state name");
    }
    else if (d == "int")
    {
      VarDecl v;
      v.name = ident("variable name");
      v.type = VarDecl::Type::INT;
      if (accept_punct("=")) v.initial = integer(accept_punct("-"));
      a.vars.push_back(std::move(v));
    }
    else if (d == "set")
    {
      VarDecl v;
      v.name = ident("variable name");
      v.type = VarDecl::Type::SET;
      a.vars.push_back(std::move(v));
    }
    else if (d == "trans")
    {
      Transition t;
      t.line = dir.line;
      t.from = ident("source state");
      expect_punct("->");
      t.to = ident("target state");
      expect_word("on");
      t.on = event_pattern();
      if (accept_word("when")) t.when = condition();
      if (accept_word("do")) t.action = action();
      a.transitions.push_back(std::move(t));
    }
    else
    {
      throw ParseError(dir.line, dir.col, "directive (found '" + d + "')");
    }
    end_of_directive();
  }
  return a;
}

EventPattern
Parser::event_pattern()
{
  EventPattern p;
  if (peek().type != Token::Type::IDENT) fail("event selector");
  const Token& sel = peek();
  auto s           = event_selector_from_string(sel.text);
  if (!s) fail("event selector");
  ++d_pos;
  p.selector = *s;
  expect_punct("(");
  p.subject = pattern();
  expect_punct(",");
  p.payload = pattern();
  expect_punct(")");
  return p;
}

std::vector<Pattern>
Parser::pattern_list(std::string_view close)
{
  std::vector<Pattern> elems;
  if (accept_punct(close)) return elems;
  do
  {
    elems.push_back(pattern());
  } while (accept_punct(","));
  expect_punct(close);
  return elems;
}

Pattern
Parser::pattern()
{
  const Token& t = peek();
  switch (t.type)
  {
    case Token::Type::WILDCARD: ++d_pos; return Pattern::wildcard();
    case Token::Type::VAR: ++d_pos; return Pattern::variable(t.text);
    case Token::Type::INT: return Pattern::literal(Term::integer(integer(false)));
    case Token::Type::STRING: ++d_pos; return Pattern::literal(Term::string(t.text));
    case Token::Type::QATOM: ++d_pos; return Pattern::literal(Term::atom(t.text));
    case Token::Type::PID: ++d_pos; return Pattern::literal(parse_term(t.text));
    case Token::Type::IDENT:
    {
      std::string name = next().text;
      if (accept_punct("(")) return Pattern::call(std::move(name), pattern_list(")"));
      return Pattern::literal(Term::atom(std::move(name)));
    }
    case Token::Type::PUNCT:
      if (accept_punct("-")) return Pattern::literal(Term::integer(integer(true)));
      if (accept_punct("{")) return Pattern::tuple(pattern_list("}"));
      if (accept_punct("[")) return Pattern::list(pattern_list("]"));
      break;
    default: break;
  }
  fail("pattern");
}

Condition
Parser::condition()
{
  Condition c = conjunction();
  while (accept_punct("||") || accept_word("or")) c = Condition::disjunction(c, conjunction());
  return c;
}

Condition
Parser::conjunction()
{
  Condition c = unary();
  while (accept_punct("&&") || accept_word("and")) c = Condition::conjunction(c, unary());
  return c;
}

Condition
Parser::unary()
{
  if (accept_punct("!") || accept_word("not")) return Condition::negate(unary());
  if (accept_punct("("))
  {
    Condition c = condition();
    expect_punct(")");
    return c;
  }
  if (accept_word("true")) return Condition::literal(true);
  if (accept_word("false")) return Condition::literal(false);
  if (accept_word("contains"))
  {
    expect_punct("(");
    std::string set = ident("set variable");
    expect_punct(",");
    Pattern elem = pattern();
    expect_punct(")");
    return Condition::contains(std::move(set), std::move(elem));
  }
  IntExpr lhs = int_expr();
  CmpOp op;
  if (accept_punct("==") || accept_punct("="))
    op = CmpOp::EQ;
  else if (accept_punct("!="))
    op = CmpOp::NE;
  else if (accept_punct("<="))
    op = CmpOp::LE;
  else if (accept_punct(">="))
    op = CmpOp::GE;
  else if (accept_punct("<"))
    op = CmpOp::LT;
  else if (accept_punct(">"))
    op = CmpOp::GT;
  else
    fail("comparison operator");
  return Condition::compare(std::move(lhs), op, int_expr());
}

IntOperand
Parser::operand()
{
  if (peek().type == Token::Type::INT) return IntOperand{integer(false)};
  if (accept_punct("-")) return IntOperand{integer(true)};
  if (peek().type == Token::Type::IDENT) return IntOperand{next().text};
  fail("integer or variable");
}

IntExpr
Parser::int_expr()
{
  IntExpr e;
  e.lhs = operand();
  if (accept_punct("+"))
  {
    e.op  = '+';
    e.rhs = operand();
  }
  else if (accept_punct("-"))
  {
    e.op  = '-';
    e.rhs = operand();
  }
  return e;
}

Action
Parser::action()
{
  Action a;
  do
  {
    Statement s = statement();
    if (s.op != Statement::Op::SKIP) a.stmts.push_back(std::move(s));
  } while (accept_punct(";"));
  return a;
}

Statement
Parser::statement()
{
  Statement s;
  if (accept_word("skip")) return s;
  if (is_word("add") || is_word("del"))
  {
    s.op = next().text == "add" ? Statement::Op::SET_INSERT : Statement::Op::SET_REMOVE;
    expect_punct("(");
    s.var = ident("set variable");
    expect_punct(",");
    s.element = pattern();
    expect_punct(")");
    return s;
  }
  s.var = ident("statement");
  if (accept_punct("++"))
  {
    s.op   = Statement::Op::ADD_ASSIGN;
    s.expr = IntExpr{IntOperand{std::int64_t{1}}, 0, {}};
  }
  else if (accept_punct("--"))
  {
    s.op   = Statement::Op::SUB_ASSIGN;
    s.expr = IntExpr{IntOperand{std::int64_t{1}}, 0, {}};
  }
  else if (accept_punct("+="))
  {
    s.op   = Statement::Op::ADD_ASSIGN;
    s.expr = int_expr();
  }
  else if (accept_punct("-="))
  {
    s.op   = Statement::Op::SUB_ASSIGN;
    s.expr = int_expr();
  }
  else if (accept_punct("="))
  {
    s.op   = Statement::Op::ASSIGN;
    s.expr = int_expr();
  }
  else
  {
    fail("'=', '+=', '-=', '++' or '--'");
  }
  return s;
}

}  // namespace

std::vector<ContractAutomaton>
parse_contracts(std::string_view text)
{
  Parser p(tokenize(text));
  return p.file();
}

EventPattern
parse_event_pattern(std::string_view text)
{
  Parser p(tokenize(text));
  EventPattern ep = p.event_pattern();
  p.expect_end();
  return ep;
}

}  // namespace tracemin
