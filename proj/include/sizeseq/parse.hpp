#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sizeseq/checked.hpp"
#include "sizeseq/element.hpp"
#include "sizeseq/expr.hpp"

namespace sizeseq {

// A parsed CLI query.
//
//   query   := cmd ws args [options]
//   cmd     := size | prefix | chi | compare | label | block | verify
//   setexpr := term { "union" term | "minus" term }
//   term    := factor { "inter" factor }
//   factor  := atom { "x" atom }
//   atom    := N | N0 | Z | Q | Qpos | I | E | O | P
//            | M(int) | S(int) | { element, ... } | ( setexpr )
//   element := int | int/int | int+int/int | (element, element)
//   options := --budget int | --len int | --json
struct Query {
  std::string command;
  std::vector<SetExprPtr> exprs;
  std::optional<Element> element;  // label
  std::optional<Index> number;     // block
  Index budget = 10'000;
  Index len = 20;
  bool json = false;
};

namespace parse_detail {

enum class Tok { Ident, Int, Sym, Option, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::uint64_t value = 0;
  char sym = 0;
  std::size_t column = 0;  // 1-based
};

inline std::vector<Token> lex(const std::string& in) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_';
  };
  while (i < in.size()) {
    char c = in[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    Token t;
    t.column = i + 1;
    if (c == '-' && i + 1 < in.size() && in[i + 1] == '-') {
      std::size_t j = i + 2;
      while (j < in.size() && is_ident(in[j])) ++j;
      t.kind = Tok::Option;
      t.text = in.substr(i + 2, j - i - 2);
      if (t.text.empty())
        throw ParseError(t.column, "expected an option name after '--'");
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i;
      std::uint64_t v = 0;
      while (j < in.size() && in[j] >= '0' && in[j] <= '9') {
        std::uint64_t d = static_cast<std::uint64_t>(in[j] - '0');
        if (v > (UINT64_MAX - d) / 10)
          throw ParseError(t.column, "integer literal too large");
        v = v * 10 + d;
        ++j;
      }
      t.kind = Tok::Int;
      t.value = v;
      t.text = in.substr(i, j - i);
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_') {
      std::size_t j = i;
      while (j < in.size() && is_ident(in[j])) ++j;
      t.kind = Tok::Ident;
      t.text = in.substr(i, j - i);
      i = j;
      out.push_back(std::move(t));
      continue;
    }
    if (c == '(' || c == ')' || c == '{' || c == '}' || c == ',' || c == '/' ||
        c == '+' || c == '-') {
      t.kind = Tok::Sym;
      t.sym = c;
      t.text = std::string(1, c);
      ++i;
      out.push_back(std::move(t));
      continue;
    }
    throw ParseError(t.column, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.column = in.size() + 1;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& input) : toks_(lex(input)) {}

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }

  bool at_ident(const char* s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  bool at_sym(char c) const {
    return peek().kind == Tok::Sym && peek().sym == c;
  }

  void expect_sym(char c, const char* what) {
    if (!at_sym(c))
      throw ParseError(peek().column, std::string("expected '") + c + "' " +
                                          what);
    next();
  }

  std::uint64_t expect_int(const char* what) {
    if (peek().kind != Tok::Int)
      throw ParseError(peek().column,
                       std::string("expected an integer ") + what);
    return next().value;
  }

  // ---- elements -------------------------------------------------------------

  Element parse_element() {
    if (at_sym('(')) {
      next();
      Element a = parse_element();
      expect_sym(',', "between pair components");
      Element b = parse_element();
      expect_sym(')', "after pair");
      return make_pair(a, b);
    }
    int sign = 1;
    bool tagged = false;
    if (at_sym('-')) {
      next();
      sign = -1;
      tagged = true;
    } else if (at_sym('+')) {
      next();
      tagged = true;
    }
    std::size_t col = peek().column;
    std::uint64_t a = expect_int("in element");
    if (at_sym('/')) {
      next();
      std::uint64_t d = expect_int("denominator");
      if (d == 0) throw ParseError(col, "zero denominator");
      return Element{make_rat_value(sign, 0, a, d, col)};
    }
    if (at_sym('+')) {
      next();
      std::uint64_t m = expect_int("numerator");
      expect_sym('/', "in mixed fraction");
      std::uint64_t d = expect_int("denominator");
      if (d == 0) throw ParseError(col, "zero denominator");
      return Element{make_rat_value(sign, a, m, d, col)};
    }
    if (a == 0 && tagged)  // "+0" / "-0": the tagged zero copies
      return Element{RatValue{sign, 0, 0, 1}};
    if (sign < 0) {
      if (a > static_cast<std::uint64_t>(INT64_MAX))
        throw ParseError(col, "integer literal too large");
      return make_int(-static_cast<std::int64_t>(a));
    }
    if (a == 0) return make_int(0);  // bare zero lives outside the naturals
    return make_nat(a);
  }

  // ---- set expressions ------------------------------------------------------

  SetExprPtr parse_setexpr() {
    SetExprPtr node = parse_term();
    while (at_ident("union") || at_ident("minus")) {
      bool is_union = peek().text == "union";
      next();
      node = SetExpr::make_binary(
          is_union ? SetExpr::Kind::Union : SetExpr::Kind::Minus, node,
          parse_term());
    }
    return node;
  }

  SetExprPtr parse_term() {
    SetExprPtr node = parse_factor();
    while (at_ident("inter")) {
      next();
      node = SetExpr::make_binary(SetExpr::Kind::Inter, node, parse_factor());
    }
    return node;
  }

  SetExprPtr parse_factor() {
    SetExprPtr node = parse_atom();
    while (at_ident("x")) {
      next();
      node = SetExpr::make_binary(SetExpr::Kind::Product, node, parse_atom());
    }
    return node;
  }

  SetExprPtr parse_atom() {
    if (at_sym('(')) {
      next();
      SetExprPtr e = parse_setexpr();
      expect_sym(')', "after set expression");
      return e;
    }
    if (at_sym('{')) {
      std::size_t col = peek().column;
      next();
      if (at_sym('}'))
        throw ParseError(col,
                         "empty literal not allowed; spell the empty set as a "
                         "difference such as 'N minus N'");
      std::vector<Element> members;
      members.push_back(parse_element());
      while (at_sym(',')) {
        next();
        members.push_back(parse_element());
      }
      expect_sym('}', "after literal members");
      return SetExpr::make_literal(std::move(members));
    }
    if (peek().kind != Tok::Ident)
      throw ParseError(peek().column, "expected a set atom");
    Token t = next();
    const std::string& s = t.text;
    if (s == "N") return SetExpr::make_atom(AtomKind::N);
    if (s == "N0") return SetExpr::make_atom(AtomKind::N0);
    if (s == "Z") return SetExpr::make_atom(AtomKind::Z);
    if (s == "Q") return SetExpr::make_atom(AtomKind::Q);
    if (s == "Qpos") return SetExpr::make_atom(AtomKind::Qpos);
    if (s == "I") return SetExpr::make_atom(AtomKind::I);
    if (s == "E") return SetExpr::make_atom(AtomKind::E);
    if (s == "O") return SetExpr::make_atom(AtomKind::O);
    if (s == "P") return SetExpr::make_atom(AtomKind::P);
    if (s == "M" || s == "S") {
      expect_sym('(', "after parameterized atom");
      std::size_t col = peek().column;
      std::uint64_t k = expect_int("parameter");
      if (k == 0) throw ParseError(col, "atom parameter must be >= 1");
      expect_sym(')', "after parameter");
      return SetExpr::make_atom(s == "M" ? AtomKind::M : AtomKind::S, k);
    }
    throw ParseError(t.column, "unknown set atom '" + s + "'");
  }

 private:
  static RatValue make_rat_value(int sign, std::uint64_t whole,
                                 std::uint64_t num, std::uint64_t den,
                                 std::size_t col) {
    try {
      Element e = make_rat(sign, whole, num, den);
      return e.rat();
    } catch (const TypeError& err) {
      throw ParseError(col, err.what());
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace parse_detail

inline SetExprPtr parse_setexpr(const std::string& input) {
  parse_detail::Parser p(input);
  SetExprPtr e = p.parse_setexpr();
  if (p.peek().kind != parse_detail::Tok::End)
    throw ParseError(p.peek().column, "unexpected trailing input");
  infer_universe(*e);  // mixed universes are a parse-time type error
  return e;
}

inline Element parse_element(const std::string& input) {
  parse_detail::Parser p(input);
  Element e = p.parse_element();
  if (p.peek().kind != parse_detail::Tok::End)
    throw ParseError(p.peek().column, "unexpected trailing input");
  return e;
}

inline Query parse_query(const std::string& input) {
  parse_detail::Parser p(input);
  if (p.peek().kind != parse_detail::Tok::Ident)
    throw ParseError(p.peek().column, "expected a command");
  Query q;
  q.command = p.next().text;
  auto one_expr = [&] { q.exprs.push_back(p.parse_setexpr()); };
  if (q.command == "size" || q.command == "prefix" || q.command == "chi" ||
      q.command == "verify") {
    one_expr();
  } else if (q.command == "compare") {
    one_expr();
    one_expr();
  } else if (q.command == "label") {
    one_expr();
    q.element = p.parse_element();
  } else if (q.command == "block") {
    one_expr();
    std::size_t col = p.peek().column;
    Index n = p.expect_int("block index");
    if (n == 0) throw ParseError(col, "block index must be >= 1");
    q.number = n;
  } else {
    throw ParseError(1, "unknown command '" + q.command + "'");
  }
  while (p.peek().kind == parse_detail::Tok::Option) {
    parse_detail::Token t = p.next();
    if (t.text == "json") {
      q.json = true;
    } else if (t.text == "budget" || t.text == "len") {
      std::size_t col = p.peek().column;
      std::uint64_t v = p.expect_int(("for --" + t.text).c_str());
      if (v == 0)
        throw ParseError(col, "--" + t.text + " must be >= 1");
      (t.text == "budget" ? q.budget : q.len) = v;
    } else {
      throw ParseError(t.column, "unknown option '--" + t.text + "'");
    }
  }
  if (p.peek().kind != parse_detail::Tok::End)
    throw ParseError(p.peek().column, "unexpected trailing input");
  for (const SetExprPtr& e : q.exprs) infer_universe(*e);
  return q;
}

}  // namespace sizeseq
