#include "lexer.hpp"

#include <cctype>

#include <json.hpp>

namespace socel::detail {

Lexer::Lexer(std::string_view src) {
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\') ++j;
        ++j;
      }
      if (j >= src.size()) throw Error(ErrorKind::Syntax, std::to_string(line) + ":" + std::to_string(col) + ": unterminated string");
      try {
        t.text = nlohmann::json::parse(src.substr(i, j - i + 1)).get<std::string>();
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Syntax, std::to_string(line) + ":" + std::to_string(col) + ": bad string literal");
      }
      t.kind = Token::Kind::String;
      advance(j - i + 1);
    } else {
      static const char* syms[] = {"(+)", "->", "<=", ">=", "!=", "<", ">", "=", ";", ":",
                                   "+",   "(",  ")",  "[",  "]",  ",", "."};
      bool found = false;
      for (const char* s : syms) {
        std::string_view sv(s);
        if (src.substr(i, sv.size()) == sv) {
          t.kind = Token::Kind::Sym;
          t.text = std::string(sv);
          advance(sv.size());
          found = true;
          break;
        }
      }
      if (!found) {
        throw Error(ErrorKind::Syntax,
                    std::to_string(line) + ":" + std::to_string(col) + ": unexpected character '" + std::string(1, c) + "'");
      }
    }
    toks_.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  toks_.push_back(end);
}

const Token& Lexer::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < toks_.size() ? toks_[k] : toks_.back();
}

Token Lexer::next() {
  Token t = peek();
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool Lexer::at_sym(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Sym && t.text == s;
}

bool Lexer::at_ident(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Ident && t.text == s;
}

bool Lexer::accept_sym(std::string_view s) {
  if (!at_sym(s)) return false;
  next();
  return true;
}

bool Lexer::accept_ident(std::string_view s) {
  if (!at_ident(s)) return false;
  next();
  return true;
}

void Lexer::expect_sym(std::string_view s) {
  if (!accept_sym(s)) fail("expected '" + std::string(s) + "'");
}

std::string Lexer::expect_ident(const char* what) {
  if (peek().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
  return next().text;
}

void Lexer::fail(const std::string& msg) const { fail_at(peek(), msg); }

void Lexer::fail_at(const Token& t, const std::string& msg) const {
  std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
  throw Error(ErrorKind::Syntax, std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg + ", found " + found);
}

bool at_cmp_op(const Lexer& lx) {
  for (const char* s : {"<", "<=", ">", ">=", "=", "!="}) {
    if (lx.at_sym(s)) return true;
  }
  return false;
}

CmpOp parse_cmp_op(Lexer& lx) {
  if (lx.accept_sym("<")) return CmpOp::Lt;
  if (lx.accept_sym("<=")) return CmpOp::Le;
  if (lx.accept_sym(">")) return CmpOp::Gt;
  if (lx.accept_sym(">=")) return CmpOp::Ge;
  if (lx.accept_sym("=")) return CmpOp::Eq;
  if (lx.accept_sym("!=")) return CmpOp::Ne;
  lx.fail("expected a comparison operator");
}

Value parse_literal(Lexer& lx) {
  const Token& t = lx.peek();
  if (t.kind == Token::Kind::Number) return std::stod(lx.next().text);
  if (t.kind == Token::Kind::String) return lx.next().text;
  lx.fail("expected a number or string literal");
}

namespace {

Pred parse_por(Lexer& lx);

Pred parse_pfactor(Lexer& lx) {
  if (lx.accept_ident("NOT")) return Pred::negate(parse_pfactor(lx));
  if (lx.accept_sym("(")) {
    Pred p = parse_por(lx);
    lx.expect_sym(")");
    return p;
  }
  if (lx.accept_ident("TRUE")) return Pred::truth();
  if (lx.accept_ident("FALSE")) return Pred::falsity();
  if (lx.accept_ident("type")) {
    lx.expect_sym("=");
    return Pred::type_is(Label(lx.expect_ident("a relation name")));
  }
  std::string attr = lx.expect_ident("an attribute name");
  CmpOp op = parse_cmp_op(lx);
  return Pred::compare(attr, op, parse_literal(lx));
}

Pred parse_pand(Lexer& lx) {
  std::vector<Pred> parts{parse_pfactor(lx)};
  while (lx.accept_ident("AND")) parts.push_back(parse_pfactor(lx));
  return parts.size() == 1 ? parts[0] : Pred::all_of(parts);
}

Pred parse_por(Lexer& lx) {
  std::vector<Pred> parts{parse_pand(lx)};
  while (lx.accept_ident("OR")) parts.push_back(parse_pand(lx));
  return parts.size() == 1 ? parts[0] : Pred::any_of(parts);
}

}  // namespace

Pred parse_pexpr(Lexer& lx) { return parse_por(lx); }

}  // namespace socel::detail
