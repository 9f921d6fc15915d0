#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "socel/error.hpp"
#include "socel/predicates.hpp"

namespace socel::detail {

struct Token {
  enum class Kind { Ident, Number, String, Sym, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_sym(std::string_view s, std::size_t ahead = 0) const;
  bool at_ident(std::string_view s, std::size_t ahead = 0) const;
  bool accept_sym(std::string_view s);
  bool accept_ident(std::string_view s);
  void expect_sym(std::string_view s);
  std::string expect_ident(const char* what);
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Predicate expression grammar shared by automaton guards and EACH(...).
Pred parse_pexpr(Lexer& lx);
CmpOp parse_cmp_op(Lexer& lx);
bool at_cmp_op(const Lexer& lx);
Value parse_literal(Lexer& lx);

}  // namespace socel::detail
