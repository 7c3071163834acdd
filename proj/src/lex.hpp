#pragma once

// Shared tokenizer and expression parser used by the program parser and the
// assertion parser.

#include <cctype>
#include <string>
#include <vector>

#include "memlab/ast.hpp"
#include "memlab/parser.hpp"

namespace memlab::detail {

enum class Tok {
  Ident,
  Number,
  Semi,
  Assign,   // :=
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Plus,
  Minus,
  Star,
  Equal,     // =
  EqualEq,   // ==
  LessEq,    // <=
  PointsTo,  // |->
  IsoStar,   // |>
  AndAnd,    // /\ (assertion conjunction)
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line = 1;
  int column = 1;
};

inline std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t) {
    out.push_back(Token{k, std::move(t), line, col});
  };
  auto fail = [&](const std::string& msg) { throw ParseError(msg, line, col); };
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    auto two = [&](std::size_t n) { return text.substr(i, n); };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        ++j;
      push(Tok::Ident, text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
        ++j;
      push(Tok::Number, text.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (two(3) == "|->") {
      push(Tok::PointsTo, "|->");
      i += 3;
      col += 3;
      continue;
    }
    if (two(2) == ":=") {
      push(Tok::Assign, ":=");
      i += 2;
      col += 2;
      continue;
    }
    if (two(2) == "<=") {
      push(Tok::LessEq, "<=");
      i += 2;
      col += 2;
      continue;
    }
    if (two(2) == "==") {
      push(Tok::EqualEq, "==");
      i += 2;
      col += 2;
      continue;
    }
    if (two(2) == "|>") {
      push(Tok::IsoStar, "|>");
      i += 2;
      col += 2;
      continue;
    }
    if (two(2) == "/\\") {
      push(Tok::AndAnd, "/\\");
      i += 2;
      col += 2;
      continue;
    }
    switch (c) {
      case ';': push(Tok::Semi, ";"); break;
      case '[': push(Tok::LBracket, "["); break;
      case ']': push(Tok::RBracket, "]"); break;
      case '(': push(Tok::LParen, "("); break;
      case ')': push(Tok::RParen, ")"); break;
      case ',': push(Tok::Comma, ","); break;
      case '+': push(Tok::Plus, "+"); break;
      case '-': push(Tok::Minus, "-"); break;
      case '*': push(Tok::Star, "*"); break;
      case '=': push(Tok::Equal, "="); break;
      default: fail(std::string("unexpected character '") + c + "'");
    }
    ++i;
    ++col;
    continue;
  }
  out.push_back(Token{Tok::End, "", line, col});
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }
  bool eat(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  bool eat_kw(const char* kw) {
    if (!at_kw(kw)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " (got '" + (peek().kind == Tok::End ? "<eof>" : peek().text) + "')",
                     peek().line, peek().column);
  }
  void expect(Tok k, const char* what) {
    if (!eat(k)) fail(std::string("expected ") + what);
  }
  void expect_kw(const char* kw) {
    if (!eat_kw(kw)) fail(std::string("expected '") + kw + "'");
  }

  std::size_t position() const { return pos_; }
  void rewind(std::size_t pos) { pos_ = pos; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_reserved_word(const std::string& word);

// Expression grammar, loosest to tightest: or, and, (=, <=), (+, -), *,
// unary (not / offset / cast / forge / negative literal), atoms. Callers can
// enter at a chosen level; the assertion parser enters at the additive level
// for points-to operands so that a bare '*' stays a separating conjunction.
ExprPtr parse_expr(TokenStream& ts);
ExprPtr parse_additive(TokenStream& ts);

}  // namespace memlab::detail
