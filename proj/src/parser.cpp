#include "memlab/parser.hpp"

#include "src/lex.hpp"

namespace memlab {

ParseError::ParseError(std::string msg, int line_, int column_)
    : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                         std::to_string(column_)),
      line(line_),
      column(column_) {}

namespace detail {

bool is_reserved_word(const std::string& w) {
  static const std::set<std::string> kw = {
      "skip", "if",    "then", "else", "end",  "while", "do",  "alloc",
      "free", "offset", "cast", "forge", "nil", "true",  "false", "not",
      "and",  "or",    "emp",  "top"};
  return kw.count(w) != 0;
}

namespace {

ExprPtr parse_unary(TokenStream& ts);

ExprPtr parse_atom(TokenStream& ts) {
  if (ts.eat(Tok::LParen)) {
    ExprPtr e = parse_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return e;
  }
  if (ts.at(Tok::Number)) {
    return int_e(Int(ts.next().text));
  }
  if (ts.eat_kw("true")) return bool_e(true);
  if (ts.eat_kw("false")) return bool_e(false);
  if (ts.eat_kw("nil")) return nil_e();
  if (ts.eat_kw("offset")) {
    ts.expect(Tok::LParen, "'(' after offset");
    ExprPtr e = parse_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return offset_e(e);
  }
  if (ts.eat_kw("cast")) {
    ts.expect(Tok::LParen, "'(' after cast");
    ExprPtr e = parse_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return cast_e(e);
  }
  if (ts.eat_kw("forge")) {
    ts.expect(Tok::LParen, "'(' after forge");
    ExprPtr a = parse_expr(ts);
    ts.expect(Tok::Comma, "','");
    ExprPtr b = parse_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return forge_e(a, b);
  }
  if (ts.at(Tok::Ident) && !is_reserved_word(ts.peek().text)) {
    return var_e(ts.next().text);
  }
  ts.fail("expected expression");
}

ExprPtr parse_unary(TokenStream& ts) {
  if (ts.eat_kw("not")) return not_e(parse_unary(ts));
  if (ts.at(Tok::Minus)) {
    // Negative integer literal; the language has no general unary minus.
    std::size_t mark = ts.position();
    ts.next();
    if (ts.at(Tok::Number)) return int_e(-Int(ts.next().text));
    ts.rewind(mark);
    ts.fail("expected integer literal after '-'");
  }
  return parse_atom(ts);
}

ExprPtr parse_mul(TokenStream& ts) {
  ExprPtr e = parse_unary(ts);
  while (ts.eat(Tok::Star)) e = bin_e(BinOp::Mul, e, parse_unary(ts));
  return e;
}

ExprPtr parse_add(TokenStream& ts) {
  ExprPtr e = parse_mul(ts);
  for (;;) {
    if (ts.eat(Tok::Plus)) {
      e = bin_e(BinOp::Add, e, parse_mul(ts));
    } else if (ts.at(Tok::Minus)) {
      ts.next();
      e = bin_e(BinOp::Sub, e, parse_mul(ts));
    } else {
      return e;
    }
  }
}

ExprPtr parse_cmp(TokenStream& ts) {
  ExprPtr e = parse_add(ts);
  for (;;) {
    if (ts.eat(Tok::Equal)) {
      e = bin_e(BinOp::Eq, e, parse_add(ts));
    } else if (ts.eat(Tok::LessEq)) {
      e = bin_e(BinOp::Le, e, parse_add(ts));
    } else {
      return e;
    }
  }
}

ExprPtr parse_and(TokenStream& ts) {
  ExprPtr e = parse_cmp(ts);
  while (ts.eat_kw("and")) e = bin_e(BinOp::And, e, parse_cmp(ts));
  return e;
}

}  // namespace

ExprPtr parse_expr(TokenStream& ts) {
  ExprPtr e = parse_and(ts);
  while (ts.eat_kw("or")) e = bin_e(BinOp::Or, e, parse_and(ts));
  return e;
}

// Additive chain that never consumes a bare '*'. Assertion syntax reads '*'
// as separating conjunction, so multiplication there needs parentheses.
ExprPtr parse_additive(TokenStream& ts) {
  ExprPtr e = parse_unary(ts);
  for (;;) {
    if (ts.eat(Tok::Plus)) {
      e = bin_e(BinOp::Add, e, parse_unary(ts));
    } else if (ts.at(Tok::Minus)) {
      ts.next();
      e = bin_e(BinOp::Sub, e, parse_unary(ts));
    } else {
      return e;
    }
  }
}

namespace {

CmdPtr parse_cmd(TokenStream& ts);

CmdPtr parse_stmt(TokenStream& ts) {
  if (ts.eat_kw("skip")) return skip_c();
  if (ts.eat_kw("if")) {
    ExprPtr guard = parse_expr(ts);
    ts.expect_kw("then");
    CmdPtr then_branch = parse_cmd(ts);
    ts.expect_kw("else");
    CmdPtr else_branch = parse_cmd(ts);
    ts.expect_kw("end");
    return if_c(guard, then_branch, else_branch);
  }
  if (ts.eat_kw("while")) {
    ExprPtr guard = parse_expr(ts);
    ts.expect_kw("do");
    CmdPtr body = parse_cmd(ts);
    ts.expect_kw("end");
    return while_c(guard, body);
  }
  if (ts.eat_kw("free")) {
    ts.expect(Tok::LParen, "'(' after free");
    ExprPtr e = parse_expr(ts);
    ts.expect(Tok::RParen, "')'");
    return free_c(e);
  }
  if (ts.eat(Tok::LBracket)) {
    ExprPtr addr = parse_expr(ts);
    ts.expect(Tok::RBracket, "']'");
    ts.expect(Tok::Assign, "':='");
    return store_c(addr, parse_expr(ts));
  }
  if (ts.at(Tok::Ident) && !is_reserved_word(ts.peek().text)) {
    Var x = ts.next().text;
    ts.expect(Tok::Assign, "':='");
    if (ts.eat_kw("alloc")) {
      ts.expect(Tok::LParen, "'(' after alloc");
      ExprPtr size = parse_expr(ts);
      ts.expect(Tok::RParen, "')'");
      return alloc_c(x, size);
    }
    if (ts.eat(Tok::LBracket)) {
      ExprPtr addr = parse_expr(ts);
      ts.expect(Tok::RBracket, "']'");
      return load_c(x, addr);
    }
    return assign_c(x, parse_expr(ts));
  }
  ts.fail("expected statement");
}

CmdPtr parse_cmd(TokenStream& ts) {
  CmdPtr c = parse_stmt(ts);
  while (ts.eat(Tok::Semi)) c = seq_c(c, parse_stmt(ts));
  return c;
}

}  // namespace
}  // namespace detail

CmdPtr parse_program(const std::string& text) {
  detail::TokenStream ts(detail::tokenize(text));
  CmdPtr c = detail::parse_cmd(ts);
  if (!ts.at(detail::Tok::End)) ts.fail("trailing input after program");
  return c;
}

ExprPtr parse_expression(const std::string& text) {
  detail::TokenStream ts(detail::tokenize(text));
  ExprPtr e = detail::parse_expr(ts);
  if (!ts.at(detail::Tok::End)) ts.fail("trailing input after expression");
  return e;
}

}  // namespace memlab
