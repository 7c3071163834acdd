#include "memlab/ast.hpp"

#include <sstream>

namespace memlab {

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Le: return "<=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

ExprPtr var_e(Var name) { return std::make_shared<Expr>(Expr{VarE{std::move(name)}}); }
ExprPtr int_e(Int value) { return std::make_shared<Expr>(Expr{IntE{std::move(value)}}); }
ExprPtr bool_e(bool value) { return std::make_shared<Expr>(Expr{BoolE{value}}); }
ExprPtr nil_e() { return std::make_shared<Expr>(Expr{NilE{}}); }
ExprPtr bin_e(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  return std::make_shared<Expr>(Expr{BinE{op, std::move(lhs), std::move(rhs)}});
}
ExprPtr not_e(ExprPtr arg) { return std::make_shared<Expr>(Expr{NotE{std::move(arg)}}); }
ExprPtr offset_e(ExprPtr arg) { return std::make_shared<Expr>(Expr{OffsetE{std::move(arg)}}); }
ExprPtr cast_e(ExprPtr arg) { return std::make_shared<Expr>(Expr{CastE{std::move(arg)}}); }
ExprPtr forge_e(ExprPtr block, ExprPtr offset) {
  return std::make_shared<Expr>(Expr{ForgeE{std::move(block), std::move(offset)}});
}

CmdPtr skip_c() { return std::make_shared<Command>(Command{SkipC{}}); }
CmdPtr seq_c(CmdPtr first, CmdPtr second) {
  return std::make_shared<Command>(Command{SeqC{std::move(first), std::move(second)}});
}
CmdPtr if_c(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch) {
  return std::make_shared<Command>(
      Command{IfC{std::move(guard), std::move(then_branch), std::move(else_branch)}});
}
CmdPtr while_c(ExprPtr guard, CmdPtr body) {
  return std::make_shared<Command>(Command{WhileC{std::move(guard), std::move(body)}});
}
CmdPtr assign_c(Var target, ExprPtr value) {
  return std::make_shared<Command>(Command{AssignC{std::move(target), std::move(value)}});
}
CmdPtr load_c(Var target, ExprPtr address) {
  return std::make_shared<Command>(Command{LoadC{std::move(target), std::move(address)}});
}
CmdPtr store_c(ExprPtr address, ExprPtr value) {
  return std::make_shared<Command>(Command{StoreC{std::move(address), std::move(value)}});
}
CmdPtr alloc_c(Var target, ExprPtr size) {
  return std::make_shared<Command>(Command{AllocC{std::move(target), std::move(size)}});
}
CmdPtr free_c(ExprPtr address) {
  return std::make_shared<Command>(Command{FreeC{std::move(address)}});
}

namespace {

template <typename F>
void walk_exprs(const Expr& e, F&& f) {
  f(e);
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BinE>) {
          walk_exprs(*node.lhs, f);
          walk_exprs(*node.rhs, f);
        } else if constexpr (std::is_same_v<T, NotE> ||
                             std::is_same_v<T, OffsetE> ||
                             std::is_same_v<T, CastE>) {
          walk_exprs(*node.arg, f);
        } else if constexpr (std::is_same_v<T, ForgeE>) {
          walk_exprs(*node.block, f);
          walk_exprs(*node.offset, f);
        }
      },
      e.node);
}

template <typename FC, typename FE>
void walk(const Command& c, FC&& fc, FE&& fe) {
  fc(c);
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SeqC>) {
          walk(*node.first, fc, fe);
          walk(*node.second, fc, fe);
        } else if constexpr (std::is_same_v<T, IfC>) {
          walk_exprs(*node.guard, fe);
          walk(*node.then_branch, fc, fe);
          walk(*node.else_branch, fc, fe);
        } else if constexpr (std::is_same_v<T, WhileC>) {
          walk_exprs(*node.guard, fe);
          walk(*node.body, fc, fe);
        } else if constexpr (std::is_same_v<T, AssignC>) {
          walk_exprs(*node.value, fe);
        } else if constexpr (std::is_same_v<T, LoadC>) {
          walk_exprs(*node.address, fe);
        } else if constexpr (std::is_same_v<T, StoreC>) {
          walk_exprs(*node.address, fe);
          walk_exprs(*node.value, fe);
        } else if constexpr (std::is_same_v<T, AllocC>) {
          walk_exprs(*node.size, fe);
        } else if constexpr (std::is_same_v<T, FreeC>) {
          walk_exprs(*node.address, fe);
        }
      },
      c.node);
}

}  // namespace

std::set<Var> expr_fvs(const Expr& e) {
  std::set<Var> out;
  walk_exprs(e, [&](const Expr& sub) {
    if (const auto* v = std::get_if<VarE>(&sub.node)) out.insert(v->name);
  });
  return out;
}

std::set<Var> vars(const Command& c) {
  std::set<Var> out;
  walk(
      c,
      [&](const Command& sub) {
        std::visit(
            [&](const auto& node) {
              using T = std::decay_t<decltype(node)>;
              if constexpr (std::is_same_v<T, AssignC> ||
                            std::is_same_v<T, LoadC> ||
                            std::is_same_v<T, AllocC>)
                out.insert(node.target);
            },
            sub.node);
      },
      [&](const Expr& sub) {
        if (const auto* v = std::get_if<VarE>(&sub.node)) out.insert(v->name);
      });
  return out;
}

std::set<Var> modvars(const Command& c) {
  std::set<Var> out;
  walk(
      c,
      [&](const Command& sub) {
        std::visit(
            [&](const auto& node) {
              using T = std::decay_t<decltype(node)>;
              if constexpr (std::is_same_v<T, AssignC> ||
                            std::is_same_v<T, LoadC> ||
                            std::is_same_v<T, AllocC>)
                out.insert(node.target);
            },
            sub.node);
      },
      [](const Expr&) {});
  return out;
}

bool uses_gated_exprs(const Command& c) {
  bool found = false;
  walk(c, [](const Command&) {},
       [&](const Expr& sub) {
         if (std::holds_alternative<CastE>(sub.node) ||
             std::holds_alternative<ForgeE>(sub.node))
           found = true;
       });
  return found;
}

namespace {

// Precedence levels, loosest first: or, and, comparisons, additive,
// multiplicative, unary/atoms.
int prec(const Expr& e) {
  if (const auto* b = std::get_if<BinE>(&e.node)) {
    switch (b->op) {
      case BinOp::Or: return 0;
      case BinOp::And: return 1;
      case BinOp::Eq:
      case BinOp::Le: return 2;
      case BinOp::Add:
      case BinOp::Sub: return 3;
      case BinOp::Mul: return 4;
    }
  }
  if (std::holds_alternative<NotE>(e.node)) return 5;
  return 6;
}

void print_expr(std::ostream& os, const Expr& e, int min_prec) {
  int p = prec(e);
  bool parens = p < min_prec;
  if (parens) os << "(";
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VarE>) {
          os << node.name;
        } else if constexpr (std::is_same_v<T, IntE>) {
          os << node.value;
        } else if constexpr (std::is_same_v<T, BoolE>) {
          os << (node.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, NilE>) {
          os << "nil";
        } else if constexpr (std::is_same_v<T, BinE>) {
          // All binary operators associate to the left.
          print_expr(os, *node.lhs, p);
          os << " " << binop_name(node.op) << " ";
          print_expr(os, *node.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, NotE>) {
          os << "not ";
          print_expr(os, *node.arg, p);
        } else if constexpr (std::is_same_v<T, OffsetE>) {
          os << "offset(";
          print_expr(os, *node.arg, 0);
          os << ")";
        } else if constexpr (std::is_same_v<T, CastE>) {
          os << "cast(";
          print_expr(os, *node.arg, 0);
          os << ")";
        } else if constexpr (std::is_same_v<T, ForgeE>) {
          os << "forge(";
          print_expr(os, *node.block, 0);
          os << ", ";
          print_expr(os, *node.offset, 0);
          os << ")";
        }
      },
      e.node);
  if (parens) os << ")";
}

void print_cmd(std::ostream& os, const Command& c) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SkipC>) {
          os << "skip";
        } else if constexpr (std::is_same_v<T, SeqC>) {
          print_cmd(os, *node.first);
          os << "; ";
          print_cmd(os, *node.second);
        } else if constexpr (std::is_same_v<T, IfC>) {
          os << "if ";
          print_expr(os, *node.guard, 0);
          os << " then ";
          print_cmd(os, *node.then_branch);
          os << " else ";
          print_cmd(os, *node.else_branch);
          os << " end";
        } else if constexpr (std::is_same_v<T, WhileC>) {
          os << "while ";
          print_expr(os, *node.guard, 0);
          os << " do ";
          print_cmd(os, *node.body);
          os << " end";
        } else if constexpr (std::is_same_v<T, AssignC>) {
          os << node.target << " := ";
          print_expr(os, *node.value, 0);
        } else if constexpr (std::is_same_v<T, LoadC>) {
          os << node.target << " := [";
          print_expr(os, *node.address, 0);
          os << "]";
        } else if constexpr (std::is_same_v<T, StoreC>) {
          os << "[";
          print_expr(os, *node.address, 0);
          os << "] := ";
          print_expr(os, *node.value, 0);
        } else if constexpr (std::is_same_v<T, AllocC>) {
          os << node.target << " := alloc(";
          print_expr(os, *node.size, 0);
          os << ")";
        } else if constexpr (std::is_same_v<T, FreeC>) {
          os << "free(";
          print_expr(os, *node.address, 0);
          os << ")";
        }
      },
      c.node);
}

}  // namespace

std::string pretty(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

std::string pretty(const Command& c) {
  std::ostringstream os;
  print_cmd(os, c);
  return os.str();
}

bool equal(const Expr& a, const Expr& b) { return pretty(a) == pretty(b); }
bool equal(const Command& a, const Command& b) { return pretty(a) == pretty(b); }

}  // namespace memlab
