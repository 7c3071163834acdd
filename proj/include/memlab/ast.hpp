#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "memlab/value.hpp"

namespace memlab {

enum class BinOp { Add, Sub, Mul, Eq, Le, And, Or };

const char* binop_name(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarE {
  Var name;
};
struct IntE {
  Int value;
};
struct BoolE {
  bool value;
};
struct NilE {};
struct BinE {
  BinOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct NotE {
  ExprPtr arg;
};
struct OffsetE {
  ExprPtr arg;
};
// Cast and Forge always parse; evaluation gates them behind the matching
// relaxation flag.
struct CastE {
  ExprPtr arg;
};
struct ForgeE {
  ExprPtr block;
  ExprPtr offset;
};

struct Expr {
  std::variant<VarE, IntE, BoolE, NilE, BinE, NotE, OffsetE, CastE, ForgeE> node;
};

ExprPtr var_e(Var name);
ExprPtr int_e(Int value);
ExprPtr bool_e(bool value);
ExprPtr nil_e();
ExprPtr bin_e(BinOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr not_e(ExprPtr arg);
ExprPtr offset_e(ExprPtr arg);
ExprPtr cast_e(ExprPtr arg);
ExprPtr forge_e(ExprPtr block, ExprPtr offset);

struct Command;
using CmdPtr = std::shared_ptr<const Command>;

struct SkipC {};
struct SeqC {
  CmdPtr first;
  CmdPtr second;
};
struct IfC {
  ExprPtr guard;
  CmdPtr then_branch;
  CmdPtr else_branch;
};
struct WhileC {
  ExprPtr guard;
  CmdPtr body;
};
struct AssignC {
  Var target;
  ExprPtr value;
};
struct LoadC {
  Var target;
  ExprPtr address;
};
struct StoreC {
  ExprPtr address;
  ExprPtr value;
};
struct AllocC {
  Var target;
  ExprPtr size;
};
struct FreeC {
  ExprPtr address;
};

struct Command {
  std::variant<SkipC, SeqC, IfC, WhileC, AssignC, LoadC, StoreC, AllocC, FreeC>
      node;
};

CmdPtr skip_c();
CmdPtr seq_c(CmdPtr first, CmdPtr second);
CmdPtr if_c(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch);
CmdPtr while_c(ExprPtr guard, CmdPtr body);
CmdPtr assign_c(Var target, ExprPtr value);
CmdPtr load_c(Var target, ExprPtr address);
CmdPtr store_c(ExprPtr address, ExprPtr value);
CmdPtr alloc_c(Var target, ExprPtr size);
CmdPtr free_c(ExprPtr address);

// All variable names occurring anywhere in the command.
std::set<Var> vars(const Command& c);

// Variables on the left of :=, := [.], := alloc(.). Heap writes and frees
// modify no local variable.
std::set<Var> modvars(const Command& c);

std::set<Var> expr_fvs(const Expr& e);

// True if the tree contains a cast or forge node anywhere.
bool uses_gated_exprs(const Command& c);

std::string pretty(const Expr& e);
std::string pretty(const Command& c);

bool equal(const Expr& a, const Expr& b);
bool equal(const Command& a, const Command& b);

}  // namespace memlab
