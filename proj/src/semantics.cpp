#include "memlab/semantics.hpp"

namespace memlab::strict {

namespace {

Value eval_binop(BinOp op, const Value& a, const Value& b) {
  switch (op) {
    case BinOp::Add:
      if (a.is_int() && b.is_int()) return Value::integer(a.int_val() + b.int_val());
      if (a.is_ptr() && b.is_int())
        return Value::pointer(a.ptr_val().block, a.ptr_val().offset + b.int_val());
      if (a.is_int() && b.is_ptr())
        return Value::pointer(b.ptr_val().block, a.int_val() + b.ptr_val().offset);
      return Value::nil();
    case BinOp::Sub:
      if (a.is_int() && b.is_int()) return Value::integer(a.int_val() - b.int_val());
      if (a.is_ptr() && b.is_int())
        return Value::pointer(a.ptr_val().block, a.ptr_val().offset - b.int_val());
      return Value::nil();
    case BinOp::Mul:
      if (a.is_int() && b.is_int()) return Value::integer(a.int_val() * b.int_val());
      return Value::nil();
    case BinOp::Eq:
      // Structural equality on all values; pointer equality compares both the
      // block identifier and the offset.
      return Value::boolean(a == b);
    case BinOp::Le:
      if (a.is_int() && b.is_int()) return Value::boolean(a.int_val() <= b.int_val());
      return Value::nil();
    case BinOp::And:
      if (a.is_bool() && b.is_bool()) return Value::boolean(a.bool_val() && b.bool_val());
      return Value::nil();
    case BinOp::Or:
      if (a.is_bool() && b.is_bool()) return Value::boolean(a.bool_val() || b.bool_val());
      return Value::nil();
  }
  return Value::nil();
}

struct Evaluator {
  Fuel fuel;

  OutcomePlus run(const Command& c, State s) {
    return std::visit(
        [&](const auto& node) -> OutcomePlus {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SkipC>) {
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, SeqC>) {
            OutcomePlus first = run(*node.first, std::move(s));
            if (first.kind != OutcomeKind::Done) return first;
            OutcomePlus second = run(*node.second, std::move(first.state));
            if (second.kind != OutcomeKind::Done) return second;
            second.allocated.insert(first.allocated.begin(), first.allocated.end());
            return second;
          } else if constexpr (std::is_same_v<T, IfC>) {
            Value guard = eval_expr(*node.guard, s);
            if (!guard.is_bool()) return OutcomePlus::error();
            return run(guard.bool_val() ? *node.then_branch : *node.else_branch,
                       std::move(s));
          } else if constexpr (std::is_same_v<T, WhileC>) {
            std::set<BlockId> allocated;
            for (;;) {
              Value guard = eval_expr(*node.guard, s);
              if (!guard.is_bool()) return OutcomePlus::error();
              if (!guard.bool_val())
                return OutcomePlus::done(std::move(allocated), std::move(s));
              if (fuel == 0) return OutcomePlus::out_of_fuel();
              --fuel;
              OutcomePlus body = run(*node.body, std::move(s));
              if (body.kind != OutcomeKind::Done) return body;
              allocated.insert(body.allocated.begin(), body.allocated.end());
              s = std::move(body.state);
            }
          } else if constexpr (std::is_same_v<T, AssignC>) {
            s.store[node.target] = eval_expr(*node.value, s);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, LoadC>) {
            Value addr = eval_expr(*node.address, s);
            if (!addr.is_ptr()) return OutcomePlus::error();
            auto it = s.heap.find(HeapKey{addr.ptr_val().block, addr.ptr_val().offset});
            if (it == s.heap.end()) return OutcomePlus::error();
            s.store[node.target] = it->second;
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, StoreC>) {
            Value addr = eval_expr(*node.address, s);
            if (!addr.is_ptr()) return OutcomePlus::error();
            auto it = s.heap.find(HeapKey{addr.ptr_val().block, addr.ptr_val().offset});
            if (it == s.heap.end()) return OutcomePlus::error();
            it->second = eval_expr(*node.value, s);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, AllocC>) {
            Value size = eval_expr(*node.size, s);
            // Size must be a nonnegative integer; zero allocates an empty
            // block whose pointer is immediately dangling.
            if (!size.is_int() || size.int_val() < 0 ||
                size.int_val() > kMaxAllocCells)
              return OutcomePlus::error();
            BlockId id = fresh_id(ids(s));
            for (Int k = 0; k < size.int_val(); ++k)
              s.heap[HeapKey{id, k}] = Value::integer(0);
            s.store[node.target] = Value::pointer(id, 0);
            return OutcomePlus::done({id}, std::move(s));
          } else if constexpr (std::is_same_v<T, FreeC>) {
            Value addr = eval_expr(*node.address, s);
            if (!addr.is_ptr() || addr.ptr_val().offset != 0)
              return OutcomePlus::error();
            BlockId id = addr.ptr_val().block;
            bool live = false;
            for (auto it = s.heap.begin(); it != s.heap.end();) {
              if (it->first.block == id) {
                live = true;
                it = s.heap.erase(it);
              } else {
                ++it;
              }
            }
            if (!live) return OutcomePlus::error();
            return OutcomePlus::done({}, std::move(s));
          }
        },
        c.node);
  }
};

}  // namespace

Value eval_expr(const Expr& e, const State& s) {
  return std::visit(
      [&](const auto& node) -> Value {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, VarE>) {
          auto it = s.store.find(node.name);
          return it == s.store.end() ? Value::nil() : it->second;
        } else if constexpr (std::is_same_v<T, IntE>) {
          return Value::integer(node.value);
        } else if constexpr (std::is_same_v<T, BoolE>) {
          return Value::boolean(node.value);
        } else if constexpr (std::is_same_v<T, NilE>) {
          return Value::nil();
        } else if constexpr (std::is_same_v<T, BinE>) {
          return eval_binop(node.op, eval_expr(*node.lhs, s), eval_expr(*node.rhs, s));
        } else if constexpr (std::is_same_v<T, NotE>) {
          Value v = eval_expr(*node.arg, s);
          return v.is_bool() ? Value::boolean(!v.bool_val()) : Value::nil();
        } else if constexpr (std::is_same_v<T, OffsetE>) {
          Value v = eval_expr(*node.arg, s);
          return v.is_ptr() ? Value::integer(v.ptr_val().offset) : Value::nil();
        } else {
          // Cast and forge are disabled under the strict semantics.
          return Value::nil();
        }
      },
      e.node);
}

OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel) {
  Evaluator ev{fuel};
  return ev.run(c, s);
}

Outcome eval_cmd(const Command& c, const State& s, Fuel fuel) {
  OutcomePlus out = eval_cmd_plus(c, s, fuel);
  return Outcome{out.kind, std::move(out.state)};
}

std::set<BlockId> finalids(const Command& c, const State& s, Fuel fuel) {
  OutcomePlus out = eval_cmd_plus(c, s, fuel);
  if (out.kind != OutcomeKind::Done) return {};
  std::set<BlockId> result;
  for (BlockId i : ids(out.state))
    if (!out.allocated.count(i)) result.insert(i);
  return result;
}

}  // namespace memlab::strict
