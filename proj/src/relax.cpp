#include "memlab/relax.hpp"

#include <algorithm>

namespace memlab {

std::uint64_t Layout::assign(BlockId id, std::uint64_t extent, bool reuse) {
  if (reuse) {
    for (auto it = free_list.begin(); it != free_list.end(); ++it) {
      if (it->second >= extent) {
        std::uint64_t addr = it->first;
        if (it->second == extent) {
          free_list.erase(it);
        } else {
          it->first += extent;
          it->second -= extent;
        }
        base[id] = addr;
        return addr;
      }
    }
  }
  std::uint64_t addr = next_free;
  next_free += extent;
  base[id] = addr;
  return addr;
}

void Layout::release(BlockId id, std::uint64_t extent) {
  auto it = base.find(id);
  if (it == base.end()) return;
  free_list.emplace_back(it->second, extent);
}

std::optional<std::uint64_t> Layout::address_of(const Ptr& p) const {
  auto it = base.find(p.block);
  if (it == base.end()) return std::nullopt;
  // Addresses are plain 64-bit words; offsets wrap into them modulo 2^64.
  static const Int word_span = Int(1) << 64;
  Int off = p.offset % word_span;
  if (off < 0) off += word_span;
  return it->second + static_cast<std::uint64_t>(off);
}

std::uint64_t block_extent(const State& s, BlockId id) {
  Int max_off = -1;
  for (const auto& [k, v] : s.heap) {
    if (k.block == id && k.offset > max_off) max_off = k.offset;
  }
  if (max_off < 0) return 1;
  Int extent = max_off + 1;
  if (extent > Int(std::uint64_t(1) << 32)) return std::uint64_t(1) << 32;
  return static_cast<std::uint64_t>(extent);
}

RunContext make_run_context(const State& initial) {
  RunContext ctx;
  for (BlockId id : blocks(initial))
    ctx.layout.assign(id, block_extent(initial, id), false);
  return ctx;
}

Value cast_value(const Value& p, const Layout& layout) {
  if (!p.is_ptr()) return Value::nil();
  auto addr = layout.address_of(p.ptr_val());
  if (!addr) return Value::nil();
  return Value::integer(Int(*addr));
}

Value forge_value(const Value& block, const Value& offset) {
  if (!block.is_int() || !offset.is_int()) return Value::nil();
  // Identifiers are 64-bit naturals; anything outside that range cannot name
  // a block.
  if (block.int_val() < 0 || block.int_val() > Int(UINT64_MAX)) return Value::nil();
  return Value::pointer(static_cast<BlockId>(block.int_val()), offset.int_val());
}

Value pointer_equal(const Value& a, const Value& b, const SafetyConfig& cfg,
                    const Layout& layout) {
  if (cfg.pointer_eq == PtrEqMode::Structural) return Value::boolean(a == b);
  auto addr = [&](const Value& v) -> std::optional<Int> {
    if (v.is_int()) return v.int_val();
    if (v.is_ptr()) {
      auto phys = layout.address_of(v.ptr_val());
      if (!phys) return std::nullopt;
      return Int(*phys);
    }
    return std::nullopt;
  };
  bool numeric_a = a.is_int() || a.is_ptr();
  bool numeric_b = b.is_int() || b.is_ptr();
  if (numeric_a && numeric_b && (a.is_ptr() || b.is_ptr())) {
    auto pa = addr(a);
    auto pb = addr(b);
    if (!pa || !pb) return Value::nil();
    return Value::boolean(*pa == *pb);
  }
  return Value::boolean(a == b);
}

namespace {

BlockId choose_id(const State& s, const SafetyConfig& cfg, RunContext& ctx) {
  switch (cfg.freshness.kind) {
    case FreshnessMode::FreshAll:
      return fresh_id(ids(s));
    case FreshnessMode::FreshBlocksOnly: {
      // Smallest id not naming a live block; dangling ids are fair game.
      std::set<BlockId> live = blocks(s);
      BlockId id = 1;
      while (live.count(id)) ++id;
      return id;
    }
    case FreshnessMode::ModK: {
      // A k-tag identifier space: the next tag comes from a round-robin
      // counter and is reused even if a live block already carries it,
      // deliberately aliasing the two.
      BlockId id = ctx.layout.alloc_counter % cfg.freshness.k;
      ++ctx.layout.alloc_counter;
      return id;
    }
  }
  return fresh_id(ids(s));
}

}  // namespace

AllocOutcome alloc_relaxed(const State& s, const Int& size, const SafetyConfig& cfg,
                           RunContext& ctx) {
  AllocOutcome out;
  if (cfg.memory_limit) {
    Int live = Int(s.heap.size());
    if (live + size > Int(*cfg.memory_limit)) {
      out.kind = cfg.oom_mode == OomMode::HaltError ? AllocOutcome::OomError
                                                    : AllocOutcome::OomNil;
      out.state = s;
      return out;
    }
  }
  BlockId id = choose_id(s, cfg, ctx);
  out.state = s;
  out.id = id;
  for (Int k = 0; k < size; ++k) {
    Value contents = Value::integer(0);
    if (cfg.uninit_memory && !ctx.pool.recycled.empty()) {
      contents = ctx.pool.recycled.front();
      ctx.pool.recycled.pop_front();
    }
    out.state.heap[HeapKey{id, k}] = contents;
  }
  std::uint64_t extent = 1;
  if (size > 0 && size <= Int(std::uint64_t(1) << 32))
    extent = static_cast<std::uint64_t>(size);
  ctx.layout.assign(id, extent, cfg.freshness.kind != FreshnessMode::FreshAll);
  return out;
}

namespace relaxed {

Value eval_expr(const Expr& e, const State& s, const SafetyConfig& cfg,
                const Layout& layout) {
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
          Value a = eval_expr(*node.lhs, s, cfg, layout);
          Value b = eval_expr(*node.rhs, s, cfg, layout);
          switch (node.op) {
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
              return pointer_equal(a, b, cfg, layout);
            case BinOp::Le:
              if (a.is_int() && b.is_int()) return Value::boolean(a.int_val() <= b.int_val());
              return Value::nil();
            case BinOp::And:
              if (a.is_bool() && b.is_bool())
                return Value::boolean(a.bool_val() && b.bool_val());
              return Value::nil();
            case BinOp::Or:
              if (a.is_bool() && b.is_bool())
                return Value::boolean(a.bool_val() || b.bool_val());
              return Value::nil();
          }
          return Value::nil();
        } else if constexpr (std::is_same_v<T, NotE>) {
          Value v = eval_expr(*node.arg, s, cfg, layout);
          return v.is_bool() ? Value::boolean(!v.bool_val()) : Value::nil();
        } else if constexpr (std::is_same_v<T, OffsetE>) {
          Value v = eval_expr(*node.arg, s, cfg, layout);
          return v.is_ptr() ? Value::integer(v.ptr_val().offset) : Value::nil();
        } else if constexpr (std::is_same_v<T, CastE>) {
          if (!cfg.casts) return Value::nil();
          return cast_value(eval_expr(*node.arg, s, cfg, layout), layout);
        } else if constexpr (std::is_same_v<T, ForgeE>) {
          if (!cfg.forging) return Value::nil();
          return forge_value(eval_expr(*node.block, s, cfg, layout),
                             eval_expr(*node.offset, s, cfg, layout));
        }
      },
      e.node);
}

namespace {

struct Evaluator {
  Fuel fuel;
  const SafetyConfig& cfg;
  RunContext& ctx;
  const TraceFn* trace;

  void emit(const std::string& path, OutcomeKind kind) {
    if (trace && *trace) (*trace)(path, kind);
  }

  OutcomePlus run(const Command& c, State s, const std::string& path) {
    return std::visit(
        [&](const auto& node) -> OutcomePlus {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SkipC>) {
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, SeqC>) {
            OutcomePlus first = run(*node.first, std::move(s), path + "/0");
            if (first.kind != OutcomeKind::Done) return first;
            OutcomePlus second =
                run(*node.second, std::move(first.state), path + "/1");
            if (second.kind != OutcomeKind::Done) return second;
            second.allocated.insert(first.allocated.begin(), first.allocated.end());
            return second;
          } else if constexpr (std::is_same_v<T, IfC>) {
            Value guard = eval_expr(*node.guard, s, cfg, ctx.layout);
            if (!guard.is_bool()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            return run(guard.bool_val() ? *node.then_branch : *node.else_branch,
                       std::move(s), path + (guard.bool_val() ? "/t" : "/f"));
          } else if constexpr (std::is_same_v<T, WhileC>) {
            std::set<BlockId> allocated;
            std::uint64_t iter = 0;
            for (;;) {
              Value guard = eval_expr(*node.guard, s, cfg, ctx.layout);
              if (!guard.is_bool()) {
                emit(path, OutcomeKind::Error);
                return OutcomePlus::error();
              }
              if (!guard.bool_val()) {
                emit(path, OutcomeKind::Done);
                return OutcomePlus::done(std::move(allocated), std::move(s));
              }
              if (fuel == 0) {
                emit(path, OutcomeKind::OutOfFuel);
                return OutcomePlus::out_of_fuel();
              }
              --fuel;
              OutcomePlus body =
                  run(*node.body, std::move(s), path + "/" + std::to_string(iter++));
              if (body.kind != OutcomeKind::Done) return body;
              allocated.insert(body.allocated.begin(), body.allocated.end());
              s = std::move(body.state);
            }
          } else if constexpr (std::is_same_v<T, AssignC>) {
            Value v = eval_expr(*node.value, s, cfg, ctx.layout);
            s.store[node.target] = std::move(v);
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, LoadC>) {
            Value addr = eval_expr(*node.address, s, cfg, ctx.layout);
            if (!addr.is_ptr()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            auto it = s.heap.find(HeapKey{addr.ptr_val().block, addr.ptr_val().offset});
            if (it == s.heap.end()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            s.store[node.target] = it->second;
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, StoreC>) {
            Value addr = eval_expr(*node.address, s, cfg, ctx.layout);
            if (!addr.is_ptr()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            auto it = s.heap.find(HeapKey{addr.ptr_val().block, addr.ptr_val().offset});
            if (it == s.heap.end()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            it->second = eval_expr(*node.value, s, cfg, ctx.layout);
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({}, std::move(s));
          } else if constexpr (std::is_same_v<T, AllocC>) {
            Value size = eval_expr(*node.size, s, cfg, ctx.layout);
            if (!size.is_int() || size.int_val() < 0 ||
                size.int_val() > kMaxAllocCells) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            AllocOutcome alloc = alloc_relaxed(s, size.int_val(), cfg, ctx);
            if (alloc.kind == AllocOutcome::OomError) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            if (alloc.kind == AllocOutcome::OomNil) {
              alloc.state.store[node.target] = Value::nil();
              emit(path, OutcomeKind::Done);
              return OutcomePlus::done({}, std::move(alloc.state));
            }
            alloc.state.store[node.target] = Value::pointer(alloc.id, 0);
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({alloc.id}, std::move(alloc.state));
          } else if constexpr (std::is_same_v<T, FreeC>) {
            Value addr = eval_expr(*node.address, s, cfg, ctx.layout);
            if (!addr.is_ptr() || addr.ptr_val().offset != 0) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            BlockId id = addr.ptr_val().block;
            std::uint64_t extent = block_extent(s, id);
            std::vector<Value> freed;
            for (auto it = s.heap.begin(); it != s.heap.end();) {
              if (it->first.block == id) {
                freed.push_back(it->second);
                it = s.heap.erase(it);
              } else {
                ++it;
              }
            }
            if (freed.empty()) {
              emit(path, OutcomeKind::Error);
              return OutcomePlus::error();
            }
            ctx.pool.recycled.insert(ctx.pool.recycled.begin(), freed.begin(),
                                     freed.end());
            ctx.layout.release(id, extent);
            emit(path, OutcomeKind::Done);
            return OutcomePlus::done({}, std::move(s));
          }
        },
        c.node);
  }
};

}  // namespace

OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel,
                          const SafetyConfig& cfg, RunContext& ctx,
                          const TraceFn* trace) {
  Evaluator ev{fuel, cfg, ctx, trace};
  return ev.run(c, s, "");
}

OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel,
                          const SafetyConfig& cfg) {
  RunContext ctx = make_run_context(s);
  return eval_cmd_plus(c, s, fuel, cfg, ctx);
}

Outcome eval_cmd(const Command& c, const State& s, Fuel fuel,
                 const SafetyConfig& cfg) {
  OutcomePlus out = eval_cmd_plus(c, s, fuel, cfg);
  return Outcome{out.kind, std::move(out.state)};
}

}  // namespace relaxed
}  // namespace memlab
