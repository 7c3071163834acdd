#include "memlab/gen.hpp"

#include <algorithm>

namespace memlab {

Var gen_var(Rng& rng, const GenParams& p) {
  return p.pool[rng.below(p.pool.size())];
}

Value gen_value(Rng& rng, const GenParams& p, const std::vector<BlockId>& candidates) {
  std::uint64_t pick = rng.below(candidates.empty() ? 7 : 10);
  if (pick < 4) {
    // Mostly small integers; occasionally something well outside word range.
    if (rng.one_in(16))
      return Value::integer(Int("340282366920938463463374607431768211456") +
                            Int(rng.range(-4, 4)));
    return Value::integer(Int(rng.range(-8, 8)));
  }
  if (pick < 6) return Value::boolean(rng.one_in(2));
  if (pick < 7) return Value::nil();
  BlockId id = candidates[rng.below(candidates.size())];
  Int offset = Int(rng.range(-1, static_cast<std::int64_t>(p.max_block_size)));
  return Value::pointer(id, offset);
}

State gen_state(Rng& rng, const GenParams& p) {
  State s;
  std::size_t nblocks = rng.below(p.max_blocks + 1);
  std::set<BlockId> live;
  while (live.size() < nblocks)
    live.insert(1 + rng.below(p.max_blocks * 2));

  // Pointer candidates: live ids plus a couple of dangling ones.
  std::vector<BlockId> candidates(live.begin(), live.end());
  candidates.push_back(1 + rng.below(p.max_blocks * 2));
  candidates.push_back(p.max_blocks * 2 + 1 + rng.below(3));

  for (BlockId id : live) {
    std::size_t size = 1 + rng.below(p.max_block_size);
    for (std::size_t k = 0; k < size; ++k)
      s.heap[HeapKey{id, Int(k)}] = gen_value(rng, p, candidates);
  }
  for (const Var& x : p.pool) s.store[x] = gen_value(rng, p, candidates);
  return s;
}

namespace {

ExprPtr gen_leaf(Rng& rng, const GenParams& p) {
  switch (rng.below(6)) {
    case 0:
    case 1:
    case 2: return var_e(gen_var(rng, p));
    case 3: return int_e(Int(rng.range(-4, 8)));
    case 4: return bool_e(rng.one_in(2));
    default: return nil_e();
  }
}

}  // namespace

ExprPtr gen_expr(Rng& rng, const GenParams& p, int depth) {
  if (depth <= 0 || rng.one_in(3)) return gen_leaf(rng, p);
  std::uint64_t extras = (p.gen_casts ? 1 : 0) + (p.gen_forge ? 1 : 0);
  std::uint64_t pick = rng.below(9 + extras);
  if (pick < 7) {
    static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq,
                                BinOp::Le,  BinOp::And, BinOp::Or};
    // Multiplication keeps one literal operand. A var-times-var product
    // inside a loop squares on every unfolding, and with arbitrary precision
    // integers that exhausts memory long before the fuel runs out.
    if (ops[pick] == BinOp::Mul)
      return bin_e(BinOp::Mul, gen_expr(rng, p, depth - 1),
                   int_e(Int(rng.range(-4, 8))));
    return bin_e(ops[pick], gen_expr(rng, p, depth - 1),
                 gen_expr(rng, p, depth - 1));
  }
  if (pick == 7) return not_e(gen_expr(rng, p, depth - 1));
  if (pick == 8) return offset_e(gen_expr(rng, p, depth - 1));
  if (pick == 9 && p.gen_casts) return cast_e(gen_expr(rng, p, depth - 1));
  if (p.gen_forge)
    return forge_e(gen_expr(rng, p, depth - 1), gen_expr(rng, p, depth - 1));
  return cast_e(gen_expr(rng, p, depth - 1));
}

namespace {

// Addresses want to be pointer-shaped: a bare variable or variable plus a
// small offset, with an occasional arbitrary expression.
ExprPtr gen_addr(Rng& rng, const GenParams& p, int depth) {
  switch (rng.below(4)) {
    case 0: return var_e(gen_var(rng, p));
    case 1:
      return bin_e(BinOp::Add, var_e(gen_var(rng, p)),
                   int_e(Int(rng.range(0, 3))));
    case 2:
      return bin_e(BinOp::Sub, var_e(gen_var(rng, p)),
                   int_e(Int(rng.range(0, 2))));
    default: return gen_expr(rng, p, depth - 1);
  }
}

CmdPtr gen_cmd_rec(Rng& rng, const GenParams& p, int depth) {
  std::uint64_t pick = depth <= 0 ? rng.below(6) : rng.below(10);
  switch (pick) {
    case 0: return skip_c();
    case 1: return assign_c(gen_var(rng, p), gen_expr(rng, p, depth));
    case 2: return load_c(gen_var(rng, p), gen_addr(rng, p, depth));
    case 3: return store_c(gen_addr(rng, p, depth), gen_expr(rng, p, depth));
    case 4: {
      ExprPtr size = rng.one_in(4) ? gen_expr(rng, p, depth)
                                   : int_e(Int(rng.range(0, 3)));
      return alloc_c(gen_var(rng, p), size);
    }
    case 5: return free_c(gen_addr(rng, p, depth));
    case 6:
    case 7:
      return seq_c(gen_cmd_rec(rng, p, depth - 1), gen_cmd_rec(rng, p, depth - 1));
    case 8:
      return if_c(gen_expr(rng, p, depth - 1), gen_cmd_rec(rng, p, depth - 1),
                  gen_cmd_rec(rng, p, depth - 1));
    default: {
      // Biased toward loops with a decrementing counter so some actually
      // terminate; a 'while true' flavor feeds the fuel-exhaustion checkers,
      // and the rest exercise errors.
      if (rng.one_in(2)) {
        Var x = gen_var(rng, p);
        CmdPtr body = seq_c(gen_cmd_rec(rng, p, depth - 1),
                            assign_c(x, bin_e(BinOp::Sub, var_e(x), int_e(Int(1)))));
        return while_c(bin_e(BinOp::Le, int_e(Int(1)), var_e(x)), body);
      }
      if (rng.one_in(2))
        return while_c(bool_e(true), gen_cmd_rec(rng, p, depth - 1));
      return while_c(gen_expr(rng, p, depth - 1), gen_cmd_rec(rng, p, depth - 1));
    }
  }
}

}  // namespace

CmdPtr gen_command(Rng& rng, const GenParams& p) {
  return gen_cmd_rec(rng, p, p.max_depth);
}

Permutation gen_permutation(Rng& rng, const std::set<BlockId>& over) {
  std::vector<BlockId> support(over.begin(), over.end());
  BlockId top = over.empty() ? 0 : *over.rbegin();
  support.push_back(top + 1);
  support.push_back(top + 2);
  std::vector<BlockId> image = support;
  for (std::size_t i = image.size(); i > 1; --i)
    std::swap(image[i - 1], image[rng.below(i)]);
  std::map<BlockId, BlockId> pairs;
  for (std::size_t i = 0; i < support.size(); ++i) pairs[support[i]] = image[i];
  return *Permutation::from_pairs(pairs);
}

namespace {

MValue gen_mvalue(Rng& rng, const std::vector<BlockId>& candidates) {
  if (!candidates.empty() && rng.one_in(3)) {
    BlockId id = candidates[rng.below(candidates.size())];
    return MValue::p(id, rng.below(6));
  }
  return MValue::w(static_cast<Word>(rng.range(-4, 12)));
}

Instr gen_instr(Rng& rng) {
  Instr i;
  auto reg = [&] { return static_cast<Reg>(rng.below(kNumRegs)); };
  switch (rng.below(10)) {
    case 0: i.op = Instr::Nop; break;
    case 1:
      i.op = Instr::Const;
      i.rd = reg();
      i.imm = static_cast<std::uint32_t>(rng.below(16));
      break;
    case 2:
      i.op = Instr::Mov;
      i.r1 = reg();
      i.rd = reg();
      break;
    case 3: {
      i.op = Instr::Binop;
      static const BinOp ops[] = {BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Eq,
                                  BinOp::Le,  BinOp::And, BinOp::Or};
      i.bop = ops[rng.below(7)];
      i.r1 = reg();
      i.r2 = reg();
      i.rd = reg();
      break;
    }
    case 4:
      i.op = Instr::Load;
      i.r1 = reg();
      i.rd = reg();
      break;
    case 5:
      i.op = Instr::Store;
      i.r1 = reg();
      i.r2 = reg();
      break;
    case 6:
      i.op = Instr::Jump;
      i.r1 = reg();
      break;
    case 7:
      i.op = Instr::Jal;
      i.r1 = reg();
      break;
    case 8:
      i.op = Instr::Bnz;
      i.r1 = reg();
      i.imm = static_cast<std::uint32_t>(
          static_cast<std::int32_t>(rng.range(-3, 3)));
      break;
    default: i.op = Instr::Halt; break;
  }
  return i;
}

}  // namespace

MachineState gen_machine_state(Rng& rng, const GenParams& p) {
  MachineState ms;
  std::size_t nblocks = 1 + rng.below(p.max_blocks);
  std::set<BlockId> live;
  while (live.size() < nblocks)
    live.insert(1 + rng.below(p.max_blocks * 2));
  std::vector<BlockId> candidates(live.begin(), live.end());
  candidates.push_back(p.max_blocks * 2 + 1 + rng.below(3));

  BlockId code = *live.begin();
  for (BlockId id : live) {
    std::size_t size = 1 + rng.below(p.max_block_size + 2);
    std::vector<MValue> cells;
    for (std::size_t k = 0; k < size; ++k) {
      if (id == code || rng.one_in(3))
        cells.push_back(MValue::w(encode(gen_instr(rng))));
      else
        cells.push_back(gen_mvalue(rng, candidates));
    }
    ms.mem[id] = std::move(cells);
  }
  for (std::size_t i = 0; i < kNumRegs; ++i)
    ms.regs[i] = gen_mvalue(rng, candidates);
  if (rng.one_in(8)) {
    // Start directly on a monitor service; r1/r2 hold the arguments and ra
    // the return address.
    ms.pc = MValue::w(rng.below(4));
    ms.reg(Reg::Ra) = MValue::p(code, rng.below(ms.mem[code].size()));
  } else {
    ms.pc = MValue::p(code, rng.below(ms.mem[code].size() + 1));
  }
  return ms;
}

std::map<BlockId, std::vector<MValue>> gen_machine_mem(
    Rng& rng, const GenParams& p, const std::set<BlockId>& avoid) {
  std::map<BlockId, std::vector<MValue>> out;
  BlockId top = avoid.empty() ? 0 : *avoid.rbegin();
  std::size_t nblocks = rng.below(3);
  std::set<BlockId> chosen;
  while (chosen.size() < nblocks) chosen.insert(top + 1 + rng.below(6));
  std::vector<BlockId> candidates(chosen.begin(), chosen.end());
  for (BlockId id : chosen) {
    std::size_t size = 1 + rng.below(p.max_block_size);
    std::vector<MValue> cells;
    for (std::size_t k = 0; k < size; ++k)
      cells.push_back(gen_mvalue(rng, candidates));
    out[id] = std::move(cells);
  }
  return out;
}

}  // namespace memlab
