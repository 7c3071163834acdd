#include "memlab/machine.hpp"

#include <algorithm>
#include <sstream>

#include "memlab/parser.hpp"

namespace memlab {

std::string show_mvalue(const MValue& v) {
  if (v.is_word()) return "W(" + std::to_string(v.word) + ")";
  return "P(" + std::to_string(v.ptr.block) + "," + std::to_string(v.ptr.offset) + ")";
}

const char* reg_name(Reg r) {
  static const char* names[] = {"r0", "r1", "r2", "r3", "r4",
                                "r5", "r6", "r7", "ra"};
  return names[static_cast<std::size_t>(r)];
}

std::optional<Reg> reg_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kNumRegs; ++i)
    if (name == reg_name(static_cast<Reg>(i))) return static_cast<Reg>(i);
  return std::nullopt;
}

namespace {

// Opcode assignments; Binop takes one opcode per operator.
constexpr unsigned kOpNop = 0, kOpConst = 1, kOpMov = 2, kOpLoad = 3,
                   kOpStore = 4, kOpJump = 5, kOpJal = 6, kOpBnz = 7,
                   kOpHalt = 8, kOpBinBase = 9;  // 9..15: Add..Or

unsigned opcode_of(const Instr& i) {
  switch (i.op) {
    case Instr::Nop: return kOpNop;
    case Instr::Const: return kOpConst;
    case Instr::Mov: return kOpMov;
    case Instr::Load: return kOpLoad;
    case Instr::Store: return kOpStore;
    case Instr::Jump: return kOpJump;
    case Instr::Jal: return kOpJal;
    case Instr::Bnz: return kOpBnz;
    case Instr::Halt: return kOpHalt;
    case Instr::Binop: return kOpBinBase + static_cast<unsigned>(i.bop);
  }
  return kOpNop;
}

struct FieldUse {
  bool r1 = false, r2 = false, rd = false, imm = false;
};

FieldUse fields_of(Instr::Op op) {
  switch (op) {
    case Instr::Nop: return {};
    case Instr::Const: return {false, false, true, true};
    case Instr::Mov: return {true, false, true, false};
    case Instr::Binop: return {true, true, true, false};
    case Instr::Load: return {true, false, true, false};
    case Instr::Store: return {true, true, false, false};
    case Instr::Jump: return {true, false, false, false};
    case Instr::Jal: return {true, false, false, false};
    case Instr::Bnz: return {true, false, false, true};
    case Instr::Halt: return {};
  }
  return {};
}

}  // namespace

Word encode(const Instr& i) {
  FieldUse use = fields_of(i.op);
  Word w = opcode_of(i);
  if (use.r1) w |= Word(static_cast<unsigned>(i.r1)) << 4;
  if (use.r2) w |= Word(static_cast<unsigned>(i.r2)) << 8;
  if (use.rd) w |= Word(static_cast<unsigned>(i.rd)) << 12;
  if (use.imm) w |= Word(i.imm) << 16;
  return w;
}

std::optional<Instr> decode(Word w) {
  if (w >> 48) return std::nullopt;
  unsigned op = w & 0xf;
  unsigned f1 = (w >> 4) & 0xf;
  unsigned f2 = (w >> 8) & 0xf;
  unsigned fd = (w >> 12) & 0xf;
  std::uint32_t imm = static_cast<std::uint32_t>(w >> 16);

  Instr i;
  if (op >= kOpBinBase) {
    i.op = Instr::Binop;
    i.bop = static_cast<BinOp>(op - kOpBinBase);
  } else {
    switch (op) {
      case kOpNop: i.op = Instr::Nop; break;
      case kOpConst: i.op = Instr::Const; break;
      case kOpMov: i.op = Instr::Mov; break;
      case kOpLoad: i.op = Instr::Load; break;
      case kOpStore: i.op = Instr::Store; break;
      case kOpJump: i.op = Instr::Jump; break;
      case kOpJal: i.op = Instr::Jal; break;
      case kOpBnz: i.op = Instr::Bnz; break;
      case kOpHalt: i.op = Instr::Halt; break;
      default: return std::nullopt;
    }
  }
  FieldUse use = fields_of(i.op);
  if ((!use.r1 && f1) || (!use.r2 && f2) || (!use.rd && fd) || (!use.imm && imm))
    return std::nullopt;
  if ((use.r1 && f1 >= kNumRegs) || (use.r2 && f2 >= kNumRegs) ||
      (use.rd && fd >= kNumRegs))
    return std::nullopt;
  if (use.r1) i.r1 = static_cast<Reg>(f1);
  if (use.r2) i.r2 = static_cast<Reg>(f2);
  if (use.rd) i.rd = static_cast<Reg>(fd);
  if (use.imm) i.imm = imm;
  return i;
}

namespace {

std::optional<MValue> eval_machine_binop(BinOp op, const MValue& a,
                                         const MValue& b) {
  switch (op) {
    case BinOp::Add:
      if (a.is_word() && b.is_word()) return MValue::w(a.word + b.word);
      if (a.is_ptr() && b.is_word())
        return MValue::p(a.ptr.block, a.ptr.offset + b.word);
      if (a.is_word() && b.is_ptr())
        return MValue::p(b.ptr.block, a.word + b.ptr.offset);
      return std::nullopt;
    case BinOp::Sub:
      if (a.is_word() && b.is_word()) return MValue::w(a.word - b.word);
      if (a.is_ptr() && b.is_word())
        return MValue::p(a.ptr.block, a.ptr.offset - b.word);
      return std::nullopt;
    case BinOp::Mul:
      if (a.is_word() && b.is_word()) return MValue::w(a.word * b.word);
      return std::nullopt;
    case BinOp::Eq:
      if (a.is_word() && b.is_word()) return MValue::w(a.word == b.word ? 1 : 0);
      if (a.is_ptr() && b.is_ptr()) {
        // Comparing pointers into different blocks is the unsafe case the eq
        // service exists to replace; the bare instruction gets stuck.
        if (a.ptr.block != b.ptr.block) return std::nullopt;
        return MValue::w(a.ptr.offset == b.ptr.offset ? 1 : 0);
      }
      return std::nullopt;
    case BinOp::Le:
      if (a.is_word() && b.is_word())
        return MValue::w(static_cast<std::int64_t>(a.word) <=
                                 static_cast<std::int64_t>(b.word)
                             ? 1
                             : 0);
      return std::nullopt;
    case BinOp::And:
      if (a.is_word() && b.is_word()) return MValue::w(a.word & b.word);
      return std::nullopt;
    case BinOp::Or:
      if (a.is_word() && b.is_word()) return MValue::w(a.word | b.word);
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<MachineState> do_service(const MachineState& ms, Word which) {
  MachineState out = ms;
  switch (which) {
    case kServiceAlloc: {
      const MValue& arg = ms.reg(Reg::R1);
      if (!arg.is_word() || arg.word > kMaxAllocWords) return std::nullopt;
      std::set<BlockId> used = ids_machine(ms);
      BlockId fresh = used.empty() ? 1 : *used.rbegin() + 1;
      out.mem[fresh] = std::vector<MValue>(arg.word, MValue::w(0));
      out.reg(Reg::R1) = MValue::p(fresh, 0);
      break;
    }
    case kServiceFree: {
      const MValue& arg = ms.reg(Reg::R1);
      if (!arg.is_ptr()) return std::nullopt;
      auto it = out.mem.find(arg.ptr.block);
      if (it == out.mem.end()) return std::nullopt;
      out.mem.erase(it);
      break;
    }
    case kServiceEq: {
      out.reg(Reg::R1) =
          MValue::w(ms.reg(Reg::R1) == ms.reg(Reg::R2) ? 1 : 0);
      break;
    }
    default:
      return std::nullopt;
  }
  out.pc = ms.reg(Reg::Ra);
  return out;
}

}  // namespace

std::optional<MachineState> step(const MachineState& ms) {
  if (ms.pc.is_word()) return do_service(ms, ms.pc.word);

  BlockId pb = ms.pc.ptr.block;
  Word po = ms.pc.ptr.offset;
  auto blk = ms.mem.find(pb);
  if (blk == ms.mem.end() || po >= blk->second.size()) return std::nullopt;
  const MValue& cell = blk->second[po];
  if (!cell.is_word()) return std::nullopt;
  std::optional<Instr> instr = decode(cell.word);
  if (!instr) return std::nullopt;

  MachineState out = ms;
  MValue next = MValue::p(pb, po + 1);
  switch (instr->op) {
    case Instr::Nop:
      out.pc = next;
      return out;
    case Instr::Const:
      out.reg(instr->rd) = MValue::w(instr->imm);
      out.pc = next;
      return out;
    case Instr::Mov:
      out.reg(instr->rd) = ms.reg(instr->r1);
      out.pc = next;
      return out;
    case Instr::Binop: {
      auto r = eval_machine_binop(instr->bop, ms.reg(instr->r1), ms.reg(instr->r2));
      if (!r) return std::nullopt;
      out.reg(instr->rd) = *r;
      out.pc = next;
      return out;
    }
    case Instr::Load: {
      const MValue& p = ms.reg(instr->r1);
      if (!p.is_ptr()) return std::nullopt;
      auto it = ms.mem.find(p.ptr.block);
      if (it == ms.mem.end() || p.ptr.offset >= it->second.size())
        return std::nullopt;
      out.reg(instr->rd) = it->second[p.ptr.offset];
      out.pc = next;
      return out;
    }
    case Instr::Store: {
      const MValue& p = ms.reg(instr->r1);
      if (!p.is_ptr()) return std::nullopt;
      auto it = out.mem.find(p.ptr.block);
      if (it == out.mem.end() || p.ptr.offset >= it->second.size())
        return std::nullopt;
      it->second[p.ptr.offset] = ms.reg(instr->r2);
      out.pc = next;
      return out;
    }
    case Instr::Jump:
      out.pc = ms.reg(instr->r1);
      return out;
    case Instr::Jal:
      out.reg(Reg::Ra) = next;
      out.pc = ms.reg(instr->r1);
      return out;
    case Instr::Bnz: {
      const MValue& c = ms.reg(instr->r1);
      if (!c.is_word()) return std::nullopt;
      Word delta = static_cast<Word>(
          static_cast<std::int64_t>(static_cast<std::int32_t>(instr->imm)));
      out.pc = c.word != 0 ? MValue::p(pb, po + delta) : next;
      return out;
    }
    case Instr::Halt:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<MachineState> run_steps(const MachineState& ms, std::uint64_t steps,
                                      std::uint64_t* taken) {
  MachineState cur = ms;
  for (std::uint64_t k = 0; k < steps; ++k) {
    std::optional<MachineState> next = step(cur);
    if (!next) {
      if (taken) *taken = k;
      return cur;
    }
    cur = std::move(*next);
  }
  if (taken) *taken = steps;
  return cur;
}

namespace {

void collect_value_ids(const MValue& v, std::set<BlockId>& out) {
  if (v.is_ptr()) out.insert(v.ptr.block);
}

MValue rename_mvalue(const Permutation& pi, const MValue& v) {
  if (!v.is_ptr()) return v;
  return MValue::p(pi.apply(v.ptr.block), v.ptr.offset);
}

}  // namespace

std::set<BlockId> ids_machine(const MachineState& ms) {
  std::set<BlockId> out;
  for (const auto& [id, cells] : ms.mem) {
    out.insert(id);
    for (const MValue& v : cells) collect_value_ids(v, out);
  }
  for (const MValue& v : ms.regs) collect_value_ids(v, out);
  collect_value_ids(ms.pc, out);
  return out;
}

MachineState rename_machine(const Permutation& pi, const MachineState& ms) {
  MachineState out;
  for (const auto& [id, cells] : ms.mem) {
    std::vector<MValue> renamed;
    renamed.reserve(cells.size());
    for (const MValue& v : cells) renamed.push_back(rename_mvalue(pi, v));
    out.mem[pi.apply(id)] = std::move(renamed);
  }
  for (std::size_t i = 0; i < kNumRegs; ++i)
    out.regs[i] = rename_mvalue(pi, ms.regs[i]);
  out.pc = rename_mvalue(pi, ms.pc);
  return out;
}

std::optional<Permutation> equiv_mod_perm_machine(const MachineState& a,
                                                  const MachineState& b) {
  std::set<BlockId> ia = ids_machine(a);
  std::set<BlockId> ib = ids_machine(b);
  if (ia.size() != ib.size()) return std::nullopt;
  if (ia == ib && a == b) return Permutation();
  if (ia.size() > 8) {
    // Beyond enumeration range; the checkers never build states this large.
    return std::nullopt;
  }
  std::vector<BlockId> from(ia.begin(), ia.end());
  std::vector<BlockId> to(ib.begin(), ib.end());
  std::sort(to.begin(), to.end());
  do {
    std::map<BlockId, BlockId> pairs;
    for (std::size_t i = 0; i < from.size(); ++i) pairs[from[i]] = to[i];
    std::optional<Permutation> pi = Permutation::from_pairs(pairs);
    if (pi && rename_machine(*pi, a) == b) return pi;
  } while (std::next_permutation(to.begin(), to.end()));
  return std::nullopt;
}

MachineState machine_union(const MachineState& ms,
                           const std::map<BlockId, std::vector<MValue>>& extra) {
  MachineState out = ms;
  for (const auto& [id, cells] : extra) out.mem.emplace(id, cells);
  return out;
}

namespace {

std::set<BlockId> mem_keys(const std::map<BlockId, std::vector<MValue>>& m) {
  std::set<BlockId> out;
  for (const auto& [id, cells] : m) out.insert(id);
  return out;
}

// Checks that every block of m2 sits verbatim inside t; on success strips
// them, leaving the remainder.
std::optional<MachineState> strip_frame(
    const MachineState& t, const std::map<BlockId, std::vector<MValue>>& m2) {
  MachineState rest = t;
  for (const auto& [id, cells] : m2) {
    auto it = rest.mem.find(id);
    if (it == rest.mem.end() || it->second != cells) return std::nullopt;
    rest.mem.erase(it);
  }
  return rest;
}

}  // namespace

CheckResult check_mp_frame_ok(const MachineState& ms1,
                              const std::map<BlockId, std::vector<MValue>>& m2) {
  if (!disjoint(ids_machine(ms1), mem_keys(m2)))
    return CheckResult::inapplicable("ids of base state meet frame blocks");
  std::optional<MachineState> s1p = step(ms1);
  if (!s1p) return CheckResult::inapplicable("base state is stuck");
  std::optional<MachineState> t = step(machine_union(ms1, m2));
  if (!t) return CheckResult::violation("extended state is stuck");
  std::optional<MachineState> rest = strip_frame(*t, m2);
  if (!rest) return CheckResult::violation("frame memory not preserved");
  if (!disjoint(ids_machine(*rest), mem_keys(m2)))
    return CheckResult::violation("remainder mentions frame blocks");
  if (!equiv_mod_perm_machine(*s1p, *rest))
    return CheckResult::violation("remainder differs beyond a renaming");
  return CheckResult::ok();
}

CheckResult check_mp_frame_error(const MachineState& ms1,
                                 const std::map<BlockId, std::vector<MValue>>& m2) {
  if (!disjoint(ids_machine(ms1), mem_keys(m2)))
    return CheckResult::inapplicable("ids of base state meet frame blocks");
  if (step(ms1)) return CheckResult::inapplicable("base state is not stuck");
  if (step(machine_union(ms1, m2)))
    return CheckResult::violation("extended state steps where base is stuck");
  return CheckResult::ok();
}

CheckResult check_mp_renaming(const Permutation& pi, const MachineState& ms) {
  std::optional<MachineState> direct = step(rename_machine(pi, ms));
  std::optional<MachineState> base = step(ms);
  if (!direct && !base) return CheckResult::ok();
  if (!direct || !base)
    return CheckResult::violation("stuckness differs under renaming");
  if (!equiv_mod_perm_machine(*direct, rename_machine(pi, *base)))
    return CheckResult::violation("results differ beyond a renaming");
  return CheckResult::ok();
}

CheckResult check_mp_noninterference(
    const MachineState& ms1, const std::map<BlockId, std::vector<MValue>>& m21,
    const std::map<BlockId, std::vector<MValue>>& m22) {
  if (!disjoint(ids_machine(ms1), mem_keys(m21)) ||
      !disjoint(ids_machine(ms1), mem_keys(m22)))
    return CheckResult::inapplicable("ids of base state meet extension blocks");
  std::optional<MachineState> t1 = step(machine_union(ms1, m21));
  std::optional<MachineState> t2 = step(machine_union(ms1, m22));
  if (!t1 && !t2) return CheckResult::ok();
  if (!t1 || !t2)
    return CheckResult::violation("stuckness differs across extensions");
  std::optional<MachineState> r1 = strip_frame(*t1, m21);
  std::optional<MachineState> r2 = strip_frame(*t2, m22);
  if (!r1 || !r2) return CheckResult::violation("extension memory not preserved");
  if (!equiv_mod_perm_machine(*r1, *r2))
    return CheckResult::violation("remainders differ beyond a renaming");
  return CheckResult::ok();
}

std::vector<Word> assemble(const std::string& text) {
  std::vector<Word> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream words(line);
    std::string mnemonic;
    if (!(words >> mnemonic)) continue;

    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(msg, lineno, 1);
    };
    auto reg_arg = [&]() -> Reg {
      std::string t;
      if (!(words >> t)) fail("missing register operand");
      std::optional<Reg> r = reg_from_name(t);
      if (!r) fail("unknown register '" + t + "'");
      return *r;
    };
    auto imm_arg = [&]() -> std::uint32_t {
      std::string t;
      if (!(words >> t)) fail("missing immediate operand");
      try {
        return static_cast<std::uint32_t>(
            static_cast<std::int32_t>(std::stoll(t)));
      } catch (const std::exception&) {
        fail("bad immediate '" + t + "'");
      }
      return 0;
    };

    Instr i;
    if (mnemonic == "nop") {
      i.op = Instr::Nop;
    } else if (mnemonic == "const") {
      i.op = Instr::Const;
      i.imm = imm_arg();
      i.rd = reg_arg();
    } else if (mnemonic == "mov") {
      i.op = Instr::Mov;
      i.r1 = reg_arg();
      i.rd = reg_arg();
    } else if (mnemonic == "binop") {
      i.op = Instr::Binop;
      std::string opname;
      if (!(words >> opname)) fail("missing binop operator");
      static const std::map<std::string, BinOp> ops = {
          {"add", BinOp::Add}, {"sub", BinOp::Sub}, {"mul", BinOp::Mul},
          {"eq", BinOp::Eq},   {"le", BinOp::Le},   {"and", BinOp::And},
          {"or", BinOp::Or}};
      auto it = ops.find(opname);
      if (it == ops.end()) fail("unknown binop '" + opname + "'");
      i.bop = it->second;
      i.r1 = reg_arg();
      i.r2 = reg_arg();
      i.rd = reg_arg();
    } else if (mnemonic == "load") {
      i.op = Instr::Load;
      i.r1 = reg_arg();
      i.rd = reg_arg();
    } else if (mnemonic == "store") {
      i.op = Instr::Store;
      i.r1 = reg_arg();
      i.r2 = reg_arg();
    } else if (mnemonic == "jump") {
      i.op = Instr::Jump;
      i.r1 = reg_arg();
    } else if (mnemonic == "jal") {
      i.op = Instr::Jal;
      i.r1 = reg_arg();
    } else if (mnemonic == "bnz") {
      i.op = Instr::Bnz;
      i.r1 = reg_arg();
      i.imm = imm_arg();
    } else if (mnemonic == "halt") {
      i.op = Instr::Halt;
    } else {
      fail("unknown mnemonic '" + mnemonic + "'");
    }
    std::string trailing;
    if (words >> trailing) fail("trailing operand '" + trailing + "'");
    out.push_back(encode(i));
  }
  return out;
}

}  // namespace memlab
