#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "memlab/ast.hpp"
#include "memlab/check_result.hpp"
#include "memlab/state.hpp"

namespace memlab {

// Machine words are 64-bit two's complement; arithmetic wraps.
using Word = std::uint64_t;

struct MPtr {
  BlockId block = 0;
  Word offset = 0;

  friend bool operator==(const MPtr&, const MPtr&) = default;
  friend auto operator<=>(const MPtr&, const MPtr&) = default;
};

// A machine value is a raw word or a block/offset pointer.
struct MValue {
  enum Kind { W, P } kind = W;
  Word word = 0;
  MPtr ptr;

  static MValue w(Word v) { return {W, v, {}}; }
  static MValue p(BlockId block, Word offset) { return {P, 0, {block, offset}}; }

  bool is_word() const { return kind == W; }
  bool is_ptr() const { return kind == P; }

  friend bool operator==(const MValue& a, const MValue& b) {
    if (a.kind != b.kind) return false;
    return a.kind == W ? a.word == b.word : a.ptr == b.ptr;
  }
  friend bool operator<(const MValue& a, const MValue& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.kind == W ? a.word < b.word : a.ptr < b.ptr;
  }
};

std::string show_mvalue(const MValue& v);

// Registers r0..r7 plus the link register ra.
enum class Reg : std::uint8_t {
  R0, R1, R2, R3, R4, R5, R6, R7, Ra
};
inline constexpr std::size_t kNumRegs = 9;

const char* reg_name(Reg r);
std::optional<Reg> reg_from_name(const std::string& name);

struct Instr {
  enum Op { Nop, Const, Mov, Binop, Load, Store, Jump, Jal, Bnz, Halt };

  Op op = Nop;
  BinOp bop = BinOp::Add;   // Binop only
  Reg r1 = Reg::R0;         // rs / rp / jump target / bnz condition
  Reg r2 = Reg::R0;         // second operand / store source
  Reg rd = Reg::R0;         // destination
  std::uint32_t imm = 0;    // Const word, Bnz offset (signed)

  friend bool operator==(const Instr&, const Instr&) = default;
};

// Word layout: opcode | r1<<4 | r2<<8 | rd<<12 | imm<<16, top 16 bits zero.
// Binop uses one opcode per operator. Any out-of-range field or nonzero
// padding makes decode fail.
Word encode(const Instr& i);
std::optional<Instr> decode(Word w);

struct MachineState {
  std::map<BlockId, std::vector<MValue>> mem;
  std::array<MValue, kNumRegs> regs{};
  MValue pc;

  MValue& reg(Reg r) { return regs[static_cast<std::size_t>(r)]; }
  const MValue& reg(Reg r) const { return regs[static_cast<std::size_t>(r)]; }

  friend bool operator==(const MachineState&, const MachineState&) = default;
};

// Service entry points: jumping to the plain word 0, 1 or 2 invokes the
// monitor. Arguments in r1 (and r2 for eq), result in r1, control returns to
// the address held in ra.
inline constexpr Word kServiceAlloc = 0;
inline constexpr Word kServiceFree = 1;
inline constexpr Word kServiceEq = 2;

// Allocation requests above this are refused (stuck); keeps a single step's
// footprint bounded.
inline constexpr Word kMaxAllocWords = 1 << 16;

// One deterministic step; nullopt means stuck. Stuck is the machine's only
// error signal; Halt decodes but never steps.
std::optional<MachineState> step(const MachineState& ms);

std::optional<MachineState> run_steps(const MachineState& ms, std::uint64_t steps,
                                      std::uint64_t* taken = nullptr);

std::set<BlockId> ids_machine(const MachineState& ms);
MachineState rename_machine(const Permutation& pi, const MachineState& ms);

// Finds pi with rename_machine(pi, a) == b by enumerating bijections between
// the two id sets; intended for the small states the checkers produce.
std::optional<Permutation> equiv_mod_perm_machine(const MachineState& a,
                                                  const MachineState& b);

// Attaches extra memory blocks to a machine state. The caller guarantees the
// ids are disjoint from ids_machine(ms).
MachineState machine_union(const MachineState& ms,
                           const std::map<BlockId, std::vector<MValue>>& extra);

// Single-step frame and renaming checks.
CheckResult check_mp_frame_ok(const MachineState& ms1,
                              const std::map<BlockId, std::vector<MValue>>& m2);
CheckResult check_mp_frame_error(const MachineState& ms1,
                                 const std::map<BlockId, std::vector<MValue>>& m2);
CheckResult check_mp_renaming(const Permutation& pi, const MachineState& ms);
CheckResult check_mp_noninterference(
    const MachineState& ms1, const std::map<BlockId, std::vector<MValue>>& m21,
    const std::map<BlockId, std::vector<MValue>>& m22);

// One instruction per line, '#' comments: e.g.
//   const 5 r0
//   binop add r0 r1 r2
//   bnz r2 -2
//   halt
std::vector<Word> assemble(const std::string& text);

}  // namespace memlab
