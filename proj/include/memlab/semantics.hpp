#pragma once

#include <cstdint>
#include <set>

#include "memlab/ast.hpp"
#include "memlab/state.hpp"

namespace memlab {

using Fuel = std::uint64_t;

// Implementation limit on a single allocation. The language itself puts no
// bound on block sizes, but the heap is materialized cell by cell, so a
// loop-grown size request would exhaust host memory; oversized requests fail
// like any other bad alloc argument. Both interpreters share the limit.
inline constexpr std::uint64_t kMaxAllocCells = 4096;

enum class OutcomeKind { Done, Error, OutOfFuel };

// Outcome of command evaluation together with the set of identifiers
// allocated during the run. OutOfFuel is the executable stand-in for
// nontermination.
struct OutcomePlus {
  OutcomeKind kind = OutcomeKind::Error;
  std::set<BlockId> allocated;
  State state;

  static OutcomePlus done(std::set<BlockId> allocated, State s) {
    return {OutcomeKind::Done, std::move(allocated), std::move(s)};
  }
  static OutcomePlus error() { return {OutcomeKind::Error, {}, {}}; }
  static OutcomePlus out_of_fuel() { return {OutcomeKind::OutOfFuel, {}, {}}; }

  friend bool operator==(const OutcomePlus& a, const OutcomePlus& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != OutcomeKind::Done) return true;
    return a.allocated == b.allocated && a.state == b.state;
  }
};

struct Outcome {
  OutcomeKind kind = OutcomeKind::Error;
  State state;

  friend bool operator==(const Outcome& a, const Outcome& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != OutcomeKind::Done) return true;
    return a.state == b.state;
  }
};

namespace strict {

// Total expression evaluation under the strict semantics. Unbound variables
// read as nil; ill-typed combinations sink to nil; cast/forge are disabled
// here and also yield nil.
Value eval_expr(const Expr& e, const State& s);

// Fuel counts while-loop unfoldings only; everything else is free. A single
// budget is threaded through the whole run.
OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel);

Outcome eval_cmd(const Command& c, const State& s, Fuel fuel);

// Identifiers of the final state minus those allocated during the run;
// empty on error or fuel exhaustion.
std::set<BlockId> finalids(const Command& c, const State& s, Fuel fuel);

}  // namespace strict
}  // namespace memlab
