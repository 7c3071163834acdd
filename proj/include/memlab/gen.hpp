#pragma once

#include <cstdint>
#include <vector>

#include "memlab/ast.hpp"
#include "memlab/machine.hpp"
#include "memlab/semantics.hpp"
#include "memlab/state.hpp"

namespace memlab {

// Deterministic 64-bit generator (splitmix64). Not std::mt19937 with
// std::uniform_int_distribution because distribution output is
// implementation-defined and seeds must replay identically everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be nonzero. Modulo bias is negligible for the
  // small ranges used here.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool one_in(std::uint64_t n) { return below(n) == 0; }

  // Derives an independent stream; used to give each trial its own seed.
  Rng fork() { return Rng(next()); }

 private:
  std::uint64_t state_;
};

struct GenParams {
  int max_depth = 5;
  std::size_t max_blocks = 6;
  std::size_t max_block_size = 4;
  std::vector<Var> pool = {"a", "b", "c", "x", "y", "z"};
  std::uint64_t seed = 0;
  Fuel fuel = 256;
  std::uint64_t trials = 1000;
  // Gated expressions (cast/forge) only appear when enabled.
  bool gen_casts = false;
  bool gen_forge = false;
};

Var gen_var(Rng& rng, const GenParams& p);

// A value whose pointer ids (if any) are drawn from the candidate set; nil
// candidates means no pointers are generated.
Value gen_value(Rng& rng, const GenParams& p, const std::vector<BlockId>& candidates);

// Binds the whole variable pool and builds up to max_blocks blocks; pointer
// values may dangle (ids beyond the live blocks are candidates too).
State gen_state(Rng& rng, const GenParams& p);

ExprPtr gen_expr(Rng& rng, const GenParams& p, int depth);
CmdPtr gen_command(Rng& rng, const GenParams& p);

// A random permutation whose support is a subset of the given ids plus a few
// ids just above them (so renamings can move ids out of the state).
Permutation gen_permutation(Rng& rng, const std::set<BlockId>& over);

// Machine-side generation: a state whose pc points into a code block filled
// with valid encoded instructions, plus a couple of data blocks.
MachineState gen_machine_state(Rng& rng, const GenParams& p);

// Extra memory with ids disjoint from `avoid`, for frame experiments.
std::map<BlockId, std::vector<MValue>> gen_machine_mem(
    Rng& rng, const GenParams& p, const std::set<BlockId>& avoid);

}  // namespace memlab
