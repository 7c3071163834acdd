#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "memlab/ast.hpp"
#include "memlab/semantics.hpp"
#include "memlab/state.hpp"

namespace memlab {

// How allocation picks identifiers.
struct FreshnessMode {
  enum Kind { FreshAll, FreshBlocksOnly, ModK } kind = FreshAll;
  std::uint64_t k = 0;  // ModK only; must be >= 1

  friend bool operator==(const FreshnessMode&, const FreshnessMode&) = default;
};

enum class OomMode { HaltError, ReturnNil };
enum class PtrEqMode { Structural, PhysicalAddress };

struct SafetyConfig {
  bool casts = false;
  bool forging = false;
  bool uninit_memory = false;
  FreshnessMode freshness;
  std::optional<std::uint64_t> memory_limit;  // total live cells
  OomMode oom_mode = OomMode::HaltError;
  PtrEqMode pointer_eq = PtrEqMode::Structural;

  static SafetyConfig strict() { return SafetyConfig{}; }
  bool is_strict() const { return *this == strict(); }

  friend bool operator==(const SafetyConfig&, const SafetyConfig&) = default;
};

// Deterministic physical layout backing cast() and physical-address pointer
// equality: a word-granularity bump allocator with optional first-fit reuse
// of freed ranges. Bases survive free so dangling casts still resolve.
struct Layout {
  std::map<BlockId, std::uint64_t> base;
  std::uint64_t next_free = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> free_list;  // addr,size
  std::uint64_t alloc_counter = 0;  // drives ModK class selection

  // Assigns a base for a new block; reuse draws from the free list first.
  std::uint64_t assign(BlockId id, std::uint64_t extent, bool reuse);
  void release(BlockId id, std::uint64_t extent);
  std::optional<std::uint64_t> address_of(const Ptr& p) const;
};

// Recycled contents of freed cells, most recently freed block first;
// allocations consume from the front.
struct JunkPool {
  std::deque<Value> recycled;
};

// Per-run mutable context owned by a single evaluation.
struct RunContext {
  Layout layout;
  JunkPool pool;
};

// Seeds the layout with bases for every block live in the initial state, in
// ascending id order.
RunContext make_run_context(const State& initial);

std::uint64_t block_extent(const State& s, BlockId id);

Value cast_value(const Value& p, const Layout& layout);
Value forge_value(const Value& block, const Value& offset);
Value pointer_equal(const Value& a, const Value& b, const SafetyConfig& cfg,
                    const Layout& layout);

struct AllocOutcome {
  enum Kind { Ok, OomError, OomNil } kind = Ok;
  State state;
  BlockId id = 0;
};

AllocOutcome alloc_relaxed(const State& s, const Int& size, const SafetyConfig& cfg,
                           RunContext& ctx);

namespace relaxed {

Value eval_expr(const Expr& e, const State& s, const SafetyConfig& cfg,
                const Layout& layout);

// Called after each executed atomic command with a /-separated path into the
// command tree and the running outcome kind.
using TraceFn = std::function<void(const std::string& path, OutcomeKind kind)>;

OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel,
                          const SafetyConfig& cfg, RunContext& ctx,
                          const TraceFn* trace = nullptr);

// Convenience entry that builds the run context itself.
OutcomePlus eval_cmd_plus(const Command& c, const State& s, Fuel fuel,
                          const SafetyConfig& cfg);

Outcome eval_cmd(const Command& c, const State& s, Fuel fuel,
                 const SafetyConfig& cfg);

}  // namespace relaxed
}  // namespace memlab
