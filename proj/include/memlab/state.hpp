#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>

#include "memlab/value.hpp"

namespace memlab {

struct HeapKey {
  BlockId block = 0;
  Int offset;

  friend bool operator==(const HeapKey& a, const HeapKey& b) {
    return a.block == b.block && a.offset == b.offset;
  }
  friend bool operator<(const HeapKey& a, const HeapKey& b) {
    if (a.block != b.block) return a.block < b.block;
    return a.offset < b.offset;
  }
};

// A program state: finite local store plus finite heap. Dangling pointers are
// ordinary values; nothing ties a pointer to a live block.
struct State {
  std::map<Var, Value> store;
  std::map<HeapKey, Value> heap;

  friend bool operator==(const State& a, const State& b) {
    return a.store == b.store && a.heap == b.heap;
  }
  friend bool operator!=(const State& a, const State& b) { return !(a == b); }
};

std::string show_state(const State& s);

// Identifiers of live blocks: those with at least one defined heap cell.
std::set<BlockId> blocks(const State& s);

// All identifiers in the state: live blocks plus every id mentioned by a
// pointer value in the store or the heap.
std::set<BlockId> ids(const State& s);

std::set<BlockId> value_ids(const Value& v);

// Left-biased union: where both sides are defined, the left one wins.
State state_union(const State& a, const State& b);

// Smallest identifier fresh for X under the deterministic convention
// 1 + max(X), with max of the empty set taken to be 0.
BlockId fresh_id(const std::set<BlockId>& used);

// A bijection on identifiers with finite support.
class Permutation {
 public:
  Permutation() = default;

  // Builds a permutation from an injective partial map by completing the
  // leftover support elements in sorted order. Returns nullopt if the map is
  // not injective.
  static std::optional<Permutation> from_pairs(
      const std::map<BlockId, BlockId>& pairs);

  static Permutation swap(BlockId a, BlockId b);

  BlockId apply(BlockId i) const;
  BlockId apply_inverse(BlockId i) const;
  Permutation inverse() const;

  bool is_identity() const { return fwd_.empty(); }
  const std::map<BlockId, BlockId>& forward() const { return fwd_; }

 private:
  // Invariant: fwd_ and inv_ are mutually inverse and share their support;
  // entries mapping an id to itself are never stored.
  std::map<BlockId, BlockId> fwd_;
  std::map<BlockId, BlockId> inv_;
};

Value rename_value(const Permutation& pi, const Value& v);
State rename_state(const Permutation& pi, const State& s);

// Finds a permutation pi with rename_state(pi, s) == t, if one exists. The
// support of the result lies within ids(s) union ids(t).
std::optional<Permutation> equiv_mod_perm(const State& s, const State& t);

// Splits s into the part reachable from the given root variables (store
// entries plus transitively reachable heap blocks) and the unreachable rest
// (heap only, empty store). Guarantees ids(reach) # blocks(unreach) and that
// the two heaps partition s.heap.
std::pair<State, State> split_unreachable(const State& s,
                                          const std::set<Var>& roots);

bool disjoint(const std::set<BlockId>& a, const std::set<BlockId>& b);

}  // namespace memlab
