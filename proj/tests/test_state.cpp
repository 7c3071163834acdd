#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "memlab/gen.hpp"
#include "memlab/state.hpp"

using namespace memlab;

namespace {

State make_state(std::initializer_list<std::pair<Var, Value>> store,
                 std::initializer_list<std::pair<std::pair<BlockId, long>, Value>> heap) {
  State s;
  for (const auto& [x, v] : store) s.store[x] = v;
  for (const auto& [k, v] : heap) s.heap[HeapKey{k.first, Int(k.second)}] = v;
  return s;
}

// Independent oracle: a renaming taking s to t must map ids(s) onto ids(t)
// bijectively, so enumerating all bijections between the two id sets is a
// complete decision procedure.
bool oracle_equiv(const State& s, const State& t) {
  std::set<BlockId> sids = ids(s), tids = ids(t);
  std::vector<BlockId> from(sids.begin(), sids.end());
  std::vector<BlockId> to(tids.begin(), tids.end());
  if (from.size() != to.size()) return false;
  if (from.empty()) return s == t;
  std::sort(to.begin(), to.end());
  do {
    std::map<BlockId, BlockId> pairs;
    for (std::size_t i = 0; i < from.size(); ++i) pairs[from[i]] = to[i];
    std::optional<Permutation> pi = Permutation::from_pairs(pairs);
    if (pi && rename_state(*pi, s) == t) return true;
  } while (std::next_permutation(to.begin(), to.end()));
  return false;
}

}  // namespace

TEST_CASE("blocks vs ids") {
  State s = make_state({{"x", Value::pointer(7, Int(0))}},
                       {{{2, 0}, Value::integer(1)},
                        {{2, 1}, Value::pointer(9, Int(3))}});
  CHECK(blocks(s) == std::set<BlockId>{2});
  CHECK(ids(s) == std::set<BlockId>{2, 7, 9});
  CHECK(value_ids(Value::pointer(4, Int(1))) == std::set<BlockId>{4});
  CHECK(value_ids(Value::integer(4)).empty());
}

TEST_CASE("fresh_id convention") {
  CHECK(fresh_id({}) == 1);
  CHECK(fresh_id({1}) == 2);
  CHECK(fresh_id({3, 17}) == 18);
}

TEST_CASE("state_union is left biased") {
  State a = make_state({{"x", Value::integer(1)}}, {{{1, 0}, Value::integer(10)}});
  State b = make_state({{"x", Value::integer(2)}, {"y", Value::integer(3)}},
                       {{{1, 0}, Value::integer(20)}, {{2, 0}, Value::integer(30)}});
  State u = state_union(a, b);
  CHECK(u.store.at("x") == Value::integer(1));
  CHECK(u.store.at("y") == Value::integer(3));
  CHECK(u.heap.at(HeapKey{1, Int(0)}) == Value::integer(10));
  CHECK(u.heap.at(HeapKey{2, Int(0)}) == Value::integer(30));
}

TEST_CASE("permutation from_pairs completes partial injections") {
  auto pi = Permutation::from_pairs({{1, 2}});
  REQUIRE(pi.has_value());
  CHECK(pi->apply(1) == 2);
  // The leftover support element 2 must map back onto the leftover target 1.
  CHECK(pi->apply(2) == 1);
  CHECK(pi->apply(5) == 5);

  CHECK(!Permutation::from_pairs({{1, 3}, {2, 3}}).has_value());

  auto ident = Permutation::from_pairs({{4, 4}});
  REQUIRE(ident.has_value());
  CHECK(ident->is_identity());
}

TEST_CASE("permutation swap and inverse") {
  Permutation pi = Permutation::swap(3, 8);
  CHECK(pi.apply(3) == 8);
  CHECK(pi.apply(8) == 3);
  CHECK(pi.apply(1) == 1);
  CHECK(Permutation::swap(5, 5).is_identity());

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    Permutation p = gen_permutation(rng, {1, 2, 3, 4});
    for (BlockId id = 0; id < 10; ++id) {
      CHECK(p.apply_inverse(p.apply(id)) == id);
      CHECK(p.inverse().apply(p.apply(id)) == id);
    }
  }
}

TEST_CASE("rename_state round trips through the inverse") {
  Rng rng(22);
  GenParams gp;
  for (int i = 0; i < 200; ++i) {
    State s = gen_state(rng, gp);
    Permutation pi = gen_permutation(rng, ids(s));
    CHECK(rename_state(pi.inverse(), rename_state(pi, s)) == s);
  }
}

TEST_CASE("equiv_mod_perm concrete cases") {
  State s = make_state({{"x", Value::pointer(1, Int(0))}},
                       {{{1, 0}, Value::integer(5)}});
  State t = make_state({{"x", Value::pointer(3, Int(0))}},
                       {{{3, 0}, Value::integer(5)}});
  auto pi = equiv_mod_perm(s, t);
  REQUIRE(pi.has_value());
  CHECK(rename_state(*pi, s) == t);

  // Same shape but different cell contents: no renaming can help.
  State u = make_state({{"x", Value::pointer(3, Int(0))}},
                       {{{3, 0}, Value::integer(6)}});
  CHECK(!equiv_mod_perm(s, u).has_value());

  // Offsets are not renamed.
  State v = make_state({{"x", Value::pointer(3, Int(1))}},
                       {{{3, 1}, Value::integer(5)}});
  CHECK(!equiv_mod_perm(s, v).has_value());

  CHECK(equiv_mod_perm(State{}, State{}).has_value());
}

TEST_CASE("equiv_mod_perm distinguishes linked shapes") {
  // Two two-block cycles against a cycle plus a self-loop.
  State cyc = make_state({{"x", Value::pointer(1, Int(0))}},
                         {{{1, 0}, Value::pointer(2, Int(0))},
                          {{2, 0}, Value::pointer(1, Int(0))}});
  State selfies = make_state({{"x", Value::pointer(1, Int(0))}},
                             {{{1, 0}, Value::pointer(1, Int(0))},
                              {{2, 0}, Value::pointer(2, Int(0))}});
  CHECK(!equiv_mod_perm(cyc, selfies).has_value());

  State cyc2 = make_state({{"x", Value::pointer(9, Int(0))}},
                          {{{4, 0}, Value::pointer(9, Int(0))},
                           {{9, 0}, Value::pointer(4, Int(0))}});
  auto pi = equiv_mod_perm(cyc, cyc2);
  REQUIRE(pi.has_value());
  CHECK(rename_state(*pi, cyc) == cyc2);
}

TEST_CASE("equiv_mod_perm agrees with the bijection oracle") {
  Rng rng(33);
  GenParams gp;
  gp.max_blocks = 2;
  gp.max_block_size = 2;
  int done = 0;
  while (done < 400) {
    State s = gen_state(rng, gp);
    State t;
    switch (rng.below(3)) {
      case 0: t = rename_state(gen_permutation(rng, ids(s)), s); break;
      case 1: t = gen_state(rng, gp); break;
      default: {
        t = rename_state(gen_permutation(rng, ids(s)), s);
        if (!t.heap.empty()) {
          auto it = t.heap.begin();
          std::advance(it, rng.below(t.heap.size()));
          it->second = gen_value(rng, gp, {});
        }
        break;
      }
    }
    if (ids(s).size() > 5 || ids(t).size() > 5) continue;
    ++done;
    auto pi = equiv_mod_perm(s, t);
    CHECK(pi.has_value() == oracle_equiv(s, t));
    if (pi) CHECK(rename_state(*pi, s) == t);
  }
}

TEST_CASE("split_unreachable partitions and isolates") {
  Rng rng(44);
  GenParams gp;
  for (int i = 0; i < 300; ++i) {
    State s = gen_state(rng, gp);
    std::set<Var> roots;
    for (const auto& [x, v] : s.store) roots.insert(x);
    auto [reach, unreach] = split_unreachable(s, roots);
    CHECK(reach.store == s.store);
    CHECK(unreach.store.empty());
    CHECK(disjoint(ids(reach), blocks(unreach)));
    State merged;
    merged.store = reach.store;
    merged.heap = reach.heap;
    for (const auto& [k, v] : unreach.heap) {
      CHECK(!merged.heap.count(k));
      merged.heap[k] = v;
    }
    CHECK(merged == s);
  }
}

TEST_CASE("split_unreachable follows heap links") {
  // x -> 1 -> 2, block 3 unreachable.
  State s = make_state({{"x", Value::pointer(1, Int(0))}},
                       {{{1, 0}, Value::pointer(2, Int(0))},
                        {{2, 0}, Value::integer(0)},
                        {{3, 0}, Value::integer(0)}});
  auto [reach, unreach] = split_unreachable(s, {"x"});
  CHECK(blocks(reach) == std::set<BlockId>{1, 2});
  CHECK(blocks(unreach) == std::set<BlockId>{3});
}

TEST_CASE("disjoint") {
  CHECK(disjoint({1, 2}, {3, 4}));
  CHECK(!disjoint({1, 2}, {2, 3}));
  CHECK(disjoint({}, {1}));
}
