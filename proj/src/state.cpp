#include "memlab/state.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <vector>

namespace memlab {

std::string show_value(const Value& v) {
  std::ostringstream os;
  if (v.is_int()) {
    os << v.int_val();
  } else if (v.is_bool()) {
    os << (v.bool_val() ? "true" : "false");
  } else if (v.is_nil()) {
    os << "nil";
  } else {
    os << "ptr(" << v.ptr_val().block << ", " << v.ptr_val().offset << ")";
  }
  return os.str();
}

std::string show_state(const State& s) {
  std::ostringstream os;
  os << "store{";
  bool first = true;
  for (const auto& [x, v] : s.store) {
    if (!first) os << ", ";
    first = false;
    os << x << ": " << show_value(v);
  }
  os << "} heap{";
  first = true;
  for (const auto& [k, v] : s.heap) {
    if (!first) os << ", ";
    first = false;
    os << "(" << k.block << "," << k.offset << "): " << show_value(v);
  }
  os << "}";
  return os.str();
}

std::set<BlockId> blocks(const State& s) {
  std::set<BlockId> out;
  for (const auto& [key, value] : s.heap) out.insert(key.block);
  return out;
}

std::set<BlockId> value_ids(const Value& v) {
  std::set<BlockId> out;
  if (v.is_ptr()) out.insert(v.ptr_val().block);
  return out;
}

std::set<BlockId> ids(const State& s) {
  std::set<BlockId> out = blocks(s);
  for (const auto& [x, v] : s.store)
    if (v.is_ptr()) out.insert(v.ptr_val().block);
  for (const auto& [key, v] : s.heap)
    if (v.is_ptr()) out.insert(v.ptr_val().block);
  return out;
}

State state_union(const State& a, const State& b) {
  State out = a;
  for (const auto& [x, v] : b.store) out.store.emplace(x, v);
  for (const auto& [k, v] : b.heap) out.heap.emplace(k, v);
  return out;
}

BlockId fresh_id(const std::set<BlockId>& used) {
  if (used.empty()) return 1;
  return *used.rbegin() + 1;
}

std::optional<Permutation> Permutation::from_pairs(
    const std::map<BlockId, BlockId>& pairs) {
  std::set<BlockId> domain, range;
  for (const auto& [a, b] : pairs) {
    domain.insert(a);
    if (!range.insert(b).second) return std::nullopt;
  }
  std::set<BlockId> support;
  support.insert(domain.begin(), domain.end());
  support.insert(range.begin(), range.end());

  std::vector<BlockId> free_dom, free_ran;
  for (BlockId i : support) {
    if (!domain.count(i)) free_dom.push_back(i);
    if (!range.count(i)) free_ran.push_back(i);
  }

  Permutation pi;
  auto add = [&pi](BlockId a, BlockId b) {
    if (a == b) return;
    pi.fwd_[a] = b;
    pi.inv_[b] = a;
  };
  for (const auto& [a, b] : pairs) add(a, b);
  for (std::size_t k = 0; k < free_dom.size(); ++k) add(free_dom[k], free_ran[k]);
  return pi;
}

Permutation Permutation::swap(BlockId a, BlockId b) {
  Permutation pi;
  if (a != b) {
    pi.fwd_[a] = b;
    pi.fwd_[b] = a;
    pi.inv_ = pi.fwd_;
  }
  return pi;
}

BlockId Permutation::apply(BlockId i) const {
  auto it = fwd_.find(i);
  return it == fwd_.end() ? i : it->second;
}

BlockId Permutation::apply_inverse(BlockId i) const {
  auto it = inv_.find(i);
  return it == inv_.end() ? i : it->second;
}

Permutation Permutation::inverse() const {
  Permutation pi;
  pi.fwd_ = inv_;
  pi.inv_ = fwd_;
  return pi;
}

Value rename_value(const Permutation& pi, const Value& v) {
  if (!v.is_ptr()) return v;
  return Value::pointer(pi.apply(v.ptr_val().block), v.ptr_val().offset);
}

State rename_state(const Permutation& pi, const State& s) {
  State out;
  for (const auto& [x, v] : s.store) out.store.emplace(x, rename_value(pi, v));
  for (const auto& [k, v] : s.heap)
    out.heap.emplace(HeapKey{pi.apply(k.block), k.offset}, rename_value(pi, v));
  return out;
}

bool disjoint(const std::set<BlockId>& a, const std::set<BlockId>& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib)
      ++ia;
    else if (*ib < *ia)
      ++ib;
    else
      return false;
  }
  return true;
}

namespace {

// Search state for equiv_mod_perm: a partial injective id map grown by
// unification, with a worklist of block pairs whose cells still need
// matching.
struct Matcher {
  const State& s;
  const State& t;
  std::set<BlockId> s_blocks;
  std::set<BlockId> t_blocks;
  // Cells grouped per block, offsets sorted by the map order.
  std::map<BlockId, std::vector<std::pair<Int, Value>>> s_cells;
  std::map<BlockId, std::vector<std::pair<Int, Value>>> t_cells;

  Matcher(const State& s_, const State& t_) : s(s_), t(t_) {
    s_blocks = blocks(s);
    t_blocks = blocks(t);
    for (const auto& [k, v] : s.heap) s_cells[k.block].emplace_back(k.offset, v);
    for (const auto& [k, v] : t.heap) t_cells[k.block].emplace_back(k.offset, v);
  }

  struct Env {
    std::map<BlockId, BlockId> fwd;
    std::map<BlockId, BlockId> rev;
    std::deque<std::pair<BlockId, BlockId>> worklist;
  };

  bool force(Env& env, BlockId a, BlockId b) {
    auto it = env.fwd.find(a);
    if (it != env.fwd.end()) return it->second == b;
    auto jt = env.rev.find(b);
    if (jt != env.rev.end()) return false;
    // A live block may only map to a live block of the same shape.
    bool a_live = s_blocks.count(a) != 0;
    bool b_live = t_blocks.count(b) != 0;
    if (a_live != b_live) return false;
    env.fwd[a] = b;
    env.rev[b] = a;
    if (a_live) env.worklist.emplace_back(a, b);
    return true;
  }

  bool unify(Env& env, const Value& v, const Value& w) {
    if (v.is_ptr() != w.is_ptr()) return false;
    if (!v.is_ptr()) return v == w;
    if (v.ptr_val().offset != w.ptr_val().offset) return false;
    return force(env, v.ptr_val().block, w.ptr_val().block);
  }

  bool propagate(Env& env) {
    while (!env.worklist.empty()) {
      auto [a, b] = env.worklist.front();
      env.worklist.pop_front();
      const auto& ca = s_cells.at(a);
      const auto& cb = t_cells.at(b);
      if (ca.size() != cb.size()) return false;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        if (ca[k].first != cb[k].first) return false;
        if (!unify(env, ca[k].second, cb[k].second)) return false;
      }
    }
    return true;
  }

  bool search(Env env, std::optional<Permutation>* out) {
    if (!propagate(env)) return false;
    // Pick the smallest unmatched live block of s and try candidates.
    std::optional<BlockId> next;
    for (BlockId a : s_blocks)
      if (!env.fwd.count(a)) {
        next = a;
        break;
      }
    if (!next) {
      // Every live s-block matched; all live t-blocks must be covered too.
      for (BlockId b : t_blocks)
        if (!env.rev.count(b)) return false;
      auto pi = Permutation::from_pairs(env.fwd);
      if (!pi) return false;
      if (rename_state(*pi, s) != t) return false;
      *out = *pi;
      return true;
    }
    for (BlockId b : t_blocks) {
      if (env.rev.count(b)) continue;
      Env branch = env;
      if (!force(branch, *next, b)) continue;
      if (search(std::move(branch), out)) return true;
    }
    return false;
  }
};

}  // namespace

std::optional<Permutation> equiv_mod_perm(const State& s, const State& t) {
  if (s.store.size() != t.store.size() || s.heap.size() != t.heap.size())
    return std::nullopt;
  Matcher m(s, t);
  if (m.s_blocks.size() != m.t_blocks.size()) return std::nullopt;

  Matcher::Env env;
  auto it = s.store.begin();
  auto jt = t.store.begin();
  for (; it != s.store.end(); ++it, ++jt) {
    if (it->first != jt->first) return std::nullopt;
    if (!m.unify(env, it->second, jt->second)) return std::nullopt;
  }
  std::optional<Permutation> result;
  if (!m.search(std::move(env), &result)) return std::nullopt;
  return result;
}

std::pair<State, State> split_unreachable(const State& s,
                                          const std::set<Var>& roots) {
  std::map<BlockId, std::vector<const Value*>> cells_by_block;
  for (const auto& [k, v] : s.heap) cells_by_block[k.block].push_back(&v);

  std::set<BlockId> reach_blocks;
  std::deque<BlockId> frontier;
  auto visit = [&](const Value& v) {
    if (v.is_ptr() && cells_by_block.count(v.ptr_val().block) &&
        reach_blocks.insert(v.ptr_val().block).second)
      frontier.push_back(v.ptr_val().block);
  };
  for (const Var& x : roots) {
    auto it = s.store.find(x);
    if (it != s.store.end()) visit(it->second);
  }
  while (!frontier.empty()) {
    BlockId b = frontier.front();
    frontier.pop_front();
    for (const Value* v : cells_by_block.at(b)) visit(*v);
  }

  State reach, unreach;
  for (const Var& x : roots) {
    auto it = s.store.find(x);
    if (it != s.store.end()) reach.store.insert(*it);
  }
  for (const auto& [k, v] : s.heap) {
    if (reach_blocks.count(k.block))
      reach.heap.emplace(k, v);
    else
      unreach.heap.emplace(k, v);
  }
  return {reach, unreach};
}

}  // namespace memlab
