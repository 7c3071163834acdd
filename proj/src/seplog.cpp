#include "memlab/seplog.hpp"

#include <algorithm>

#include "memlab/parser.hpp"
#include "src/lex.hpp"

namespace memlab {

AssertPtr emp_a() { return std::make_shared<Assertion>(Assertion{EmpA{}}); }
AssertPtr top_a() { return std::make_shared<Assertion>(Assertion{TopA{}}); }
AssertPtr var_eq_a(Var name, Value value) {
  return std::make_shared<Assertion>(Assertion{VarEqA{std::move(name), std::move(value)}});
}
AssertPtr points_to_a(ExprPtr addr, ExprPtr value) {
  return std::make_shared<Assertion>(Assertion{PointsToA{std::move(addr), std::move(value)}});
}
AssertPtr star_a(AssertPtr lhs, AssertPtr rhs) {
  return std::make_shared<Assertion>(Assertion{StarA{std::move(lhs), std::move(rhs)}});
}
AssertPtr iso_star_a(AssertPtr lhs, AssertPtr rhs) {
  return std::make_shared<Assertion>(Assertion{IsoStarA{std::move(lhs), std::move(rhs)}});
}
AssertPtr and_a(AssertPtr lhs, AssertPtr rhs) {
  return std::make_shared<Assertion>(Assertion{AndA{std::move(lhs), std::move(rhs)}});
}

namespace {

// Splits are block-granular: every heap cell of one block travels with its
// block. A split is a bitmask over the live blocks, and satisfaction is
// memoized per (assertion node, mask), so nested stars cost one submask
// enumeration each instead of exponentially recomputed state copies.
class HoldsEval {
 public:
  explicit HoldsEval(const State& s) : s_(s) {
    std::set<BlockId> bset = blocks(s);
    bs_.assign(bset.begin(), bset.end());
    if (!ok()) return;
    cells_.assign(bs_.size(), 0);
    mention_.assign(bs_.size(), 0);
    for (const auto& [k, v] : s.heap) {
      std::size_t i = index(k.block);
      ++cells_[i];
      for (BlockId id : value_ids(v)) mention_[i] |= bit(id);
    }
    for (const auto& [x, v] : s.store)
      for (BlockId id : value_ids(v)) store_mention_ |= bit(id);
  }

  // Far beyond anything generated; callers treat oversized states as
  // unsatisfiable rather than enumerating 2^n splits.
  bool ok() const { return bs_.size() <= 14; }

  std::uint32_t full() const { return (std::uint32_t(1) << bs_.size()) - 1; }

  bool sat(const Assertion& a, std::uint32_t mask) {
    auto [it, fresh] = memo_.try_emplace(&a);
    std::vector<signed char>& row = it->second;
    if (fresh) row.assign(std::size_t(1) << bs_.size(), -1);
    if (row[mask] >= 0) return row[mask] != 0;
    bool r = eval(a, mask);
    row[mask] = r ? 1 : 0;
    return r;
  }

 private:
  bool eval(const Assertion& a, std::uint32_t mask) {
    return std::visit(
        [&](const auto& node) -> bool {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, EmpA>) {
            return mask == 0;
          } else if constexpr (std::is_same_v<T, TopA>) {
            return true;
          } else if constexpr (std::is_same_v<T, VarEqA>) {
            auto it = s_.store.find(node.name);
            Value v = it == s_.store.end() ? Value::nil() : it->second;
            return v == node.value;
          } else if constexpr (std::is_same_v<T, PointsToA>) {
            // Expressions never read the heap, so evaluating against the
            // whole state is evaluating against the split part.
            Value addr = strict::eval_expr(*node.addr, s_);
            if (!addr.is_ptr()) return false;
            std::uint32_t b = bit(addr.ptr_val().block);
            if (b == 0 || mask != b) return false;
            if (cells_[index(addr.ptr_val().block)] != 1) return false;
            auto it = s_.heap.find(
                HeapKey{addr.ptr_val().block, addr.ptr_val().offset});
            return it != s_.heap.end() &&
                   it->second == strict::eval_expr(*node.value, s_);
          } else if constexpr (std::is_same_v<T, StarA> ||
                               std::is_same_v<T, IsoStarA>) {
            constexpr bool iso = std::is_same_v<T, IsoStarA>;
            auto try_split = [&](std::uint32_t sub) {
              return (!iso || iso_fits(sub, mask)) && sat(*node.lhs, sub) &&
                     sat(*node.rhs, mask & ~sub);
            };
            // When one side can only occupy a handful of masks, enumerate
            // those instead of every submask.
            const auto& cl = candidates(*node.lhs);
            const auto& cr = candidates(*node.rhs);
            if (cl) {
              for (std::uint32_t ml : *cl)
                if ((ml & mask) == ml && try_split(ml)) return true;
              return false;
            }
            if (cr) {
              for (std::uint32_t mr : *cr)
                if ((mr & mask) == mr && try_split(mask & ~mr)) return true;
              return false;
            }
            for (std::uint32_t sub = mask;;) {
              if (try_split(sub)) return true;
              if (sub == 0) return false;
              sub = (sub - 1) & mask;
            }
          } else if constexpr (std::is_same_v<T, AndA>) {
            return sat(*node.lhs, mask) && sat(*node.rhs, mask);
          }
        },
        a.node);
  }

  // The left part's ids (its blocks, everything its cells mention, and
  // everything the store mentions) must miss the right part's blocks.
  bool iso_fits(std::uint32_t sub, std::uint32_t mask) const {
    std::uint32_t left_ids = sub | store_mention_;
    for (std::size_t i = 0; i < bs_.size(); ++i)
      if ((sub >> i) & 1) left_ids |= mention_[i];
    return ((mask & ~sub) & left_ids) == 0;
  }

  // Overapproximated mask sets for assertions that pin down their part:
  // emp only ever holds on the empty part and a points-to only on its
  // addressed block. nullopt means unconstrained. sat() still verifies.
  const std::optional<std::vector<std::uint32_t>>& candidates(
      const Assertion& a) {
    auto [it, fresh] = cand_.try_emplace(&a);
    if (!fresh) return it->second;
    std::optional<std::vector<std::uint32_t>> out;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, EmpA>) {
            out.emplace(std::vector<std::uint32_t>{0});
          } else if constexpr (std::is_same_v<T, PointsToA>) {
            Value addr = strict::eval_expr(*node.addr, s_);
            out.emplace();
            if (addr.is_ptr()) {
              std::uint32_t b = bit(addr.ptr_val().block);
              if (b != 0) out->push_back(b);
            }
          } else if constexpr (std::is_same_v<T, AndA>) {
            const auto& cl = candidates(*node.lhs);
            const auto& cr = candidates(*node.rhs);
            if (cl && cr) {
              out.emplace();
              for (std::uint32_t m : *cl)
                if (std::find(cr->begin(), cr->end(), m) != cr->end())
                  out->push_back(m);
            } else if (cl) {
              out = cl;
            } else if (cr) {
              out = cr;
            }
          } else if constexpr (std::is_same_v<T, StarA> ||
                               std::is_same_v<T, IsoStarA>) {
            const auto& cl = candidates(*node.lhs);
            const auto& cr = candidates(*node.rhs);
            if (cl && cr && cl->size() * cr->size() <= 64) {
              out.emplace();
              for (std::uint32_t ml : *cl)
                for (std::uint32_t mr : *cr)
                  if ((ml & mr) == 0) out->push_back(ml | mr);
            }
          }
          // Top and VarEq constrain nothing.
        },
        a.node);
    it->second = std::move(out);
    return it->second;
  }

  std::size_t index(BlockId id) const {
    return std::lower_bound(bs_.begin(), bs_.end(), id) - bs_.begin();
  }
  // Zero for ids without a live block; those can never collide with a part.
  std::uint32_t bit(BlockId id) const {
    auto it = std::lower_bound(bs_.begin(), bs_.end(), id);
    if (it == bs_.end() || *it != id) return 0;
    return std::uint32_t(1) << (it - bs_.begin());
  }

  const State& s_;
  std::vector<BlockId> bs_;
  std::vector<std::uint32_t> cells_;
  std::vector<std::uint32_t> mention_;
  std::uint32_t store_mention_ = 0;
  std::map<const Assertion*, std::vector<signed char>> memo_;
  std::map<const Assertion*, std::optional<std::vector<std::uint32_t>>> cand_;
};

}  // namespace

bool holds(const Assertion& a, const State& s) {
  HoldsEval ev(s);
  if (!ev.ok()) return false;
  return ev.sat(a, ev.full());
}

std::set<Var> assertion_fvs(const Assertion& a) {
  return std::visit(
      [&](const auto& node) -> std::set<Var> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, EmpA> || std::is_same_v<T, TopA>) {
          return {};
        } else if constexpr (std::is_same_v<T, VarEqA>) {
          return {node.name};
        } else if constexpr (std::is_same_v<T, PointsToA>) {
          std::set<Var> out = expr_fvs(*node.addr);
          std::set<Var> rhs = expr_fvs(*node.value);
          out.insert(rhs.begin(), rhs.end());
          return out;
        } else {
          std::set<Var> out = assertion_fvs(*node.lhs);
          std::set<Var> rhs = assertion_fvs(*node.rhs);
          out.insert(rhs.begin(), rhs.end());
          return out;
        }
      },
      a.node);
}

bool independent(const Assertion& a, const std::set<Var>& V) {
  for (const Var& x : assertion_fvs(a))
    if (V.count(x)) return false;
  return true;
}

namespace {

// A points-to operand that mentions multiplication must be parenthesized,
// or its '*' would read back as a separating conjunction.
bool mentions_mul(const Expr& e) {
  if (const auto* b = std::get_if<BinE>(&e.node)) {
    if (b->op == BinOp::Mul) return true;
    return mentions_mul(*b->lhs) || mentions_mul(*b->rhs);
  }
  if (const auto* n = std::get_if<NotE>(&e.node)) return mentions_mul(*n->arg);
  if (const auto* o = std::get_if<OffsetE>(&e.node)) return mentions_mul(*o->arg);
  if (const auto* c = std::get_if<CastE>(&e.node)) return mentions_mul(*c->arg);
  if (const auto* f = std::get_if<ForgeE>(&e.node))
    return mentions_mul(*f->block) || mentions_mul(*f->offset);
  return false;
}

std::string show_operand(const Expr& e) {
  std::string text = pretty(e);
  return mentions_mul(e) ? "(" + text + ")" : text;
}

// Precedence levels for printing: /\ 0, |> 1, * 2, atoms 3.
std::string print_assert(const Assertion& a, int prec) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        auto wrap = [&](int level, std::string text) {
          return level < prec ? "(" + std::move(text) + ")" : std::move(text);
        };
        if constexpr (std::is_same_v<T, EmpA>) {
          return "emp";
        } else if constexpr (std::is_same_v<T, TopA>) {
          return "top";
        } else if constexpr (std::is_same_v<T, VarEqA>) {
          return node.name + " == " + show_value(node.value);
        } else if constexpr (std::is_same_v<T, PointsToA>) {
          return show_operand(*node.addr) + " |-> " + show_operand(*node.value);
        } else if constexpr (std::is_same_v<T, StarA>) {
          return wrap(2, print_assert(*node.lhs, 2) + " * " +
                             print_assert(*node.rhs, 3));
        } else if constexpr (std::is_same_v<T, IsoStarA>) {
          return wrap(1, print_assert(*node.lhs, 1) + " |> " +
                             print_assert(*node.rhs, 2));
        } else if constexpr (std::is_same_v<T, AndA>) {
          return wrap(0, print_assert(*node.lhs, 0) + " /\\ " +
                             print_assert(*node.rhs, 1));
        }
      },
      a.node);
}

}  // namespace

std::string pretty(const Assertion& a) { return print_assert(a, 0); }

namespace {

using detail::Tok;
using detail::TokenStream;

Value parse_literal(TokenStream& ts) {
  if (ts.at(Tok::Number)) return Value::integer(Int(ts.next().text));
  if (ts.eat(Tok::Minus)) {
    if (!ts.at(Tok::Number)) ts.fail("expected integer literal after '-'");
    return Value::integer(-Int(ts.next().text));
  }
  if (ts.eat_kw("true")) return Value::boolean(true);
  if (ts.eat_kw("false")) return Value::boolean(false);
  if (ts.eat_kw("nil")) return Value::nil();
  ts.fail("expected literal value");
}

AssertPtr parse_assert(TokenStream& ts);

AssertPtr parse_aatom(TokenStream& ts) {
  if (ts.eat_kw("emp")) return emp_a();
  if (ts.eat_kw("top")) return top_a();
  if (ts.at(Tok::LParen)) {
    // Could be a parenthesized assertion or the start of a points-to address
    // expression; try the assertion reading first.
    std::size_t mark = ts.position();
    ts.next();
    try {
      AssertPtr a = parse_assert(ts);
      ts.expect(Tok::RParen, "')'");
      return a;
    } catch (const ParseError&) {
      ts.rewind(mark);
    }
  }
  ExprPtr e = detail::parse_additive(ts);
  if (ts.eat(Tok::EqualEq)) {
    const VarE* v = std::get_if<VarE>(&e->node);
    if (!v) ts.fail("left side of '==' must be a variable");
    return var_eq_a(v->name, parse_literal(ts));
  }
  if (ts.eat(Tok::PointsTo))
    return points_to_a(e, detail::parse_additive(ts));
  ts.fail("expected '==' or '|->' after expression");
}

AssertPtr parse_astar(TokenStream& ts) {
  AssertPtr a = parse_aatom(ts);
  while (ts.eat(Tok::Star)) a = star_a(a, parse_aatom(ts));
  return a;
}

AssertPtr parse_aiso(TokenStream& ts) {
  AssertPtr a = parse_astar(ts);
  while (ts.eat(Tok::IsoStar)) a = iso_star_a(a, parse_astar(ts));
  return a;
}

AssertPtr parse_assert(TokenStream& ts) {
  AssertPtr a = parse_aiso(ts);
  while (ts.eat(Tok::AndAnd)) a = and_a(a, parse_aiso(ts));
  return a;
}

}  // namespace

AssertPtr parse_assertion(const std::string& text) {
  TokenStream ts(detail::tokenize(text));
  AssertPtr a = parse_assert(ts);
  if (!ts.at(Tok::End)) ts.fail("trailing input after assertion");
  return a;
}

namespace {

// Constructive sampling: builds a candidate state bottom-up; the caller
// re-verifies with holds() and retries, so builders may be approximate.
std::optional<State> build_satisfying(const Assertion& a, Rng& rng,
                                      const GenParams& p) {
  return std::visit(
      [&](const auto& node) -> std::optional<State> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, EmpA>) {
          State s = gen_state(rng, p);
          s.heap.clear();
          return s;
        } else if constexpr (std::is_same_v<T, TopA>) {
          return gen_state(rng, p);
        } else if constexpr (std::is_same_v<T, VarEqA>) {
          // The equation says nothing about the heap, so carry a random one;
          // sampling only empty heaps would make heap-agnostic preconditions
          // look stronger than they are.
          State s = gen_state(rng, p);
          s.store[node.name] = node.value;
          return s;
        } else if constexpr (std::is_same_v<T, PointsToA>) {
          State s;
          std::set<Var> addr_vars = expr_fvs(*node.addr);
          if (!addr_vars.empty()) {
            // One address variable carries a pointer; the rest get ints.
            std::size_t carrier = rng.below(addr_vars.size());
            std::size_t i = 0;
            for (const Var& x : addr_vars) {
              if (i++ == carrier)
                s.store[x] = Value::pointer(1 + rng.below(6), Int(0));
              else
                s.store[x] = Value::integer(Int(rng.range(0, 2)));
            }
          }
          for (const Var& x : expr_fvs(*node.value))
            if (!s.store.count(x))
              s.store[x] = Value::integer(Int(rng.range(-4, 4)));
          Value addr = strict::eval_expr(*node.addr, s);
          if (!addr.is_ptr()) return std::nullopt;
          s.heap[HeapKey{addr.ptr_val().block, addr.ptr_val().offset}] =
              strict::eval_expr(*node.value, s);
          return s;
        } else if constexpr (std::is_same_v<T, StarA> ||
                             std::is_same_v<T, IsoStarA>) {
          std::optional<State> s1 = build_satisfying(*node.lhs, rng, p);
          std::optional<State> s2 = build_satisfying(*node.rhs, rng, p);
          if (!s1 || !s2) return std::nullopt;
          if (!disjoint(blocks(*s1), blocks(*s2))) {
            // Shift the right part's ids above the left's.
            BlockId top = 0;
            for (BlockId i : ids(*s1)) top = std::max(top, i);
            for (BlockId i : ids(*s2)) top = std::max(top, i);
            std::map<BlockId, BlockId> pairs;
            for (BlockId i : ids(*s2)) pairs[i] = i + top;
            std::optional<Permutation> pi = Permutation::from_pairs(pairs);
            if (!pi) return std::nullopt;
            s2 = rename_state(*pi, *s2);
          }
          State merged;
          merged.heap = s1->heap;
          merged.heap.insert(s2->heap.begin(), s2->heap.end());
          merged.store = s1->store;
          // On a store clash the side whose assertion actually mentions the
          // variable wins; random filler bindings from emp/top never override
          // a constrained one.
          std::set<Var> lhs_fvs = assertion_fvs(*node.lhs);
          std::set<Var> rhs_fvs = assertion_fvs(*node.rhs);
          for (const auto& [x, v] : s2->store) {
            auto [it, inserted] = merged.store.emplace(x, v);
            if (inserted || it->second == v) continue;
            bool in_l = lhs_fvs.count(x) > 0, in_r = rhs_fvs.count(x) > 0;
            if (in_l && in_r) return std::nullopt;
            if (in_r) it->second = v;
          }
          return merged;
        } else if constexpr (std::is_same_v<T, AndA>) {
          std::optional<State> s = build_satisfying(*node.lhs, rng, p);
          if (s && holds(*node.rhs, *s)) return s;
          s = build_satisfying(*node.rhs, rng, p);
          if (s && holds(*node.lhs, *s)) return s;
          return std::nullopt;
        }
      },
      a.node);
}

}  // namespace

std::optional<State> sample_satisfying(const Assertion& a, Rng& rng,
                                       const GenParams& p) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::optional<State> s = build_satisfying(a, rng, p);
    if (s && holds(a, *s)) return s;
  }
  return std::nullopt;
}

TripleVerdict check_triple(const Assertion& p, const Command& c,
                           const Assertion& q, TripleMode mode,
                           std::uint64_t samples, Fuel fuel, std::uint64_t seed,
                           const SafetyConfig& cfg) {
  GenParams gp;
  Rng rng(seed);
  std::set<Var> cvars = vars(c);
  for (std::uint64_t trial = 0; trial < samples; ++trial) {
    Rng trng = rng.fork();
    std::optional<State> s0 = sample_satisfying(p, trng, gp);
    if (!s0) {
      TripleVerdict v;
      v.kind = TripleVerdict::GeneratorFailed;
      v.trials = trial;
      v.detail = "no state satisfying the precondition found";
      return v;
    }
    // The triple only speaks about states binding every variable of c; try
    // to extend the sample without breaking the precondition.
    State s = *s0;
    std::vector<Var> added;
    for (const Var& x : cvars)
      if (!s.store.count(x)) {
        s.store[x] = Value::integer(Int(trng.range(-2, 4)));
        added.push_back(x);
      }
    if (!added.empty() && !holds(p, s)) {
      for (const Var& x : added) s.store[x] = Value::nil();
      if (!holds(p, s)) s = *s0;
    }

    Outcome out = relaxed::eval_cmd(c, s, fuel, cfg);
    bool bad = false;
    switch (out.kind) {
      case OutcomeKind::OutOfFuel: break;
      case OutcomeKind::Error: bad = mode == TripleMode::Strict; break;
      case OutcomeKind::Done: bad = !holds(q, out.state); break;
    }
    if (bad) {
      TripleVerdict v;
      v.kind = TripleVerdict::Counterexample;
      v.trials = trial + 1;
      v.state = std::move(s);
      v.outcome = out.kind;
      v.final_state = std::move(out.state);
      v.detail = out.kind == OutcomeKind::Error
                     ? "run ends in error"
                     : "final state violates the postcondition";
      return v;
    }
  }
  TripleVerdict v;
  v.kind = TripleVerdict::NoCounterexample;
  v.trials = samples;
  return v;
}

TripleVerdict frame_experiment(const Assertion& p, const Command& c,
                               const Assertion& q, const Assertion& r,
                               FrameRule rule, std::uint64_t samples, Fuel fuel,
                               std::uint64_t seed,
                               std::optional<TripleMode> mode_override) {
  TripleMode mode = mode_override.value_or(
      rule == FrameRule::Frame ? TripleMode::Strict : TripleMode::ErrTolerant);
  if (!independent(r, modvars(c))) {
    TripleVerdict v;
    v.kind = TripleVerdict::PremiseFailed;
    v.detail = "frame assertion depends on a modified variable";
    return v;
  }
  TripleVerdict premise = check_triple(p, c, q, mode, samples, fuel, seed);
  if (premise.kind == TripleVerdict::Counterexample) {
    TripleVerdict v;
    v.kind = TripleVerdict::PremiseFailed;
    v.trials = premise.trials;
    v.detail = "premise triple has a counterexample";
    return v;
  }
  // A premise whose precondition cannot be sampled is vacuously valid.
  AssertPtr pre = rule == FrameRule::Frame ? star_a(emp_a(), emp_a()) : nullptr;
  AssertPtr post = pre;
  auto pcopy = std::make_shared<Assertion>(p);
  auto qcopy = std::make_shared<Assertion>(q);
  auto rcopy = std::make_shared<Assertion>(r);
  if (rule == FrameRule::Frame) {
    pre = star_a(pcopy, rcopy);
    post = star_a(qcopy, rcopy);
  } else {
    pre = iso_star_a(pcopy, rcopy);
    post = iso_star_a(qcopy, rcopy);
  }
  TripleVerdict concl =
      check_triple(*pre, c, *post, mode, samples, fuel, seed + 1);
  if (concl.kind == TripleVerdict::Counterexample && holds(p, concl.state)) {
    // The framed counterexample's initial state may itself satisfy the bare
    // precondition (p can be heap-agnostic). If the same run also refutes the
    // bare triple, the premise was false and the sampler above just missed
    // the witness; report that instead of blaming the frame rule.
    bool refutes = concl.outcome == OutcomeKind::Error
                       ? mode == TripleMode::Strict
                       : !holds(q, concl.final_state);
    if (refutes) {
      TripleVerdict v;
      v.kind = TripleVerdict::PremiseFailed;
      v.trials = concl.trials;
      v.state = std::move(concl.state);
      v.outcome = concl.outcome;
      v.final_state = std::move(concl.final_state);
      v.detail = "premise refuted by the framed counterexample";
      return v;
    }
  }
  if (concl.kind == TripleVerdict::GeneratorFailed) {
    // Unsatisfiable framed precondition: the conclusion holds vacuously.
    TripleVerdict v;
    v.kind = TripleVerdict::NoCounterexample;
    v.trials = 0;
    v.detail = "framed precondition unsatisfiable; vacuously valid";
    return v;
  }
  return concl;
}

}  // namespace memlab
