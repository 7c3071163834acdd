#include "memlab/checkers.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "memlab/machine.hpp"
#include "memlab/parser.hpp"

namespace memlab {

namespace {

bool vars_bound(const Command& c, const State& s) {
  for (const Var& x : vars(c))
    if (!s.store.count(x)) return false;
  return true;
}

// Checks that the extension s2 survives verbatim inside t (heap cells exact,
// store entries exact except where shadowed by s1's store) and returns t with
// the extension removed.
std::optional<State> strip_extension(const State& t, const State& s1,
                                     const State& s2) {
  State rest = t;
  for (const auto& [k, v] : s2.heap) {
    auto it = rest.heap.find(k);
    if (it == rest.heap.end() || it->second != v) return std::nullopt;
    rest.heap.erase(it);
  }
  for (const auto& [x, v] : s2.store) {
    if (s1.store.count(x)) continue;  // shadowed by the left side of the union
    auto it = rest.store.find(x);
    if (it == rest.store.end() || it->second != v) return std::nullopt;
    rest.store.erase(it);
  }
  return rest;
}

}  // namespace

CheckResult check_frame_ok(const Command& c, const State& s1, const State& s2,
                           Fuel fuel) {
  if (!vars_bound(c, s1))
    return CheckResult::inapplicable("command mentions a variable unbound in s1");
  if (!disjoint(blocks(s1), blocks(s2)))
    return CheckResult::inapplicable("blocks of s1 and s2 overlap");
  OutcomePlus base = strict::eval_cmd_plus(c, s1, fuel);
  if (base.kind != OutcomeKind::Done)
    return CheckResult::inapplicable("base run is not successful");
  OutcomePlus ext = strict::eval_cmd_plus(c, state_union(s1, s2), fuel);
  if (ext.kind != OutcomeKind::Done)
    return CheckResult::violation("extended run is not successful");
  std::optional<State> rest = strip_extension(ext.state, s1, s2);
  if (!rest) return CheckResult::violation("extension not preserved verbatim");
  if (!disjoint(blocks(*rest), blocks(s2)))
    return CheckResult::violation("remainder allocates into extension blocks");
  if (!equiv_mod_perm(base.state, *rest))
    return CheckResult::violation("remainder differs beyond a renaming");
  return CheckResult::ok();
}

CheckResult check_frame_loop(const Command& c, const State& s1, const State& s2,
                             Fuel fuel) {
  if (!vars_bound(c, s1))
    return CheckResult::inapplicable("command mentions a variable unbound in s1");
  if (!disjoint(blocks(s1), blocks(s2)))
    return CheckResult::inapplicable("blocks of s1 and s2 overlap");
  if (strict::eval_cmd(c, s1, fuel).kind != OutcomeKind::OutOfFuel)
    return CheckResult::inapplicable("base run does not exhaust fuel");
  if (strict::eval_cmd(c, state_union(s1, s2), fuel).kind != OutcomeKind::OutOfFuel)
    return CheckResult::violation("extension changes fuel exhaustion");
  return CheckResult::ok();
}

CheckResult check_frame_error(const Command& c, const State& s1,
                              const State& s2, Fuel fuel) {
  if (!vars_bound(c, s1))
    return CheckResult::inapplicable("command mentions a variable unbound in s1");
  if (!disjoint(ids(s1), blocks(s2)))
    return CheckResult::inapplicable("ids of s1 meet blocks of s2");
  if (strict::eval_cmd(c, s1, fuel).kind != OutcomeKind::Error)
    return CheckResult::inapplicable("base run is not an error");
  if (strict::eval_cmd(c, state_union(s1, s2), fuel).kind != OutcomeKind::Error)
    return CheckResult::violation("extension masks the error");
  return CheckResult::ok();
}

CheckResult check_renaming(const Command& c, const State& s,
                           const Permutation& pi, Fuel fuel) {
  Outcome renamed = strict::eval_cmd(c, rename_state(pi, s), fuel);
  Outcome base = strict::eval_cmd(c, s, fuel);
  if (renamed.kind != base.kind)
    return CheckResult::violation("outcome class differs under renaming");
  if (renamed.kind != OutcomeKind::Done) return CheckResult::ok();
  if (!equiv_mod_perm(renamed.state, rename_state(pi, base.state)))
    return CheckResult::violation("results differ beyond a renaming");
  return CheckResult::ok();
}

CheckResult check_noninterference(const Command& c, const State& s1,
                                  const State& s21, const State& s22, Fuel fuel,
                                  const SafetyConfig& cfg) {
  if (!vars_bound(c, s1))
    return CheckResult::inapplicable("command mentions a variable unbound in s1");
  if (!disjoint(ids(s1), blocks(s21)) || !disjoint(ids(s1), blocks(s22)))
    return CheckResult::inapplicable("ids of s1 meet extension blocks");
  OutcomePlus o1 = relaxed::eval_cmd_plus(c, state_union(s1, s21), fuel, cfg);
  OutcomePlus o2 = relaxed::eval_cmd_plus(c, state_union(s1, s22), fuel, cfg);
  if (o1.kind != o2.kind)
    return CheckResult::violation("outcome class differs across extensions");
  if (o1.kind != OutcomeKind::Done) return CheckResult::ok();
  std::optional<State> r1 = strip_extension(o1.state, s1, s21);
  std::optional<State> r2 = strip_extension(o2.state, s1, s22);
  if (!r1 || !r2)
    return CheckResult::violation("extension not preserved verbatim");
  if (!equiv_mod_perm(*r1, *r2))
    return CheckResult::violation("remainders differ beyond a renaming");
  return CheckResult::ok();
}

CheckResult check_integrity_ni(const Command& c, const State& s1,
                               const State& s2, Fuel fuel,
                               const SafetyConfig& cfg) {
  if (!vars_bound(c, s1))
    return CheckResult::inapplicable("command mentions a variable unbound in s1");
  if (!disjoint(ids(s1), blocks(s2)))
    return CheckResult::inapplicable("ids of s1 meet blocks of s2");
  OutcomePlus o = relaxed::eval_cmd_plus(c, state_union(s1, s2), fuel, cfg);
  if (o.kind != OutcomeKind::Done) return CheckResult::ok();
  std::optional<State> rest = strip_extension(o.state, s1, s2);
  if (!rest) return CheckResult::violation("extension not preserved verbatim");
  if (!disjoint(ids(*rest), blocks(s2)))
    return CheckResult::violation("remainder mentions extension blocks");
  return CheckResult::ok();
}

CheckResult check_differential(const Command& c, const State& s, Fuel fuel) {
  OutcomePlus a = strict::eval_cmd_plus(c, s, fuel);
  OutcomePlus b = relaxed::eval_cmd_plus(c, s, fuel, SafetyConfig::strict());
  if (a == b) return CheckResult::ok();
  return CheckResult::violation("evaluators disagree under the strict configuration");
}

namespace {

std::string show_mem(const std::map<BlockId, std::vector<MValue>>& mem) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [id, cells] : mem) {
    if (!first) os << ", ";
    first = false;
    os << id << ": [";
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? " " : "") << show_mvalue(cells[i]);
    os << "]";
  }
  os << "}";
  return os.str();
}

std::string show_machine(const MachineState& ms) {
  std::ostringstream os;
  os << "mem" << show_mem(ms.mem) << " regs[";
  for (std::size_t i = 0; i < kNumRegs; ++i)
    os << (i ? " " : "") << reg_name(static_cast<Reg>(i)) << "="
       << show_mvalue(ms.regs[i]);
  os << "] pc=" << show_mvalue(ms.pc);
  return os.str();
}

// A second unreachable extension for noninterference: the first one with
// values perturbed, blocks dropped, or a fresh block added. Block ids stay
// away from `avoid`.
State mutate_extension(Rng& rng, const GenParams& p, const State& u,
                       const std::set<BlockId>& avoid) {
  State out = u;
  std::set<BlockId> taken = avoid;
  for (BlockId b : blocks(u)) taken.insert(b);
  switch (rng.below(3)) {
    case 0: {  // perturb cell values
      for (auto& [k, v] : out.heap)
        if (rng.one_in(2)) v = gen_value(rng, p, {});
      break;
    }
    case 1: {  // drop one block
      std::set<BlockId> bs = blocks(out);
      if (!bs.empty()) {
        std::vector<BlockId> v(bs.begin(), bs.end());
        BlockId victim = v[rng.below(v.size())];
        for (auto it = out.heap.begin(); it != out.heap.end();)
          it = it->first.block == victim ? out.heap.erase(it) : std::next(it);
        break;
      }
      [[fallthrough]];
    }
    default: {  // add a fresh block
      BlockId id = fresh_id(taken) + rng.below(3);
      std::size_t size = 1 + rng.below(p.max_block_size);
      for (std::size_t k = 0; k < size; ++k)
        out.heap[HeapKey{id, Int(k)}] = gen_value(rng, p, {});
      break;
    }
  }
  return out;
}

struct TrialContext {
  const std::string& theorem;
  const SafetyConfig& cfg;
  const GenParams& params;
};

CheckResult run_one_trial(const TrialContext& tc, std::uint64_t seed,
                          Violation* viol) {
  Rng rng(seed);
  GenParams gp = tc.params;
  gp.gen_casts = tc.cfg.casts;
  gp.gen_forge = tc.cfg.forging;
  auto record = [&](const std::string& program,
                    std::vector<std::string> states) {
    if (!viol) return;
    viol->seed = seed;
    viol->program = program;
    viol->states = std::move(states);
  };

  const std::string& th = tc.theorem;
  if (th == "frame-ok" || th == "frame-loop" || th == "frame-error" ||
      th == "integrity-ni") {
    CmdPtr c = gen_command(rng, gp);
    State whole = gen_state(rng, gp);
    std::set<Var> roots;
    for (const auto& [x, v] : whole.store) roots.insert(x);
    auto [s1, s2] = split_unreachable(whole, roots);
    CheckResult r;
    if (th == "frame-ok") r = check_frame_ok(*c, s1, s2, gp.fuel);
    else if (th == "frame-loop") r = check_frame_loop(*c, s1, s2, gp.fuel);
    else if (th == "frame-error") r = check_frame_error(*c, s1, s2, gp.fuel);
    else r = check_integrity_ni(*c, s1, s2, gp.fuel, tc.cfg);
    if (r.status == CheckStatus::Violation)
      record(pretty(*c), {show_state(s1), show_state(s2)});
    return r;
  }
  if (th == "renaming") {
    CmdPtr c = gen_command(rng, gp);
    State s = gen_state(rng, gp);
    Permutation pi = gen_permutation(rng, ids(s));
    CheckResult r = check_renaming(*c, s, pi, gp.fuel);
    if (r.status == CheckStatus::Violation)
      record(pretty(*c), {show_state(s)});
    return r;
  }
  if (th == "noninterference") {
    CmdPtr c = gen_command(rng, gp);
    State whole = gen_state(rng, gp);
    std::set<Var> roots;
    for (const auto& [x, v] : whole.store) roots.insert(x);
    auto [s1, u] = split_unreachable(whole, roots);
    State s22 = mutate_extension(rng, gp, u, ids(s1));
    CheckResult r = check_noninterference(*c, s1, u, s22, gp.fuel, tc.cfg);
    if (r.status == CheckStatus::Violation)
      record(pretty(*c), {show_state(s1), show_state(u), show_state(s22)});
    return r;
  }
  if (th == "differential") {
    CmdPtr c = gen_command(rng, gp);
    State s = gen_state(rng, gp);
    CheckResult r = check_differential(*c, s, gp.fuel);
    if (r.status == CheckStatus::Violation)
      record(pretty(*c), {show_state(s)});
    return r;
  }
  if (th == "mp-frame-ok" || th == "mp-frame-error" ||
      th == "mp-noninterference") {
    MachineState ms = gen_machine_state(rng, gp);
    auto m2 = gen_machine_mem(rng, gp, ids_machine(ms));
    CheckResult r;
    std::vector<std::string> states = {show_machine(ms), show_mem(m2)};
    if (th == "mp-frame-ok") {
      r = check_mp_frame_ok(ms, m2);
    } else if (th == "mp-frame-error") {
      r = check_mp_frame_error(ms, m2);
    } else {
      std::set<BlockId> avoid = ids_machine(ms);
      for (const auto& [id, cells] : m2) avoid.insert(id);
      auto m22 = gen_machine_mem(rng, gp, avoid);
      states.push_back(show_mem(m22));
      r = check_mp_noninterference(ms, m2, m22);
    }
    if (r.status == CheckStatus::Violation) record("", std::move(states));
    return r;
  }
  if (th == "mp-renaming") {
    MachineState ms = gen_machine_state(rng, gp);
    Permutation pi = gen_permutation(rng, ids_machine(ms));
    CheckResult r = check_mp_renaming(pi, ms);
    if (r.status == CheckStatus::Violation) record("", {show_machine(ms)});
    return r;
  }
  return CheckResult::inapplicable("unknown theorem '" + th + "'");
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t i) {
  Rng r(base ^ (0x9e3779b97f4a7c15ull * (i + 1)));
  return r.next();
}

}  // namespace

const std::vector<std::string>& known_theorems() {
  static const std::vector<std::string> names = {
      "frame-ok",    "frame-loop",      "frame-error",
      "renaming",    "noninterference", "integrity-ni",
      "differential", "mp-frame-ok",    "mp-frame-error",
      "mp-renaming", "mp-noninterference"};
  return names;
}

CheckReport run_campaign(const std::string& theorem, const SafetyConfig& cfg,
                         const GenParams& params, unsigned jobs) {
  auto start = std::chrono::steady_clock::now();
  CheckReport report;
  report.theorem = theorem;
  report.config = cfg;
  report.seed = params.seed;
  report.trials = params.trials;

  TrialContext tc{theorem, cfg, params};
  if (jobs == 0) jobs = 1;
  std::mutex mu;
  std::uint64_t applicable = 0;
  std::vector<std::pair<std::uint64_t, Violation>> found;

  auto worker = [&](unsigned w) {
    std::uint64_t local_applicable = 0;
    std::vector<std::pair<std::uint64_t, Violation>> local_found;
    for (std::uint64_t i = w; i < params.trials; i += jobs) {
      Violation viol;
      CheckResult r = run_one_trial(tc, trial_seed(params.seed, i), &viol);
      if (r.status != CheckStatus::Inapplicable) ++local_applicable;
      if (r.status == CheckStatus::Violation) {
        viol.detail = r.detail;
        local_found.emplace_back(i, std::move(viol));
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    applicable += local_applicable;
    for (auto& f : local_found) found.push_back(std::move(f));
  };

  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
    for (auto& t : threads) t.join();
  }

  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  report.applicable = applicable;
  for (auto& [i, v] : found) report.violations.push_back(std::move(v));
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

namespace {

// A concrete noninterference instance: base state plus two candidate
// unreachable extensions.
struct NiInstance {
  CmdPtr c;
  State s1;
  State s21;
  State s22;
};

State heap_only(std::initializer_list<std::pair<std::pair<BlockId, long>, Value>> cells) {
  State s;
  for (const auto& [k, v] : cells) s.heap[HeapKey{k.first, Int(k.second)}] = v;
  return s;
}

// Attack shapes from the relaxation analyses; each returns an instance only
// when the configuration enables the relevant relaxation.
std::vector<std::function<NiInstance(Rng&)>> ni_templates(const SafetyConfig& cfg) {
  std::vector<std::function<NiInstance(Rng&)>> out;
  bool block_fresh = cfg.freshness.kind == FreshnessMode::FreshBlocksOnly;

  if (block_fresh) {
    // Allocation history leaks through dangling-pointer equality.
    out.push_back([](Rng& rng) {
      NiInstance t;
      t.c = parse_program("x := alloc(1); z := (y = x)");
      t.s1.store = {{"x", Value::integer(0)},
                    {"y", Value::pointer(3, Int(0))},
                    {"z", Value::integer(0)}};
      t.s21 = State{};
      t.s22 = heap_only({{{1, 0}, Value::integer(Int(rng.range(0, 5)))},
                         {{2, 0}, Value::integer(0)}});
      return t;
    });
  }
  if (cfg.uninit_memory && block_fresh) {
    // Freed contents resurface in a recycled block.
    out.push_back([](Rng& rng) {
      NiInstance t;
      t.c = parse_program(
          "x := alloc(1); [x] := (y = x); free(x); w := alloc(1); u := [w]");
      t.s1.store = {{"x", Value::integer(0)},
                    {"y", Value::pointer(3, Int(0))},
                    {"w", Value::integer(0)},
                    {"u", Value::integer(0)}};
      t.s21 = State{};
      t.s22 = heap_only({{{1, 0}, Value::integer(Int(rng.range(0, 5)))},
                         {{2, 0}, Value::integer(0)}});
      return t;
    });
  }
  if (cfg.casts) {
    // The physical address of a fresh block depends on the whole footprint.
    out.push_back([](Rng& rng) {
      NiInstance t;
      t.c = parse_program("y := alloc(1); z := cast(y)");
      t.s1.store = {{"y", Value::integer(0)}, {"z", Value::integer(0)}};
      t.s21 = State{};
      t.s22 = heap_only({{{1, 0}, Value::integer(Int(rng.range(0, 5)))}});
      return t;
    });
  }
  if (cfg.pointer_eq == PtrEqMode::PhysicalAddress) {
    // Guessing a neighbor's address with pointer arithmetic: the probe hits
    // exactly when the unreachable part pads the layout to the right width.
    out.push_back([](Rng& rng) {
      NiInstance t;
      t.c = parse_program("y := alloc(1); z := (x + 1729 = y)");
      t.s1.store = {{"x", Value::pointer(1, Int(0))},
                    {"y", Value::integer(0)},
                    {"z", Value::integer(0)}};
      t.s1.heap[HeapKey{1, Int(0)}] = Value::integer(0);
      t.s21 = State{};
      // Extent 1728: one cell at the top offset. Padding 1 + 1728 puts the
      // fresh block at address 1729.
      t.s22 = heap_only({{{2, 1727}, Value::integer(Int(rng.range(0, 5)))}});
      return t;
    });
  }
  if (cfg.memory_limit && *cfg.memory_limit <= 4096) {
    // Allocation success depends on the unreachable footprint.
    Word limit = *cfg.memory_limit;
    out.push_back([limit](Rng& rng) {
      NiInstance t;
      std::uint64_t size = limit == 0 ? 1 : limit;
      t.c = parse_program("x := alloc(" + std::to_string(size) +
                          "); z := (x = nil)");
      t.s1.store = {{"x", Value::integer(0)}, {"z", Value::integer(0)}};
      t.s21 = State{};
      t.s22 = heap_only({{{1, 0}, Value::integer(Int(rng.range(0, 5)))}});
      return t;
    });
  }
  return out;
}

// Frame-ok attack for deliberately aliasing allocators: the chosen id lands
// on an extension block.
std::optional<std::tuple<CmdPtr, State, State>> frame_template(
    const SafetyConfig& cfg, Rng& rng) {
  if (cfg.freshness.kind == FreshnessMode::ModK) {
    CmdPtr c = parse_program("x := alloc(1)");
    State s1;
    s1.store = {{"x", Value::integer(0)}};
    State s2 =
        heap_only({{{0, 0}, Value::integer(Int(rng.range(1, 9)))}});
    return std::make_tuple(c, s1, s2);
  }
  return std::nullopt;
}

std::uint64_t count_nodes(const Command& c) {
  return std::visit(
      [&](const auto& node) -> std::uint64_t {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SeqC>)
          return 1 + count_nodes(*node.first) + count_nodes(*node.second);
        else if constexpr (std::is_same_v<T, IfC>)
          return 1 + count_nodes(*node.then_branch) + count_nodes(*node.else_branch);
        else if constexpr (std::is_same_v<T, WhileC>)
          return 1 + count_nodes(*node.body);
        else
          return 1;
      },
      c.node);
}

CmdPtr replace_node(const CmdPtr& c, std::uint64_t target, std::uint64_t& counter) {
  std::uint64_t here = counter++;
  if (here == target) return skip_c();
  return std::visit(
      [&](const auto& node) -> CmdPtr {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, SeqC>) {
          CmdPtr first = replace_node(node.first, target, counter);
          CmdPtr second = replace_node(node.second, target, counter);
          return seq_c(first, second);
        } else if constexpr (std::is_same_v<T, IfC>) {
          CmdPtr then_branch = replace_node(node.then_branch, target, counter);
          CmdPtr else_branch = replace_node(node.else_branch, target, counter);
          return if_c(node.guard, then_branch, else_branch);
        } else if constexpr (std::is_same_v<T, WhileC>) {
          return while_c(node.guard, replace_node(node.body, target, counter));
        } else {
          return c;
        }
      },
      c->node);
}

// Best-effort minimization: greedily replace command subtrees with skip and
// drop heap cells / store entries while the predicate keeps failing.
void shrink_instance(CmdPtr& c, std::vector<State*> states,
                     const std::function<bool()>& still_violating) {
  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (std::uint64_t n = 0; n < count_nodes(*c); ++n) {
      std::uint64_t counter = 0;
      CmdPtr candidate = replace_node(c, n, counter);
      if (equal(*candidate, *c)) continue;
      CmdPtr saved = c;
      c = candidate;
      if (still_violating()) {
        changed = true;
      } else {
        c = saved;
      }
    }
    for (State* s : states) {
      std::vector<HeapKey> keys;
      for (const auto& [k, v] : s->heap) keys.push_back(k);
      for (const HeapKey& k : keys) {
        Value saved = s->heap.at(k);
        s->heap.erase(k);
        if (still_violating()) {
          changed = true;
        } else {
          s->heap[k] = saved;
        }
      }
      std::vector<Var> svars;
      for (const auto& [x, v] : s->store) svars.push_back(x);
      for (const Var& x : svars) {
        Value saved = s->store.at(x);
        s->store.erase(x);
        if (still_violating()) {
          changed = true;
        } else {
          s->store[x] = saved;
        }
      }
    }
    if (!changed) break;
  }
}

}  // namespace

CheckReport hunt(const std::string& theorem, const SafetyConfig& cfg,
                 const GenParams& params) {
  auto start = std::chrono::steady_clock::now();
  CheckReport report;
  report.theorem = theorem;
  report.config = cfg;
  report.seed = params.seed;

  auto finish = [&]() {
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
  };

  std::vector<std::function<NiInstance(Rng&)>> templates;
  if (theorem == "noninterference") templates = ni_templates(cfg);
  TrialContext tc{theorem, cfg, params};

  for (std::uint64_t i = 0; i < params.trials; ++i) {
    std::uint64_t seed = trial_seed(params.seed, i);
    Rng rng(seed);
    ++report.trials;

    if (theorem == "noninterference" && !templates.empty() && i % 2 == 0) {
      NiInstance t = templates[(i / 2) % templates.size()](rng);
      CheckResult r =
          check_noninterference(*t.c, t.s1, t.s21, t.s22, params.fuel, cfg);
      if (r.status != CheckStatus::Inapplicable) ++report.applicable;
      if (r.status == CheckStatus::Violation) {
        shrink_instance(t.c, {&t.s1, &t.s21, &t.s22}, [&] {
          return check_noninterference(*t.c, t.s1, t.s21, t.s22, params.fuel, cfg)
                     .status == CheckStatus::Violation;
        });
        Violation v;
        v.seed = seed;
        v.program = pretty(*t.c);
        v.states = {show_state(t.s1), show_state(t.s21), show_state(t.s22)};
        v.detail = r.detail;
        report.violations.push_back(std::move(v));
        return finish();
      }
      continue;
    }
    if (theorem == "frame-ok" && i % 2 == 0) {
      if (auto t = frame_template(cfg, rng)) {
        auto& [c, s1, s2] = *t;
        // The aliasing allocator only shows up under the configurable
        // evaluator, so test extension preservation with it directly.
        OutcomePlus ext =
            relaxed::eval_cmd_plus(*c, state_union(s1, s2), params.fuel, cfg);
        CheckResult r = CheckResult::ok();
        if (ext.kind == OutcomeKind::Done && !strip_extension(ext.state, s1, s2))
          r = CheckResult::violation("extension not preserved verbatim");
        ++report.applicable;
        if (r.status == CheckStatus::Violation) {
          Violation v;
          v.seed = seed;
          v.program = pretty(*c);
          v.states = {show_state(s1), show_state(s2)};
          v.detail = r.detail;
          report.violations.push_back(std::move(v));
          return finish();
        }
        continue;
      }
    }

    Violation viol;
    CheckResult r = run_one_trial(tc, seed, &viol);
    if (r.status != CheckStatus::Inapplicable) ++report.applicable;
    if (r.status == CheckStatus::Violation) {
      viol.detail = r.detail;
      report.violations.push_back(std::move(viol));
      return finish();
    }
  }
  return finish();
}

}  // namespace memlab
