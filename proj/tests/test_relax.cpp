#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "memlab/gen.hpp"
#include "memlab/parser.hpp"
#include "memlab/relax.hpp"

using namespace memlab;

namespace {

OutcomePlus run_relaxed(const std::string& text, const State& s,
                        const SafetyConfig& cfg, Fuel fuel = 64) {
  return relaxed::eval_cmd_plus(*parse_program(text), s, fuel, cfg);
}

}  // namespace

TEST_CASE("the strict configuration reproduces the reference semantics") {
  Rng rng(101);
  GenParams gp;
  for (int i = 0; i < 2000; ++i) {
    CmdPtr c = gen_command(rng, gp);
    State s = gen_state(rng, gp);
    OutcomePlus a = strict::eval_cmd_plus(*c, s, gp.fuel);
    OutcomePlus b = relaxed::eval_cmd_plus(*c, s, gp.fuel, SafetyConfig::strict());
    CHECK(a == b);
  }
}

TEST_CASE("layout assigns bump addresses in allocation order") {
  State s;
  SafetyConfig cfg;
  cfg.casts = true;
  OutcomePlus out = run_relaxed(
      "x := alloc(2); y := alloc(1); a := cast(x); b := cast(y)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("a") == Value::integer(0));
  CHECK(out.state.store.at("b") == Value::integer(2));
}

TEST_CASE("casts see through offsets and survive free") {
  State s;
  SafetyConfig cfg;
  cfg.casts = true;
  OutcomePlus out = run_relaxed(
      "x := alloc(4); a := cast(x + 3); free(x); b := cast(x)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("a") == Value::integer(3));
  // The base sticks around, so dangling casts still resolve.
  CHECK(out.state.store.at("b") == Value::integer(0));

  // A pointer whose block never had a layout base casts to nil.
  State t;
  t.store["p"] = Value::pointer(42, Int(0));
  out = run_relaxed("a := cast(p)", t, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("a") == Value::nil());
}

TEST_CASE("cast remains inert when the flag is off") {
  State s;
  OutcomePlus out = run_relaxed("x := alloc(1); a := cast(x)", s,
                                SafetyConfig::strict());
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("a") == Value::nil());
}

TEST_CASE("forge fabricates pointers from integers") {
  State s;
  s.heap[HeapKey{7, Int(1)}] = Value::integer(99);
  s.store["x"] = Value::integer(0);
  SafetyConfig cfg;
  cfg.forging = true;
  OutcomePlus out = run_relaxed("x := [forge(7, 1)]", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::integer(99));

  CHECK(forge_value(Value::integer(-1), Value::integer(0)) == Value::nil());
  CHECK(forge_value(Value::integer(Int(UINT64_MAX) + 1), Value::integer(0)) ==
        Value::nil());
  CHECK(forge_value(Value::integer(Int(UINT64_MAX)), Value::integer(-2)) ==
        Value::pointer(UINT64_MAX, Int(-2)));
  CHECK(forge_value(Value::boolean(true), Value::integer(0)) == Value::nil());
}

TEST_CASE("uninitialized memory recycles freed contents") {
  State s;
  SafetyConfig cfg;
  cfg.uninit_memory = true;
  cfg.freshness.kind = FreshnessMode::FreshBlocksOnly;
  OutcomePlus out = run_relaxed(
      "x := alloc(1); [x] := 7; free(x); y := alloc(1); u := [y]", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("u") == Value::integer(7));

  // The pool drains: a second cell in the same allocation is zero again.
  out = run_relaxed(
      "x := alloc(1); [x] := 7; free(x); y := alloc(2); u := [y]; v := [y + 1]",
      s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("u") == Value::integer(7));
  CHECK(out.state.store.at("v") == Value::integer(0));
}

TEST_CASE("fresh allocations stay zeroed without the uninit flag") {
  State s;
  SafetyConfig cfg;
  cfg.freshness.kind = FreshnessMode::FreshBlocksOnly;
  OutcomePlus out = run_relaxed(
      "x := alloc(1); [x] := 7; free(x); y := alloc(1); u := [y]", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("u") == Value::integer(0));
}

TEST_CASE("block-only freshness reuses the smallest dead id") {
  State s;
  s.store["d"] = Value::pointer(1, Int(0));  // dangling; fair game for reuse
  SafetyConfig cfg;
  cfg.freshness.kind = FreshnessMode::FreshBlocksOnly;
  OutcomePlus out = run_relaxed("x := alloc(1); y := alloc(1)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::pointer(1, Int(0)));
  CHECK(out.state.store.at("y") == Value::pointer(2, Int(0)));
  // The stale pointer now aliases the first allocation.
  CHECK(out.state.store.at("d") == out.state.store.at("x"));

  out = run_relaxed("x := alloc(1); free(x); y := alloc(1)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("y") == Value::pointer(1, Int(0)));
}

TEST_CASE("mod-k freshness cycles ids and aliases live blocks") {
  State s;
  SafetyConfig cfg;
  cfg.freshness.kind = FreshnessMode::ModK;
  cfg.freshness.k = 2;
  OutcomePlus out = run_relaxed(
      "a := alloc(1); b := alloc(1); c := alloc(1)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("a") == Value::pointer(0, Int(0)));
  CHECK(out.state.store.at("b") == Value::pointer(1, Int(0)));
  // Third allocation wraps around to id 0, clobbering the first block.
  CHECK(out.state.store.at("c") == Value::pointer(0, Int(0)));
  CHECK(blocks(out.state) == std::set<BlockId>{0, 1});
}

TEST_CASE("memory limit halts or returns nil") {
  State s;
  s.heap[HeapKey{1, Int(0)}] = Value::integer(0);
  s.store["p"] = Value::pointer(1, Int(0));
  SafetyConfig cfg;
  cfg.memory_limit = 3;

  cfg.oom_mode = OomMode::HaltError;
  CHECK(run_relaxed("x := alloc(3)", s, cfg).kind == OutcomeKind::Error);
  CHECK(run_relaxed("x := alloc(2)", s, cfg).kind == OutcomeKind::Done);

  cfg.oom_mode = OomMode::ReturnNil;
  OutcomePlus out = run_relaxed("x := alloc(3); z := (x = nil)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::nil());
  CHECK(out.state.store.at("z") == Value::boolean(true));

  // Freeing makes room again.
  out = run_relaxed("free(p); x := alloc(3); z := (x = nil)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("z") == Value::boolean(false));
}

TEST_CASE("physical pointer equality compares addresses") {
  State s;
  SafetyConfig cfg;
  cfg.pointer_eq = PtrEqMode::PhysicalAddress;
  // Two adjacent one-cell blocks: the end of the first is the start of the
  // second.
  OutcomePlus out = run_relaxed(
      "x := alloc(1); y := alloc(1); z := (x + 1 = y); w := (x = y)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("z") == Value::boolean(true));
  CHECK(out.state.store.at("w") == Value::boolean(false));

  // Pointer against integer address.
  out = run_relaxed("x := alloc(1); y := alloc(1); z := (y = 1)", s, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("z") == Value::boolean(true));

  // A pointer with no assigned base has no address: the comparison is nil and
  // poisons the guard.
  State t;
  t.store["p"] = Value::pointer(9, Int(0));
  t.store["z"] = Value::integer(0);
  CHECK(run_relaxed("if p = 0 then z := 1 else z := 2 end", t, cfg).kind ==
        OutcomeKind::Error);

  // Non-pointer operands still compare structurally.
  State u;
  u.store["a"] = Value::boolean(true);
  out = run_relaxed("z := (a = true); w := (1 = 1)", u, cfg);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("z") == Value::boolean(true));
  CHECK(out.state.store.at("w") == Value::boolean(true));
}

TEST_CASE("trace callback reports executed paths") {
  State s;
  std::vector<std::string> paths;
  relaxed::TraceFn fn = [&](const std::string& path, OutcomeKind) {
    paths.push_back(path);
  };
  RunContext ctx = make_run_context(s);
  OutcomePlus out = relaxed::eval_cmd_plus(*parse_program("x := 1; y := 2"), s, 8,
                                           SafetyConfig::strict(), ctx, &fn);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(paths == std::vector<std::string>{"/0", "/1"});
}
