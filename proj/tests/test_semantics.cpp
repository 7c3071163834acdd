#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "memlab/parser.hpp"
#include "memlab/semantics.hpp"

using namespace memlab;

namespace {

State base_state() {
  State s;
  s.store["p"] = Value::pointer(4, Int(2));
  s.store["q"] = Value::pointer(6, Int(0));
  s.store["n"] = Value::integer(3);
  s.store["b"] = Value::boolean(true);
  return s;
}

Value ev(const std::string& text, const State& s) {
  return strict::eval_expr(*parse_expression(text), s);
}

}  // namespace

TEST_CASE("arithmetic on integers") {
  State s = base_state();
  CHECK(ev("1 + 2", s) == Value::integer(3));
  CHECK(ev("2 * 3", s) == Value::integer(6));
  CHECK(ev("5 - 7", s) == Value::integer(-2));
  CHECK(ev("n * n * n", s) == Value::integer(27));
  // Unbounded integers: no wrap at machine width.
  State big;
  big.store["x"] = Value::integer(Int(1) << 64);
  CHECK(ev("x * x", big) == Value::integer(Int(1) << 128));
}

TEST_CASE("pointer arithmetic") {
  State s = base_state();
  CHECK(ev("p + 3", s) == Value::pointer(4, Int(5)));
  CHECK(ev("3 + p", s) == Value::pointer(4, Int(5)));
  CHECK(ev("p - 1", s) == Value::pointer(4, Int(1)));
  CHECK(ev("p - 5", s) == Value::pointer(4, Int(-3)));
  // No pointer-pointer arithmetic and no scaling.
  CHECK(ev("p - q", s) == Value::nil());
  CHECK(ev("p + q", s) == Value::nil());
  CHECK(ev("p * 2", s) == Value::nil());
}

TEST_CASE("equality is structural and total") {
  State s = base_state();
  CHECK(ev("p = p", s) == Value::boolean(true));
  CHECK(ev("p = q", s) == Value::boolean(false));
  CHECK(ev("p = p + 1", s) == Value::boolean(false));
  CHECK(ev("1 = true", s) == Value::boolean(false));
  CHECK(ev("nil = nil", s) == Value::boolean(true));
  CHECK(ev("p = 4", s) == Value::boolean(false));
}

TEST_CASE("comparisons and booleans") {
  State s = base_state();
  CHECK(ev("1 <= 2", s) == Value::boolean(true));
  CHECK(ev("2 <= 1", s) == Value::boolean(false));
  CHECK(ev("p <= p", s) == Value::nil());
  CHECK(ev("true and false", s) == Value::boolean(false));
  CHECK(ev("false or b", s) == Value::boolean(true));
  CHECK(ev("1 and true", s) == Value::nil());
  CHECK(ev("not b", s) == Value::boolean(false));
  CHECK(ev("not 1", s) == Value::nil());
}

TEST_CASE("offset projection and unbound variables") {
  State s = base_state();
  CHECK(ev("offset(p)", s) == Value::integer(2));
  CHECK(ev("offset(5)", s) == Value::nil());
  CHECK(ev("unbound", s) == Value::nil());
  CHECK(ev("unbound + 1", s) == Value::nil());
}

TEST_CASE("cast and forge are inert under the strict semantics") {
  State s = base_state();
  CHECK(ev("cast(p)", s) == Value::nil());
  CHECK(ev("forge(4, 0)", s) == Value::nil());
}

TEST_CASE("skip, assign and sequencing") {
  State s = base_state();
  OutcomePlus out = strict::eval_cmd_plus(*parse_program("skip"), s, 10);
  CHECK(out.kind == OutcomeKind::Done);
  CHECK(out.state == s);
  CHECK(out.allocated.empty());

  out = strict::eval_cmd_plus(*parse_program("x := n + 1; y := x * 2"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::integer(4));
  CHECK(out.state.store.at("y") == Value::integer(8));
}

TEST_CASE("alloc picks one past the largest id in sight") {
  State s;
  s.store["d"] = Value::pointer(9, Int(0));  // dangling but still counted
  s.heap[HeapKey{5, Int(0)}] = Value::integer(0);
  OutcomePlus out = strict::eval_cmd_plus(*parse_program("x := alloc(2)"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::pointer(10, Int(0)));
  CHECK(out.state.heap.at(HeapKey{10, Int(0)}) == Value::integer(0));
  CHECK(out.state.heap.at(HeapKey{10, Int(1)}) == Value::integer(0));
  CHECK(out.allocated == std::set<BlockId>{10});
}

TEST_CASE("alloc edge cases") {
  State s;
  // Size zero: a block with no cells, so the pointer dangles immediately.
  OutcomePlus out = strict::eval_cmd_plus(*parse_program("x := alloc(0)"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::pointer(1, Int(0)));
  CHECK(out.state.heap.empty());
  CHECK(out.allocated == std::set<BlockId>{1});

  CHECK(strict::eval_cmd(*parse_program("x := alloc(-1)"), s, 10).kind ==
        OutcomeKind::Error);
  CHECK(strict::eval_cmd(*parse_program("x := alloc(true)"), s, 10).kind ==
        OutcomeKind::Error);
}

TEST_CASE("load and store demand a live cell") {
  State s;
  s.store["p"] = Value::pointer(1, Int(0));
  s.heap[HeapKey{1, Int(0)}] = Value::integer(7);

  OutcomePlus out = strict::eval_cmd_plus(*parse_program("x := [p]"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::integer(7));

  CHECK(strict::eval_cmd(*parse_program("x := [p + 1]"), s, 10).kind ==
        OutcomeKind::Error);
  CHECK(strict::eval_cmd(*parse_program("x := [5]"), s, 10).kind ==
        OutcomeKind::Error);

  out = strict::eval_cmd_plus(*parse_program("[p] := 9"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.heap.at(HeapKey{1, Int(0)}) == Value::integer(9));

  CHECK(strict::eval_cmd(*parse_program("[p + 1] := 9"), s, 10).kind ==
        OutcomeKind::Error);
}

TEST_CASE("free removes the whole block and rejects bad arguments") {
  State s;
  s.store["p"] = Value::pointer(1, Int(0));
  s.heap[HeapKey{1, Int(0)}] = Value::integer(1);
  s.heap[HeapKey{1, Int(1)}] = Value::integer(2);
  s.heap[HeapKey{2, Int(0)}] = Value::integer(3);

  OutcomePlus out = strict::eval_cmd_plus(*parse_program("free(p)"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(blocks(out.state) == std::set<BlockId>{2});

  // Interior pointers, dangling pointers and non-pointers all fail.
  CHECK(strict::eval_cmd(*parse_program("free(p + 1)"), s, 10).kind ==
        OutcomeKind::Error);
  CHECK(strict::eval_cmd(*parse_program("free(p); free(p)"), s, 10).kind ==
        OutcomeKind::Error);
  CHECK(strict::eval_cmd(*parse_program("free(1)"), s, 10).kind ==
        OutcomeKind::Error);
}

TEST_CASE("if demands a boolean guard") {
  State s = base_state();
  CHECK(strict::eval_cmd(*parse_program("if n then skip else skip end"), s, 10)
            .kind == OutcomeKind::Error);
  Outcome out =
      strict::eval_cmd(*parse_program("if b then x := 1 else x := 2 end"), s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("x") == Value::integer(1));
}

TEST_CASE("fuel counts while unfoldings exactly") {
  State s;
  s.store["x"] = Value::integer(5);
  CmdPtr loop = parse_program("while 1 <= x do x := x - 1 end");
  // Five iterations: fuel 5 finishes, fuel 4 does not.
  Outcome done = strict::eval_cmd(*loop, s, 5);
  REQUIRE(done.kind == OutcomeKind::Done);
  CHECK(done.state.store.at("x") == Value::integer(0));
  CHECK(strict::eval_cmd(*loop, s, 4).kind == OutcomeKind::OutOfFuel);

  // A guard that is false up front costs nothing.
  State zero;
  zero.store["x"] = Value::integer(0);
  CHECK(strict::eval_cmd(*loop, zero, 0).kind == OutcomeKind::Done);

  // Non-boolean guard is an error, not fuel exhaustion.
  State bad;
  bad.store["x"] = Value::nil();
  CHECK(strict::eval_cmd(*parse_program("while x do skip end"), bad, 10).kind ==
        OutcomeKind::Error);
}

TEST_CASE("allocation inside loops accumulates the allocated set") {
  State s;
  s.store["x"] = Value::integer(3);
  CmdPtr c = parse_program("while 1 <= x do y := alloc(1); x := x - 1 end");
  OutcomePlus out = strict::eval_cmd_plus(*c, s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.allocated == std::set<BlockId>{1, 2, 3});
  CHECK(strict::finalids(*c, s, 10).empty());
}

TEST_CASE("fresh allocation makes the dangling comparison deterministic") {
  // With strong freshness the new block can never collide with a stale
  // pointer, so the comparison below is always false.
  State s;
  s.store["x"] = Value::integer(0);
  s.store["y"] = Value::pointer(3, Int(0));
  s.store["z"] = Value::integer(0);
  CmdPtr c = parse_program("x := alloc(1); z := (y = x)");
  Outcome out = strict::eval_cmd(*c, s, 10);
  REQUIRE(out.kind == OutcomeKind::Done);
  CHECK(out.state.store.at("z") == Value::boolean(false));
  CHECK(out.state.store.at("x") == Value::pointer(4, Int(0)));
}

TEST_CASE("finalids excludes blocks allocated during the run") {
  State s;
  s.heap[HeapKey{2, Int(0)}] = Value::integer(0);
  s.store["p"] = Value::pointer(2, Int(0));
  std::set<BlockId> f = strict::finalids(*parse_program("x := alloc(1)"), s, 10);
  CHECK(f == std::set<BlockId>{2});
}
