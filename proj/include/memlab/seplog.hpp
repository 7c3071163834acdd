#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "memlab/ast.hpp"
#include "memlab/gen.hpp"
#include "memlab/relax.hpp"
#include "memlab/semantics.hpp"
#include "memlab/state.hpp"

namespace memlab {

struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;

struct EmpA {};
struct TopA {};
// x == <literal>; literals carry no block ids, which keeps every assertion
// invariant under identifier renaming.
struct VarEqA {
  Var name;
  Value value;
};
// e |-> e'; both sides evaluate against the store alone (expressions never
// read the heap). Holds of exactly the one-cell heap at the address.
struct PointsToA {
  ExprPtr addr;
  ExprPtr value;
};
struct StarA {
  AssertPtr lhs;
  AssertPtr rhs;
};
// p |> q: like Star, but nothing in the p-part (store included) may even
// mention the ids of the q-part's blocks.
struct IsoStarA {
  AssertPtr lhs;
  AssertPtr rhs;
};
struct AndA {
  AssertPtr lhs;
  AssertPtr rhs;
};

struct Assertion {
  std::variant<EmpA, TopA, VarEqA, PointsToA, StarA, IsoStarA, AndA> node;
};

AssertPtr emp_a();
AssertPtr top_a();
AssertPtr var_eq_a(Var name, Value value);
AssertPtr points_to_a(ExprPtr addr, ExprPtr value);
AssertPtr star_a(AssertPtr lhs, AssertPtr rhs);
AssertPtr iso_star_a(AssertPtr lhs, AssertPtr rhs);
AssertPtr and_a(AssertPtr lhs, AssertPtr rhs);

// Star and IsoStar search block-granular splits of the heap: a block's cells
// always travel together.
bool holds(const Assertion& a, const State& s);

std::set<Var> assertion_fvs(const Assertion& a);

// Syntactic independence: no free variable of a is in V. Strictly stronger
// than the semantic notion, and sound for the frame rules.
bool independent(const Assertion& a, const std::set<Var>& V);

std::string pretty(const Assertion& a);

// Grammar, loosest to tightest: /\, |>, *, atoms (emp, top, x == lit,
// e |-> e, parenthesized assertion).
AssertPtr parse_assertion(const std::string& text);

enum class TripleMode { Strict, ErrTolerant };

struct TripleVerdict {
  enum Kind {
    NoCounterexample,
    Counterexample,
    GeneratorFailed,  // could not sample a state satisfying the precondition
    PremiseFailed,    // frame experiments: premise triple or independence failed
  };
  Kind kind = NoCounterexample;
  std::uint64_t trials = 0;
  // Counterexample only:
  State state;
  OutcomeKind outcome = OutcomeKind::Done;
  State final_state;
  std::string detail;
};

// Samples a state satisfying the assertion, or nullopt if the budget runs
// out (e.g. the assertion is unsatisfiable).
std::optional<State> sample_satisfying(const Assertion& a, Rng& rng,
                                       const GenParams& p);

// Samples precondition states (extended so every variable of c is bound),
// runs c, and tests the contract: Done must satisfy q; Error rejects in
// Strict mode and passes in ErrTolerant; fuel exhaustion always passes.
TripleVerdict check_triple(const Assertion& p, const Command& c,
                           const Assertion& q, TripleMode mode,
                           std::uint64_t samples, Fuel fuel, std::uint64_t seed,
                           const SafetyConfig& cfg = SafetyConfig::strict());

enum class FrameRule { Frame, SafeFrame };

// Validates the premise triple {p} c {q} at the same budget, then checks the
// framed conclusion: {p * r} c {q * r} for Frame, {p |> r} c {q |> r} for
// SafeFrame. Triples are strict for Frame and error-tolerant for SafeFrame
// unless mode_override says otherwise (Frame over error-tolerant triples is
// the known-unsound combination). An unsatisfiable framed precondition makes
// the conclusion vacuous (NoCounterexample with zero trials).
TripleVerdict frame_experiment(const Assertion& p, const Command& c,
                               const Assertion& q, const Assertion& r,
                               FrameRule rule, std::uint64_t samples, Fuel fuel,
                               std::uint64_t seed,
                               std::optional<TripleMode> mode_override = std::nullopt);

}  // namespace memlab
