#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memlab/check_result.hpp"
#include "memlab/gen.hpp"
#include "memlab/relax.hpp"
#include "memlab/semantics.hpp"

namespace memlab {

// Store-and-heap extension theorems, checked on concrete instances. All
// comparisons run both sides at the same fuel, so fuel exhaustion is an
// outcome class of its own and never a source of false violations.

// Frame for successful runs: eval(c, s1) = Done(s1') implies
// eval(c, s1 ∪ s2) = Done(pi·s1' ∪ s2) for some permutation pi, with the
// renamed result's blocks disjoint from s2's.
// Preconditions: vars(c) ⊆ vars(s1), blocks(s1) # blocks(s2).
CheckResult check_frame_ok(const Command& c, const State& s1, const State& s2,
                           Fuel fuel);

// Extension cannot create termination: fuel exhaustion on s1 persists on
// s1 ∪ s2 (exact, because fuel is counted in lockstep).
CheckResult check_frame_loop(const Command& c, const State& s1, const State& s2,
                             Fuel fuel);

// Extension cannot mask errors, under the stronger premise
// ids(s1) # blocks(s2) (no pointer in s1 may even mention s2's blocks).
CheckResult check_frame_error(const Command& c, const State& s1,
                              const State& s2, Fuel fuel);

// Renaming equivariance: eval(c, pi·s) matches eval(c, s) up to a renaming.
CheckResult check_renaming(const Command& c, const State& s,
                           const Permutation& pi, Fuel fuel);

// Two runs of c over s1 extended with different unreachable memories agree:
// same outcome class, and on success both reduce (extension preserved
// verbatim, remainder mod permutation) to a common result.
// Preconditions: vars(c) ⊆ vars(s1), ids(s1) # blocks(s21), # blocks(s22).
CheckResult check_noninterference(const Command& c, const State& s1,
                                  const State& s21, const State& s22, Fuel fuel,
                                  const SafetyConfig& cfg = SafetyConfig::strict());

// Integrity survives casts: a successful extended run preserves s2 verbatim
// and keeps the remainder's ids away from s2's blocks, with no claim about
// what the remainder is.
CheckResult check_integrity_ni(const Command& c, const State& s1,
                               const State& s2, Fuel fuel,
                               const SafetyConfig& cfg);

// The strict evaluator and the configurable evaluator under the strict
// configuration must agree exactly.
CheckResult check_differential(const Command& c, const State& s, Fuel fuel);

struct Violation {
  std::uint64_t seed = 0;
  std::string program;
  std::vector<std::string> states;  // rendered inputs, checker-specific order
  std::string detail;
};

struct CheckReport {
  std::string theorem;
  SafetyConfig config;
  std::uint64_t trials = 0;
  std::uint64_t applicable = 0;
  std::vector<Violation> violations;
  std::uint64_t seed = 0;
  double wall_seconds = 0;
};

const std::vector<std::string>& known_theorems();

// Runs `params.trials` randomized instances of the named theorem under the
// given configuration. Trial i is a pure function of (params.seed, i), so
// jobs > 1 changes nothing but wall time.
CheckReport run_campaign(const std::string& theorem, const SafetyConfig& cfg,
                         const GenParams& params, unsigned jobs = 1);

// Like run_campaign but biased toward known attack shapes for the enabled
// relaxations, stopping at the first violation, which is then shrunk.
CheckReport hunt(const std::string& theorem, const SafetyConfig& cfg,
                 const GenParams& params);

}  // namespace memlab
