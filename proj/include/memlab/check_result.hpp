#pragma once

#include <string>

namespace memlab {

// Shared verdict type for single-instance theorem checks. Inapplicable means
// a precondition failed or the instance falls outside the theorem's claim;
// such trials are counted separately, never as passes.
enum class CheckStatus { Ok, Violation, Inapplicable };

struct CheckResult {
  CheckStatus status = CheckStatus::Ok;
  std::string detail;

  static CheckResult ok() { return {CheckStatus::Ok, ""}; }
  static CheckResult violation(std::string d) {
    return {CheckStatus::Violation, std::move(d)};
  }
  static CheckResult inapplicable(std::string d) {
    return {CheckStatus::Inapplicable, std::move(d)};
  }
};

}  // namespace memlab
