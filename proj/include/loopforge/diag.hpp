//===- diag.hpp - diagnostics and structured errors -------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_DIAG_HPP
#define LOOPFORGE_DIAG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace loopforge {

struct SourceLoc {
  int line = 0;
  int col = 0;

  bool valid() const { return line > 0; }
  std::string str() const {
    return std::to_string(line) + ":" + std::to_string(col);
  }
};

enum class ErrCode {
  // frontend
  SyntaxError,
  NonCanonicalLoop,
  NonAffineAccess,
  Overflow,
  // directives
  UnknownTransformation,
  UnknownClause,
  ClauseArityError,
  DuplicateClause,
  UnresolvedLoopId,
  AmbiguousImplicitId,
  TargetNotPerfectlyNested,
  IdRedefinition,
  // sched
  InstanceCapExceeded,
  // transforms
  NotPerfectlyNested,
  InvalidPermutation,
  BadSize,
  BadFactor,
  FullUnrollTooLarge,
  NothingToDistribute,
  NonAdjacent,
  RangeMismatch,
  JamNotNested,
  NonAffinePack,
  ParametricFootprint,
  EmptyFootprint,
  WriteWithoutCopyOutSupport,
  UnsupportedScheduleShape,
  // legality
  IllegalTransformation,
  // interp
  BudgetExceeded,
  OutOfBounds,
  EvalError,
};

const char *errCodeName(ErrCode code);

/// The project-wide error type. Everything user-visible that can go wrong is
/// reported as a Diag with a code, a message and (when known) a location.
class Diag : public std::runtime_error {
public:
  Diag(ErrCode code, std::string message, SourceLoc loc = {})
      : std::runtime_error(format(code, message, loc)), code_(code),
        message_(std::move(message)), loc_(loc) {}

  ErrCode code() const { return code_; }
  const std::string &message() const { return message_; }
  SourceLoc loc() const { return loc_; }

private:
  static std::string format(ErrCode code, const std::string &message,
                            SourceLoc loc) {
    std::string s;
    if (loc.valid())
      s += loc.str() + ": ";
    s += std::string(errCodeName(code)) + ": " + message;
    return s;
  }

  ErrCode code_;
  std::string message_;
  SourceLoc loc_;
};

} // namespace loopforge

#endif // LOOPFORGE_DIAG_HPP
