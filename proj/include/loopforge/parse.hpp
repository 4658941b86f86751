//===- parse.hpp - mini-C lexer and parser ------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_PARSE_HPP
#define LOOPFORGE_PARSE_HPP

#include "loopforge/ast.hpp"

#include <string>

namespace loopforge {

/// Parses mini-C source text into a Program. Pragma lines (with backslash
/// continuation folded) attach to the statement that follows them. Statement
/// names are assigned (calls after their callee, assignments StmtN). Loops
/// annotated with pragmas are checked for canonical form, and accesses inside
/// annotated nests for affinity.
Program parse_source(const std::string &text);

/// A canonical loop normalized to a half-open upward range [lower, upperExcl)
/// walked with a positive step, in reverse order when `reversed`.
struct LoopRange {
  AffineExpr lower;
  AffineExpr upperExcl;
  int64_t step = 1;
  bool reversed = false;
};

/// Normalizes a canonical for-loop; throws NonCanonicalLoop otherwise.
LoopRange normalizeLoop(const Stmt &loop);

/// Closed-form (lower, count) of a canonical loop; count may evaluate
/// negative for statically empty parametric ranges (trip count is
/// max(0, count)).
std::pair<AffineExpr, AffineExpr> canonical_range(const Stmt &loop);

/// Checks the canonical-form rules: for-header already shaped by the grammar,
/// affine init/bound, constant nonzero step, counter not modified in body.
/// Returns the failure reason or empty string.
std::string checkCanonical(const Stmt &loop);

} // namespace loopforge

#endif // LOOPFORGE_PARSE_HPP
