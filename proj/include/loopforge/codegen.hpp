//===- codegen.hpp - schedule tree to mini-C -----------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_CODEGEN_HPP
#define LOOPFORGE_CODEGEN_HPP

#include "loopforge/directive.hpp"
#include "loopforge/tree.hpp"

#include <string>
#include <vector>

namespace loopforge {

/// Conjunction of pairwise array-disjointness predicates over the function's
/// pointer-typed array parameters. Trivially true when empty.
struct RuntimeCheck {
  std::vector<std::pair<std::string, std::string>> pairs;

  bool trivial() const { return pairs.empty(); }
};

/// Disjointness checks needed by the plan: one per pair of array parameters
/// where one is written and the other is accessed. Local arrays never alias.
RuntimeCheck build_runtime_check(const Function &f,
                                 const std::vector<Directive> &plan);

enum class CodegenStyle {
  /// Loops keep their source shape: strided pit loops, strip loops starting
  /// at the pit counter with min() upper bounds, reversed loops counting
  /// down. Counters keep loop ids or original names.
  Source,
  /// Every band is rewritten to count from zero with step 1 and `<=` upper
  /// bounds (floord for strided ranges); counters are named by band depth
  /// (c0, c1, ...).
  Normalized,
};

/// Generates the output function: hoisted packed declarations, and either
/// the transformed loop nest alone or an `if (check) {...} else {original}`
/// version when the runtime check is nontrivial. The loop AST reuses the
/// mini-C statement types, so the result prints and re-parses directly.
Function generate(const TreeRef &tree, const Function &original,
                  const RuntimeCheck &check,
                  const std::vector<ArrayDecl> &packedDecls = {},
                  CodegenStyle style = CodegenStyle::Source);

/// Renders a full compilable translation unit: helper definitions for min,
/// max, floord and no_overlap, then every function.
std::string emit_c(const Program &p);

} // namespace loopforge

#endif // LOOPFORGE_CODEGEN_HPP
