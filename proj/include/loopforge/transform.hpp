//===- transform.hpp - schedule-tree rewrites ----------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_TRANSFORM_HPP
#define LOOPFORGE_TRANSFORM_HPP

#include "loopforge/tree.hpp"

namespace loopforge {

/// Result of one rewrite. The tree is a fresh copy; the input is untouched.
struct RewriteResult {
  TreeRef tree;
  /// Introduced loop identifier -> band inside `tree`. Every id promised by
  /// the directive's id clauses is bound.
  std::map<std::string, ScheduleNode *> bindings;
};

/// Inverts the iteration order of a band. Trip count unchanged.
RewriteResult reverse(const TreeRef &tree, const std::string &loop);

/// Reorders a perfectly nested band chain. `permutation` lists the same ids
/// in the new outer-to-inner order.
/// Errors: NotPerfectlyNested, InvalidPermutation.
RewriteResult interchange(const TreeRef &tree,
                          const std::vector<std::string> &loops,
                          const std::vector<std::string> &permutation);

/// Splits a band into a pit band (step = size) over chunk starts and a strip
/// band over [pit, min(pit + size*step, U)). Execution order unchanged.
/// Errors: BadSize.
RewriteResult stripmine(const TreeRef &tree, const std::string &loop,
                        int64_t size, const std::string &pitId = "",
                        const std::string &stripId = "");

/// Strip-mines each target then permutes so all pit bands precede all strip
/// bands.  Errors: NotPerfectlyNested, BadSize.
RewriteResult tile(const TreeRef &tree, const std::vector<std::string> &loops,
                   const std::vector<int64_t> &sizes,
                   const std::vector<std::string> &pitIds = {},
                   const std::vector<std::string> &tileIds = {});

/// Partial unroll: main band with step*factor and factor body copies, plus a
/// remainder epilogue when the trip count is not a known multiple. Full
/// unroll: straight-line copies (constant trip count <= fullCap required).
/// Errors: BadFactor, FullUnrollTooLarge.
RewriteResult unroll(const TreeRef &tree, const std::string &loop,
                     int64_t factor, bool full = false,
                     int64_t fullCap = 1024);

/// Swaps a band with its child sequence: one band copy per sequence child.
/// `ids` optionally names the distributed bands. Errors: NothingToDistribute.
RewriteResult distribute(const TreeRef &tree, const std::string &loop,
                         const std::vector<std::string> &ids = {});

/// Fuses adjacent sequence-sibling bands with identical ranges into one band
/// whose body interleaves per iteration. Inverse of distribute.
/// Errors: NonAdjacent, RangeMismatch.
RewriteResult fuse(const TreeRef &tree, const std::vector<std::string> &loops);

/// unroll(unrollLoop, factor), then fuse at each intervening level down to
/// and including jamLoop ("" = the innermost band below unrollLoop).
/// Errors: JamNotNested and whatever unroll/fuse raise.
RewriteResult unroll_and_jam(const TreeRef &tree,
                             const std::string &unrollLoop,
                             const std::string &jamLoop, int64_t factor);

} // namespace loopforge

#endif // LOOPFORGE_TRANSFORM_HPP
