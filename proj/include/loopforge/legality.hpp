//===- legality.hpp - instance-level dependence oracle ------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_LEGALITY_HPP
#define LOOPFORGE_LEGALITY_HPP

#include "loopforge/tree.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace loopforge {

enum class DepKind { Flow, Anti, Output };

const char *depKindName(DepKind k);

/// An ordered pair of statement instances touching a common array element,
/// at least one of them writing. The source precedes the sink in the
/// original execution order.
struct Dependence {
  Instance src;
  Instance dst;
  DepKind kind = DepKind::Flow;
  std::string array;
  std::vector<int64_t> element;

  std::string str() const;
};

using DependenceSet = std::vector<Dependence>;

/// Exact dependence set of `tree` under one parameter binding, by brute
/// force over the full execution order. Scalars count as zero-dimensional
/// arrays; opaque calls read all their arguments and write nothing.
DependenceSet compute_dependences(const Function &f, const TreeRef &tree,
                                  const std::map<std::string, int64_t> &params,
                                  size_t cap = 1000000);

struct Verdict {
  bool legal = true;
  std::optional<Dependence> witness;
  std::map<std::string, int64_t> binding; // binding the witness was found at

  explicit operator bool() const { return legal; }
  std::string str() const;
};

/// All grid bindings of the scalar parameters of `f`: the cartesian product
/// of `values` over every free parameter (a single empty binding when the
/// function has none).
std::vector<std::map<std::string, int64_t>>
grid_bindings(const Function &f,
              const std::vector<int64_t> &values = {0, 1, 2, 3, 5, 8});

/// Legal iff every dependence of `before` keeps source-before-sink in
/// `after`'s execution order, for every binding in `grid`. Packing copy
/// statements in `after` are exempt.
Verdict check_legal(const Function &f, const TreeRef &before,
                    const TreeRef &after,
                    const std::vector<std::map<std::string, int64_t>> &grid,
                    size_t cap = 1000000);

enum class PolicyMode { ForcedError, ForcedWarnSkip, SilentSkip };
enum class PolicyAction { Apply, Skip };

/// One legality-report line, tab-separated:
///   location <TAB> kind <TAB> verdict <TAB> witness-or-dash
struct ReportEntry {
  SourceLoc loc;
  std::string kind;
  std::string verdict;
  std::string witness = "-";

  std::string line() const;
};

/// Applies the forced/hint policy table. Legal directives proceed. Illegal
/// hints are skipped silently; illegal forced directives abort under
/// ForcedError (by throwing a Diag naming the directive and witness), warn
/// and skip under ForcedWarnSkip, and skip under SilentSkip. Every decision
/// appends a report entry.
PolicyAction apply_policy(const Verdict &verdict, const Directive &directive,
                          PolicyMode mode, std::vector<ReportEntry> &report);

} // namespace loopforge

#endif // LOOPFORGE_LEGALITY_HPP
