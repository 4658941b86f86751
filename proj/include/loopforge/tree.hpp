//===- tree.hpp - schedule-tree intermediate representation -------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_TREE_HPP
#define LOOPFORGE_TREE_HPP

#include "loopforge/bound.hpp"
#include "loopforge/directive.hpp"
#include "loopforge/parse.hpp"

#include <memory>

namespace loopforge {

struct ScheduleNode;
using TreeRef = std::shared_ptr<ScheduleNode>;

/// One dimension of a statement's instance identity: the original induction
/// variable and its value as an affine function of the current band counters.
struct Coord {
  std::string counter;
  AffineExpr expr;
};

/// Schedule-tree node. Domain is the root, one Band per loop dimension,
/// Sequence for textual order among siblings, Leaf per statement occurrence.
/// Execution order is the lexicographic order of band values interleaved
/// with sequence positions, root to leaf.
struct ScheduleNode {
  enum class Kind { Domain, Band, Sequence, Leaf };
  Kind kind = Kind::Leaf;

  // Band: counter in [lower, min(uppers)) stepped by `step`, walked
  // backwards when `reversed`. Exactly one schedule dimension per Band.
  std::string counter;
  BoundExpr lower;
  std::vector<BoundExpr> uppers;
  int64_t step = 1;
  bool reversed = false;
  std::string loopId; // band identifier for pragma targeting ("" = none)

  // Domain: zero or one child; Band: one child; Sequence: ordered children.
  std::vector<TreeRef> children;

  // Leaf.
  StmtRef stmt;              // deep copy owned by the tree
  std::vector<Coord> coords; // instance identity in original counters
  bool isCopy = false;       // packing copy statement (exempt from legality)
  std::string leafKey;       // unique statement-occurrence name

  static TreeRef domain(TreeRef child);
  static TreeRef band(std::string counter, BoundExpr lower,
                      std::vector<BoundExpr> uppers, int64_t step,
                      TreeRef child);
  static TreeRef sequence(std::vector<TreeRef> children);
  static TreeRef leaf(StmtRef stmt, std::vector<Coord> coords,
                      std::string key);
};

/// Deep copy (statements cloned too).
TreeRef clone_tree(const TreeRef &t);

/// Lowers a function body to a schedule tree. Band loop ids come from the
/// plan when given, else stay empty. The tree owns clones of the statements.
TreeRef lower_to_tree(const Function &f, const FunctionPlan *plan = nullptr);

/// One executed statement instance.
struct Instance {
  std::string leafKey;
  std::vector<int64_t> coords;
  bool isCopy = false;

  bool operator==(const Instance &o) const {
    return leafKey == o.leafKey && coords == o.coords;
  }
  bool operator<(const Instance &o) const {
    return leafKey != o.leafKey ? leafKey < o.leafKey : coords < o.coords;
  }
  std::string str() const;
};

/// Full execution order under a parameter binding. Throws
/// InstanceCapExceeded past `cap` instances.
std::vector<Instance> enumerate_order(const TreeRef &tree,
                                      const std::map<std::string, int64_t> &params,
                                      size_t cap = 1000000);

/// Structural invariant check; empty means valid. Violations name the node
/// path, e.g. "domain/band(i)/seq[1]: ...".
std::vector<std::string> validate_tree(const TreeRef &tree);

/// One node per line, two-space indentation:
///   Band: { StmtA[i] -> [i] | 0 <= i < n }
std::string print_tree(const TreeRef &tree);

/// Finds the band with the given loop id; null when absent. The returned
/// pointer aliases into `tree`.
ScheduleNode *find_band(const TreeRef &tree, const std::string &loopId);

/// Parent band/sequence/domain of `node` within `tree`; null for the root.
ScheduleNode *find_parent(const TreeRef &tree, const ScheduleNode *node);

} // namespace loopforge

#endif // LOOPFORGE_TREE_HPP
