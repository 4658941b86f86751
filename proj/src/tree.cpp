//===- tree.cpp - schedule-tree IR --------------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/tree.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace loopforge {

TreeRef ScheduleNode::domain(TreeRef child) {
  auto n = std::make_shared<ScheduleNode>();
  n->kind = Kind::Domain;
  if (child)
    n->children.push_back(std::move(child));
  return n;
}

TreeRef ScheduleNode::band(std::string counter, BoundExpr lower,
                           std::vector<BoundExpr> uppers, int64_t step,
                           TreeRef child) {
  auto n = std::make_shared<ScheduleNode>();
  n->kind = Kind::Band;
  n->counter = std::move(counter);
  n->lower = std::move(lower);
  n->uppers = std::move(uppers);
  n->step = step;
  n->children.push_back(std::move(child));
  return n;
}

TreeRef ScheduleNode::sequence(std::vector<TreeRef> children) {
  auto n = std::make_shared<ScheduleNode>();
  n->kind = Kind::Sequence;
  n->children = std::move(children);
  return n;
}

TreeRef ScheduleNode::leaf(StmtRef stmt, std::vector<Coord> coords,
                           std::string key) {
  auto n = std::make_shared<ScheduleNode>();
  n->kind = Kind::Leaf;
  n->stmt = std::move(stmt);
  n->coords = std::move(coords);
  n->leafKey = std::move(key);
  return n;
}

TreeRef clone_tree(const TreeRef &t) {
  if (!t)
    return nullptr;
  auto n = std::make_shared<ScheduleNode>(*t);
  if (n->stmt)
    n->stmt = n->stmt->clone();
  for (auto &c : n->children)
    c = clone_tree(c);
  return n;
}

//===----------------------------------------------------------------------===//
// Lowering
//===----------------------------------------------------------------------===//

namespace {

TreeRef lowerStmts(const std::vector<StmtRef> &stmts,
                   const std::vector<std::string> &counters,
                   const FunctionPlan *plan);

TreeRef lowerOne(const StmtRef &s, const std::vector<std::string> &counters,
                 const FunctionPlan *plan) {
  switch (s->kind) {
  case Stmt::Kind::Loop: {
    LoopRange r = normalizeLoop(*s);
    auto inner = counters;
    inner.push_back(s->counter);
    TreeRef child = lowerStmts(s->body, inner, plan);
    if (!child)
      child = ScheduleNode::sequence({});
    TreeRef b = ScheduleNode::band(s->counter, BoundExpr(r.lower),
                                   {BoundExpr(r.upperExcl)}, r.step,
                                   std::move(child));
    b->reversed = r.reversed;
    if (plan) {
      auto it = plan->loopIds.find(s.get());
      if (it != plan->loopIds.end())
        b->loopId = it->second;
    }
    return b;
  }
  case Stmt::Kind::Assign:
  case Stmt::Kind::Call: {
    std::vector<Coord> coords;
    for (const auto &c : counters)
      coords.push_back({c, AffineExpr::sym(c)});
    return ScheduleNode::leaf(s->clone(), std::move(coords), s->name);
  }
  case Stmt::Kind::Block:
    return lowerStmts(s->body, counters, plan);
  case Stmt::Kind::If:
    throw Diag(ErrCode::UnsupportedScheduleShape,
               "if statements cannot be lowered to a schedule tree", s->loc);
  }
  return nullptr;
}

TreeRef lowerStmts(const std::vector<StmtRef> &stmts,
                   const std::vector<std::string> &counters,
                   const FunctionPlan *plan) {
  std::vector<TreeRef> children;
  for (const auto &s : stmts)
    if (TreeRef c = lowerOne(s, counters, plan))
      children.push_back(std::move(c));
  if (children.empty())
    return nullptr;
  if (children.size() == 1)
    return children[0];
  return ScheduleNode::sequence(std::move(children));
}

} // namespace

TreeRef lower_to_tree(const Function &f, const FunctionPlan *plan) {
  return ScheduleNode::domain(lowerStmts(f.body, {}, plan));
}

//===----------------------------------------------------------------------===//
// Enumeration
//===----------------------------------------------------------------------===//

std::string Instance::str() const {
  std::string s = leafKey + "[";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i)
      s += ", ";
    s += std::to_string(coords[i]);
  }
  return s + "]";
}

namespace {

void enumerateNode(const TreeRef &n, std::map<std::string, int64_t> &env,
                   std::vector<Instance> &out, size_t cap) {
  if (!n)
    return;
  switch (n->kind) {
  case ScheduleNode::Kind::Domain:
  case ScheduleNode::Kind::Sequence:
    for (const auto &c : n->children)
      enumerateNode(c, env, out, cap);
    return;
  case ScheduleNode::Kind::Band: {
    int64_t lo = n->lower.eval(env);
    int64_t hi =
        BoundExpr::min(std::vector<BoundExpr>(n->uppers)).eval(env);
    if (hi <= lo)
      return;
    auto saved = env.find(n->counter) != env.end()
                     ? std::optional<int64_t>(env[n->counter])
                     : std::nullopt;
    int64_t last = checkedAdd(lo, checkedMul(n->step,
                                             floordiv(hi - 1 - lo, n->step)));
    if (!n->reversed) {
      for (int64_t v = lo; v < hi; v += n->step) {
        env[n->counter] = v;
        enumerateNode(n->children[0], env, out, cap);
      }
    } else {
      for (int64_t v = last; v >= lo; v -= n->step) {
        env[n->counter] = v;
        enumerateNode(n->children[0], env, out, cap);
      }
    }
    if (saved)
      env[n->counter] = *saved;
    else
      env.erase(n->counter);
    return;
  }
  case ScheduleNode::Kind::Leaf: {
    if (out.size() >= cap)
      throw Diag(ErrCode::InstanceCapExceeded,
                 "schedule enumeration exceeds the instance cap of " +
                     std::to_string(cap));
    Instance inst;
    // Instance identity uses the statement's original name so replicated
    // occurrences (unroll copies, epilogues) stay comparable.
    inst.leafKey = n->stmt ? n->stmt->name : n->leafKey;
    inst.isCopy = n->isCopy;
    for (const auto &c : n->coords)
      inst.coords.push_back(c.expr.eval(env));
    out.push_back(std::move(inst));
    return;
  }
  }
}

} // namespace

std::vector<Instance>
enumerate_order(const TreeRef &tree, const std::map<std::string, int64_t> &params,
                size_t cap) {
  std::vector<Instance> out;
  std::map<std::string, int64_t> env = params;
  enumerateNode(tree, env, out, cap);
  return out;
}

//===----------------------------------------------------------------------===//
// Validation
//===----------------------------------------------------------------------===//

namespace {

void validateNode(const TreeRef &n, const std::string &path, bool isRoot,
                  std::set<std::string> &leafKeys,
                  std::set<std::string> &bandIds,
                  std::vector<std::string> &out) {
  if (!n) {
    out.push_back(path + ": null node");
    return;
  }
  switch (n->kind) {
  case ScheduleNode::Kind::Domain: {
    if (!isRoot)
      out.push_back(path + ": Domain below the root");
    if (n->children.size() > 1)
      out.push_back(path + ": Domain with more than one child");
    for (const auto &c : n->children)
      validateNode(c, path + "/domain", false, leafKeys, bandIds, out);
    return;
  }
  case ScheduleNode::Kind::Band: {
    std::string p = path + "/band(" + n->counter + ")";
    if (isRoot)
      out.push_back(p + ": Band as root");
    if (n->counter.empty())
      out.push_back(p + ": band without a counter");
    if (n->step <= 0)
      out.push_back(p + ": nonpositive step");
    if (n->uppers.empty())
      out.push_back(p + ": band without an upper bound");
    if (n->children.size() != 1)
      out.push_back(p + ": band must have exactly one child");
    if (!n->loopId.empty() && !bandIds.insert(n->loopId).second)
      out.push_back(p + ": duplicate loop id '" + n->loopId + "'");
    for (const auto &c : n->children)
      validateNode(c, p, false, leafKeys, bandIds, out);
    return;
  }
  case ScheduleNode::Kind::Sequence: {
    std::string p = path + "/seq";
    if (isRoot)
      out.push_back(p + ": Sequence as root");
    for (size_t i = 0; i < n->children.size(); ++i)
      validateNode(n->children[i], p + "[" + std::to_string(i) + "]", false,
                   leafKeys, bandIds, out);
    return;
  }
  case ScheduleNode::Kind::Leaf: {
    std::string p = path + "/leaf(" + n->leafKey + ")";
    if (isRoot)
      out.push_back(p + ": Leaf as root");
    if (!n->stmt)
      out.push_back(p + ": leaf without a statement");
    if (!n->children.empty())
      out.push_back(p + ": leaf with children");
    // "Each statement appears in exactly one Leaf": keys are unique, so
    // Sequence filters (the per-child leaf-key sets) partition trivially.
    if (!leafKeys.insert(n->leafKey).second)
      out.push_back(p + ": statement appears in more than one leaf");
    return;
  }
  }
}

} // namespace

std::vector<std::string> validate_tree(const TreeRef &tree) {
  std::vector<std::string> out;
  std::set<std::string> leafKeys, bandIds;
  validateNode(tree, "", true, leafKeys, bandIds, out);
  if (tree && tree->kind != ScheduleNode::Kind::Domain)
    out.push_back(": root is not a Domain");
  return out;
}

//===----------------------------------------------------------------------===//
// Printing
//===----------------------------------------------------------------------===//

namespace {

void collectLeaves(const TreeRef &n, std::vector<const ScheduleNode *> &out) {
  if (!n)
    return;
  if (n->kind == ScheduleNode::Kind::Leaf) {
    out.push_back(n.get());
    return;
  }
  for (const auto &c : n->children)
    collectLeaves(c, out);
}

std::string leafSpace(const ScheduleNode *l) {
  std::string s = l->leafKey + "[";
  for (size_t i = 0; i < l->coords.size(); ++i) {
    if (i)
      s += ", ";
    s += l->coords[i].expr.str();
  }
  return s + "]";
}

std::string upperStr(const std::vector<BoundExpr> &uppers) {
  return BoundExpr::min(std::vector<BoundExpr>(uppers)).str();
}

void printNode(const TreeRef &n, int depth, std::string &out) {
  if (!n)
    return;
  std::string ind(static_cast<size_t>(depth) * 2, ' ');
  std::vector<const ScheduleNode *> leaves;
  collectLeaves(n, leaves);
  switch (n->kind) {
  case ScheduleNode::Kind::Domain: {
    out += ind + "Domain: { ";
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (i)
        out += "; ";
      out += leafSpace(leaves[i]);
    }
    out += " }\n";
    break;
  }
  case ScheduleNode::Kind::Band: {
    out += ind + "Band: { ";
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (i)
        out += "; ";
      out += leafSpace(leaves[i]) + " -> [" + n->counter + "]";
    }
    out += " | " + n->lower.str() + " <= " + n->counter + " < " +
           upperStr(n->uppers);
    if (n->step != 1)
      out += " step " + std::to_string(n->step);
    out += " }";
    if (n->reversed)
      out += " reversed";
    if (!n->loopId.empty() && n->loopId[0] != '@')
      out += " id(" + n->loopId + ")";
    out += "\n";
    break;
  }
  case ScheduleNode::Kind::Sequence:
    out += ind + "Sequence:\n";
    break;
  case ScheduleNode::Kind::Leaf:
    out += ind + "Leaf: " + leafSpace(n.get()) + "\n";
    return;
  }
  for (const auto &c : n->children)
    printNode(c, depth + 1, out);
}

} // namespace

std::string print_tree(const TreeRef &tree) {
  std::string out;
  printNode(tree, 0, out);
  return out;
}

//===----------------------------------------------------------------------===//
// Navigation
//===----------------------------------------------------------------------===//

ScheduleNode *find_band(const TreeRef &tree, const std::string &loopId) {
  if (!tree)
    return nullptr;
  if (tree->kind == ScheduleNode::Kind::Band && tree->loopId == loopId)
    return tree.get();
  for (const auto &c : tree->children)
    if (ScheduleNode *r = find_band(c, loopId))
      return r;
  return nullptr;
}

ScheduleNode *find_parent(const TreeRef &tree, const ScheduleNode *node) {
  if (!tree)
    return nullptr;
  for (const auto &c : tree->children) {
    if (c.get() == node)
      return tree.get();
    if (ScheduleNode *r = find_parent(c, node))
      return r;
  }
  return nullptr;
}

} // namespace loopforge
