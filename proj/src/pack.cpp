//===- pack.cpp - array packing ----------------------------------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/pack.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace loopforge {

namespace {

/// Range of one interior band counter, with the nesting depth inside the
/// placement subtree.
struct CounterRange {
  BoundExpr lo;
  BoundExpr hi; // inclusive
  int depth = 0;
};

using RangeMap = std::map<std::string, CounterRange>;

/// Multiplies a bound by a constant, distributing over min/max (flipping
/// them when the factor is negative) so interval endpoints stay tight.
BoundExpr mulBound(const BoundExpr &b, int64_t k) {
  if (k == 1)
    return b;
  if (b.isAffine())
    return BoundExpr(b.affine() * k);
  if (b.kind() == BoundExpr::Kind::Min || b.kind() == BoundExpr::Kind::Max) {
    std::vector<BoundExpr> kids;
    for (const BoundExpr &o : b.operands())
      kids.push_back(mulBound(o, k));
    bool isMin = (b.kind() == BoundExpr::Kind::Min) == (k > 0);
    return isMin ? BoundExpr::min(std::move(kids))
                 : BoundExpr::max(std::move(kids));
  }
  return BoundExpr::mul(b, k);
}

/// Endpoint (lower when !hi, upper when hi) of an affine expression over the
/// interior counter ranges. Exterior symbols stay symbolic.
BoundExpr affineEndpoint(const AffineExpr &e, const RangeMap &ranges,
                         bool hi) {
  AffineExpr exterior(e.constant());
  BoundExpr res = BoundExpr(AffineExpr(0));
  bool any = false;
  for (const auto &[sym, k] : e.coeffs()) {
    auto it = ranges.find(sym);
    if (it == ranges.end()) {
      exterior = exterior + AffineExpr::sym(sym, k);
      continue;
    }
    bool wantHi = (k > 0) == hi;
    const BoundExpr &end = wantHi ? it->second.hi : it->second.lo;
    res = any ? BoundExpr::add(res, mulBound(end, k)) : mulBound(end, k);
    any = true;
  }
  return any ? BoundExpr::add(res, BoundExpr(exterior)) : BoundExpr(exterior);
}

BoundExpr boundEndpoint(const BoundExpr &b, const RangeMap &ranges, bool hi) {
  switch (b.kind()) {
  case BoundExpr::Kind::Affine:
    return affineEndpoint(b.affine(), ranges, hi);
  case BoundExpr::Kind::Add:
    return BoundExpr::add(boundEndpoint(b.operands()[0], ranges, hi),
                          boundEndpoint(b.operands()[1], ranges, hi));
  case BoundExpr::Kind::MulConst:
    return mulBound(boundEndpoint(b.operands()[0], ranges,
                                  b.constArg() > 0 ? hi : !hi),
                    b.constArg());
  case BoundExpr::Kind::Min:
  case BoundExpr::Kind::Max: {
    std::vector<BoundExpr> kids;
    for (const BoundExpr &o : b.operands())
      kids.push_back(boundEndpoint(o, ranges, hi));
    return b.kind() == BoundExpr::Kind::Min ? BoundExpr::min(std::move(kids))
                                            : BoundExpr::max(std::move(kids));
  }
  case BoundExpr::Kind::Floord:
    return BoundExpr::floord(boundEndpoint(b.operands()[0], ranges, hi),
                             b.constArg());
  }
  return b;
}

/// A constant known to be >= the bound's value, when one exists.
std::optional<int64_t> constUpper(const BoundExpr &b) {
  switch (b.kind()) {
  case BoundExpr::Kind::Affine:
    return b.affine().tryConstant();
  case BoundExpr::Kind::Add: {
    auto a = constUpper(b.operands()[0]);
    auto c = constUpper(b.operands()[1]);
    if (a && c)
      return *a + *c;
    return std::nullopt;
  }
  case BoundExpr::Kind::MulConst: {
    // Only safe for nonnegative factors without a lower-bound analysis.
    if (b.constArg() < 0)
      return std::nullopt;
    auto a = constUpper(b.operands()[0]);
    if (a)
      return *a * b.constArg();
    return std::nullopt;
  }
  case BoundExpr::Kind::Min: {
    std::optional<int64_t> best;
    for (const BoundExpr &o : b.operands())
      if (auto c = constUpper(o))
        best = best ? std::min(*best, *c) : *c;
    return best;
  }
  case BoundExpr::Kind::Max: {
    std::optional<int64_t> best;
    for (const BoundExpr &o : b.operands()) {
      auto c = constUpper(o);
      if (!c)
        return std::nullopt;
      best = best ? std::max(*best, *c) : *c;
    }
    return best;
  }
  case BoundExpr::Kind::Floord: {
    auto a = constUpper(b.operands()[0]);
    if (a)
      return floordiv(*a, b.constArg());
    return std::nullopt;
  }
  }
  return std::nullopt;
}

/// One affine access to the packed array.
struct PackedAccess {
  std::vector<AffineExpr> subs;
  int depth = 0; // deepest interior band the leaf sits under
};

void collectRanges(const TreeRef &n, int depth, RangeMap &ranges) {
  if (n->kind == ScheduleNode::Kind::Band) {
    CounterRange r;
    r.depth = depth;
    r.lo = boundEndpoint(n->lower, ranges, false);
    std::vector<BoundExpr> his;
    for (const BoundExpr &u : n->uppers)
      his.push_back(BoundExpr::add(boundEndpoint(u, ranges, true), -1));
    r.hi = BoundExpr::min(std::move(his));
    ranges[n->counter] = r;
    collectRanges(n->children[0], depth + 1, ranges);
    return;
  }
  for (const TreeRef &c : n->children)
    collectRanges(c, depth, ranges);
}

void visitAccessExprs(const ExprRef &e, const std::string &array,
                      const std::function<void(const ExprRef &)> &fn) {
  if (!e)
    return;
  if (e->kind == Expr::Kind::Access && e->name == array)
    fn(e);
  for (const ExprRef &a : e->args)
    visitAccessExprs(a, array, fn);
}

void collectAccesses(const TreeRef &n, const std::string &array, int depth,
                     std::vector<PackedAccess> &out, SourceLoc &anyLoc) {
  if (n->kind == ScheduleNode::Kind::Band) {
    collectAccesses(n->children[0], array, depth + 1, out, anyLoc);
    return;
  }
  if (n->kind != ScheduleNode::Kind::Leaf) {
    for (const TreeRef &c : n->children)
      collectAccesses(c, array, depth, out, anyLoc);
    return;
  }
  if (n->isCopy)
    return;
  const Stmt &s = *n->stmt;
  if (s.kind == Stmt::Kind::Assign && s.lhs->kind == Expr::Kind::Access &&
      s.lhs->name == array)
    throw Diag(ErrCode::WriteWithoutCopyOutSupport,
               "packed array '" + array + "' is written inside the subtree",
               s.loc);
  auto handle = [&](const ExprRef &acc) {
    PackedAccess pa;
    pa.depth = depth;
    for (const ExprRef &sub : acc->args) {
      auto a = toAffine(sub);
      if (!a)
        throw Diag(ErrCode::NonAffinePack,
                   "non-affine subscript in access to '" + array + "'",
                   acc->loc);
      pa.subs.push_back(*a);
    }
    anyLoc = acc->loc;
    out.push_back(std::move(pa));
  };
  visitAccessExprs(s.rhs, array, handle);
  if (s.lhs)
    for (const ExprRef &sub : s.lhs->args)
      visitAccessExprs(sub, array, handle);
  for (const ExprRef &a : s.args)
    visitAccessExprs(a, array, handle);
}

ExprRef rewriteExpr(const ExprRef &e, const std::string &array,
                    const PackedArrayDecl &decl) {
  if (!e)
    return e;
  std::vector<ExprRef> args;
  for (const ExprRef &a : e->args)
    args.push_back(rewriteExpr(a, array, decl));
  if (e->kind == Expr::Kind::Access && e->name == array) {
    std::vector<ExprRef> subs;
    for (int64_t d : decl.layout) {
      auto a = toAffine(args[d]);
      subs.push_back(Expr::fromAffine(*a - decl.base[d]));
    }
    return Expr::access(decl.name, std::move(subs), e->loc);
  }
  auto n = std::make_shared<Expr>(*e);
  n->args = std::move(args);
  return n;
}

void rewriteLeaves(const TreeRef &n, const std::string &array,
                   const PackedArrayDecl &decl) {
  if (n->kind == ScheduleNode::Kind::Leaf) {
    if (n->isCopy)
      return;
    Stmt &s = *n->stmt;
    s.lhs = rewriteExpr(s.lhs, array, decl);
    s.rhs = rewriteExpr(s.rhs, array, decl);
    for (ExprRef &a : s.args)
      a = rewriteExpr(a, array, decl);
    return;
  }
  for (const TreeRef &c : n->children)
    rewriteLeaves(c, array, decl);
}

void collectCounters(const TreeRef &n, std::set<std::string> &out) {
  if (n->kind == ScheduleNode::Kind::Band)
    out.insert(n->counter);
  for (const TreeRef &c : n->children)
    collectCounters(c, out);
}

std::vector<BoundExpr> minMembers(const BoundExpr &b) {
  if (b.kind() == BoundExpr::Kind::Min)
    return b.operands();
  return {b};
}

} // namespace

ArrayDecl PackedArrayDecl::toDecl() const {
  ArrayDecl d;
  d.type = type;
  d.name = name;
  d.heap = heap;
  for (int64_t e : extents)
    d.dims.push_back(Expr::intLit(e));
  return d;
}

PackResult pack(const TreeRef &input, const std::string &placementLoop,
                const std::string &array, const Function &f, bool heap,
                const std::vector<int64_t> &layout) {
  TreeRef tree = clone_tree(input);
  ScheduleNode *pl = find_band(tree, placementLoop);
  if (!pl)
    throw Diag(ErrCode::UnresolvedLoopId,
               "no loop '" + placementLoop + "' for pack");
  const std::vector<ExprRef> *dims = f.arrayDims(array);
  if (!dims || dims->empty())
    throw Diag(ErrCode::NonAffinePack, "'" + array + "' is not an array");
  size_t rank = dims->size();

  // The placement band subtree: wrap the raw pointer for the tree walkers.
  TreeRef plRef;
  std::function<void(const TreeRef &)> findRef = [&](const TreeRef &n) {
    for (const TreeRef &c : n->children) {
      if (c.get() == pl)
        plRef = c;
      else
        findRef(c);
    }
  };
  findRef(tree);

  RangeMap ranges;
  collectRanges(plRef, 0, ranges);

  std::vector<PackedAccess> accesses;
  SourceLoc loc;
  collectAccesses(plRef, array, 0, accesses, loc);
  if (accesses.empty())
    throw Diag(ErrCode::EmptyFootprint,
               "'" + array + "' is not accessed under loop '" +
                   placementLoop + "'");
  for (const PackedAccess &a : accesses)
    if (a.subs.size() != rank)
      throw Diag(ErrCode::NonAffinePack,
                 "access rank mismatch for '" + array + "'", loc);

  PackedArrayDecl decl;
  decl.name = "Packed_" + array;
  decl.type = f.arrayType(array);
  decl.origin = array;
  decl.heap = heap;

  // Bounding box per origin dimension.
  std::vector<BoundExpr> counts(rank);
  std::vector<int64_t> extents(rank);
  decl.base.resize(rank);
  for (size_t d = 0; d < rank; ++d) {
    // Base: the smallest per-access affine lower endpoint; the accesses must
    // agree up to a constant shift.
    std::optional<AffineExpr> base;
    for (const PackedAccess &a : accesses) {
      BoundExpr lo = affineEndpoint(a.subs[d], ranges, false);
      auto aff = lo.tryAffine();
      if (!aff)
        throw Diag(ErrCode::ParametricFootprint,
                   "box base for '" + array + "' dimension " +
                       std::to_string(d) + " is not affine",
                   loc);
      if (!base) {
        base = aff;
      } else {
        auto diff = (*aff - *base).tryConstant();
        if (!diff)
          throw Diag(ErrCode::ParametricFootprint,
                     "accesses to '" + array + "' disagree non-constantly",
                     loc);
        if (*diff < 0)
          base = aff;
      }
    }
    decl.base[d] = *base;

    std::optional<int64_t> ext;
    std::optional<BoundExpr> count;
    for (const PackedAccess &a : accesses) {
      BoundExpr hi = affineEndpoint(a.subs[d], ranges, true);
      BoundExpr c =
          BoundExpr::add(hi, BoundExpr(*base * -1 + AffineExpr(1)));
      auto cu = constUpper(c);
      if (!cu)
        throw Diag(ErrCode::ParametricFootprint,
                   "footprint of '" + array + "' dimension " +
                       std::to_string(d) + " has no constant extent",
                   loc);
      ext = ext ? std::max(*ext, *cu) : *cu;
      if (!count)
        count = c;
      else if (!(*count == c))
        count = BoundExpr::max({*count, c});
    }
    if (*ext <= 0)
      throw Diag(ErrCode::EmptyFootprint,
                 "empty footprint for '" + array + "' dimension " +
                     std::to_string(d),
                 loc);
    extents[d] = *ext;
    counts[d] = *count;
  }

  // Layout: deepest-varying subscript last, unless given explicitly.
  std::vector<int64_t> order(rank);
  std::iota(order.begin(), order.end(), 0);
  if (!layout.empty()) {
    if (layout.size() != rank)
      throw Diag(ErrCode::ClauseArityError,
                 "layout() must list every dimension once", loc);
    order = layout;
    auto check = order;
    std::sort(check.begin(), check.end());
    for (size_t i = 0; i < rank; ++i)
      if (check[i] != static_cast<int64_t>(i))
        throw Diag(ErrCode::ClauseArityError,
                   "layout() is not a permutation", loc);
  } else {
    std::vector<int> depth(rank, -1);
    for (size_t d = 0; d < rank; ++d)
      for (const PackedAccess &a : accesses)
        for (const auto &[sym, k] : a.subs[d].coeffs()) {
          auto it = ranges.find(sym);
          if (it != ranges.end())
            depth[d] = std::max(depth[d], it->second.depth);
        }
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return depth[a] < depth[b]; });
  }
  // A dimension whose box holds a single element carries no information in
  // the packed buffer; drop it (keeping at least one dimension).
  {
    std::vector<int64_t> kept;
    for (int64_t d : order)
      if (extents[d] > 1)
        kept.push_back(d);
    if (kept.empty())
      kept.push_back(order.back());
    order = std::move(kept);
  }
  size_t prank = order.size();
  decl.layout = order;
  for (int64_t d : order)
    decl.extents.push_back(extents[d]);

  // Rewrite interior accesses to the packed buffer.
  rewriteLeaves(plRef, array, decl);

  // Copy-in nest: one band per packed dimension, counting the live part of
  // the box, with the origin subscripts offset by the box base.
  std::set<std::string> used;
  collectCounters(tree, used);
  for (const Param &p : f.params)
    used.insert(p.name);
  std::vector<std::string> copyCtr;
  int fresh = 0;
  for (size_t k = 0; k < prank; ++k) {
    std::string n;
    do
      n = "t" + std::to_string(fresh++);
    while (used.count(n));
    used.insert(n);
    copyCtr.push_back(n);
  }

  auto copyStmt = std::make_shared<Stmt>();
  copyStmt->kind = Stmt::Kind::Assign;
  copyStmt->name = decl.name + "_copyin";
  copyStmt->assignOp = '=';
  {
    std::vector<ExprRef> subs;
    for (size_t k = 0; k < prank; ++k)
      subs.push_back(Expr::var(copyCtr[k]));
    copyStmt->lhs = Expr::access(decl.name, std::move(subs));
    std::vector<ExprRef> osubs(rank);
    for (size_t k = 0; k < prank; ++k) {
      int64_t d = order[k];
      osubs[d] = Expr::fromAffine(decl.base[d] + AffineExpr::sym(copyCtr[k]));
    }
    // Dropped single-element dimensions read from the box base directly.
    for (size_t d = 0; d < rank; ++d)
      if (!osubs[d])
        osubs[d] = Expr::fromAffine(decl.base[d]);
    copyStmt->rhs = Expr::access(array, std::move(osubs));
  }
  std::vector<Coord> coords;
  for (size_t k = 0; k < prank; ++k)
    coords.push_back({copyCtr[k], AffineExpr::sym(copyCtr[k])});
  TreeRef copyNode = ScheduleNode::leaf(copyStmt, coords, decl.name + ".cp");
  copyNode->isCopy = true;
  for (size_t k = prank; k-- > 0;)
    copyNode = ScheduleNode::band(copyCtr[k], BoundExpr(AffineExpr(0)),
                                  minMembers(counts[order[k]]), 1,
                                  std::move(copyNode));

  // Insert immediately before the placement band.
  ScheduleNode *parent = find_parent(tree, pl);
  auto it = std::find(parent->children.begin(), parent->children.end(), plRef);
  if (parent->kind == ScheduleNode::Kind::Sequence)
    parent->children.insert(it, copyNode);
  else
    *it = ScheduleNode::sequence({copyNode, plRef});

  return {tree, decl};
}

} // namespace loopforge
