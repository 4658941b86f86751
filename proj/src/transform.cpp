//===- transform.cpp - schedule-tree rewrites ----------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/transform.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace loopforge {

namespace {

ScheduleNode *bandOrThrow(const TreeRef &tree, const std::string &loop) {
  if (ScheduleNode *b = find_band(tree, loop))
    return b;
  throw Diag(ErrCode::UnresolvedLoopId, "no loop named '" + loop + "'");
}

/// shared_ptr handle of a node (needed to rewire ownership).
TreeRef refOf(const TreeRef &tree, const ScheduleNode *node) {
  if (tree.get() == node)
    return tree;
  for (const auto &c : tree->children)
    if (TreeRef r = refOf(c, node))
      return r;
  return nullptr;
}

void replaceChild(ScheduleNode *parent, const ScheduleNode *oldChild,
                  TreeRef newChild) {
  for (auto &c : parent->children)
    if (c.get() == oldChild) {
      c = std::move(newChild);
      return;
    }
}

void collectSymbols(const TreeRef &n, std::set<std::string> &out) {
  if (!n)
    return;
  if (n->kind == ScheduleNode::Kind::Band) {
    out.insert(n->counter);
    n->lower.collectSyms(out);
    for (const auto &u : n->uppers)
      u.collectSyms(out);
  }
  if (n->kind == ScheduleNode::Kind::Leaf)
    for (const auto &c : n->coords)
      for (const auto &[s, k] : c.expr.coeffs())
        if (k != 0)
          out.insert(s);
  for (const auto &c : n->children)
    collectSymbols(c, out);
}

std::string freshName(const std::set<std::string> &used,
                      const std::string &base) {
  if (!used.count(base))
    return base;
  for (int i = 2;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!used.count(cand))
      return cand;
  }
}

/// Substitutes a counter by an affine expression in leaf statements and
/// coordinates. Exprs in statements are rewritten with substituteVar.
void substStmt(Stmt &s, const std::string &name, const AffineExpr &repl) {
  switch (s.kind) {
  case Stmt::Kind::Assign:
    s.lhs = substituteVar(s.lhs, name, repl);
    s.rhs = substituteVar(s.rhs, name, repl);
    break;
  case Stmt::Kind::Call:
    for (auto &a : s.args)
      a = substituteVar(a, name, repl);
    break;
  default:
    for (auto &c : s.body)
      substStmt(*c, name, repl);
    break;
  }
}

void substTree(const TreeRef &n, const std::string &name,
               const AffineExpr &repl) {
  if (!n)
    return;
  if (n->kind == ScheduleNode::Kind::Band) {
    n->lower = n->lower.substituted(name, repl);
    for (auto &u : n->uppers)
      u = u.substituted(name, repl);
    if (n->counter == name) // shadowed below
      return;
  }
  if (n->kind == ScheduleNode::Kind::Leaf) {
    for (auto &c : n->coords)
      c.expr = c.expr.substitute(name, repl);
    substStmt(*n->stmt, name, repl);
    return;
  }
  for (const auto &c : n->children)
    substTree(c, name, repl);
}

/// Marks a replicated subtree: occurrence keys get a suffix so every leaf
/// stays unique, and band ids are dropped so the originals stay addressable.
void markCopy(const TreeRef &n, const std::string &suffix) {
  if (!n)
    return;
  if (n->kind == ScheduleNode::Kind::Band)
    n->loopId.clear();
  if (n->kind == ScheduleNode::Kind::Leaf)
    n->leafKey += suffix;
  for (const auto &c : n->children)
    markCopy(c, suffix);
}

std::optional<int64_t> tripCount(const ScheduleNode *b) {
  auto lo = b->lower.tryConstant();
  auto hi = BoundExpr::min(std::vector<BoundExpr>(b->uppers)).tryConstant();
  if (!lo || !hi)
    return std::nullopt;
  if (*hi <= *lo)
    return 0;
  return floordiv(*hi - 1 - *lo, b->step) + 1;
}

/// Strip-mines a band in place (tree already cloned). Returns (pit, strip).
std::pair<ScheduleNode *, ScheduleNode *>
stripmineBand(const TreeRef &tree, ScheduleNode *b, int64_t size,
              const std::string &pitId, const std::string &stripId) {
  if (size < 2)
    throw Diag(ErrCode::BadSize,
               "stripmine size must be at least 2, got " +
                   std::to_string(size));
  std::set<std::string> used;
  collectSymbols(tree, used);
  std::string pitCounter = !pitId.empty() && !used.count(pitId)
                               ? pitId
                               : freshName(used, b->counter + "1");

  TreeRef bRef = refOf(tree, b);
  ScheduleNode *parent = find_parent(tree, b);
  int64_t chunk = checkedMul(b->step, size);

  // Pit walks the chunk starts over the original range.
  TreeRef pit = ScheduleNode::band(pitCounter, b->lower, b->uppers,
                                   chunk, bRef);
  pit->reversed = b->reversed;
  pit->loopId = pitId;

  // The original band becomes the strip: [pit, min(U..., pit + chunk)),
  // original bounds first so emitted conditions read `i2 < n && i2 < i1+4`.
  b->lower = BoundExpr(AffineExpr::sym(pitCounter));
  b->uppers.push_back(BoundExpr(AffineExpr::sym(pitCounter) + chunk));
  if (!stripId.empty())
    b->loopId = stripId;

  replaceChild(parent, b, pit);
  return {pit.get(), b};
}

} // namespace

//===----------------------------------------------------------------------===//
// reverse
//===----------------------------------------------------------------------===//

RewriteResult reverse(const TreeRef &tree, const std::string &loop) {
  RewriteResult r;
  r.tree = clone_tree(tree);
  ScheduleNode *b = bandOrThrow(r.tree, loop);
  b->reversed = !b->reversed;
  r.bindings[loop] = b;
  return r;
}

//===----------------------------------------------------------------------===//
// interchange
//===----------------------------------------------------------------------===//

namespace {

/// Bands with the given ids in nesting order; they must form a directly
/// nested chain.
std::vector<ScheduleNode *> bandChain(const TreeRef &tree,
                                      const std::vector<std::string> &ids,
                                      ErrCode notNested) {
  std::set<std::string> want(ids.begin(), ids.end());
  std::vector<ScheduleNode *> chain;
  for (const auto &id : ids)
    bandOrThrow(tree, id);
  // Encounter order of a DFS is nesting order if they form a chain.
  std::function<void(const TreeRef &)> dfs = [&](const TreeRef &n) {
    if (!n)
      return;
    if (n->kind == ScheduleNode::Kind::Band && want.count(n->loopId))
      chain.push_back(n.get());
    for (const auto &c : n->children)
      dfs(c);
  };
  dfs(tree);
  for (size_t i = 0; i + 1 < chain.size(); ++i)
    if (chain[i]->children.size() != 1 ||
        chain[i]->children[0].get() != chain[i + 1])
      throw Diag(notNested, "loops " + chain[i]->loopId + " and " +
                                chain[i + 1]->loopId +
                                " are not perfectly nested");
  return chain;
}

void rewireChain(const TreeRef &tree, std::vector<ScheduleNode *> &oldChain,
                 std::vector<ScheduleNode *> &newChain) {
  TreeRef inner = oldChain.back()->children[0];
  ScheduleNode *parent = find_parent(tree, oldChain.front());
  std::vector<TreeRef> refs;
  for (ScheduleNode *n : newChain)
    refs.push_back(refOf(tree, n));
  replaceChild(parent, oldChain.front(), refs.front());
  for (size_t i = 0; i + 1 < refs.size(); ++i)
    refs[i]->children = {refs[i + 1]};
  refs.back()->children = {inner};
}

} // namespace

RewriteResult interchange(const TreeRef &tree,
                          const std::vector<std::string> &loops,
                          const std::vector<std::string> &permutation) {
  auto sortedA = loops, sortedB = permutation;
  std::sort(sortedA.begin(), sortedA.end());
  std::sort(sortedB.begin(), sortedB.end());
  if (sortedA != sortedB ||
      std::adjacent_find(sortedA.begin(), sortedA.end()) != sortedA.end())
    throw Diag(ErrCode::InvalidPermutation,
               "permutation is not a bijection on the target loops");

  RewriteResult r;
  r.tree = clone_tree(tree);
  std::vector<ScheduleNode *> chain =
      bandChain(r.tree, loops, ErrCode::NotPerfectlyNested);
  std::vector<ScheduleNode *> order;
  for (const auto &id : permutation)
    order.push_back(find_band(r.tree, id));
  rewireChain(r.tree, chain, order);
  for (ScheduleNode *n : order)
    r.bindings[n->loopId] = n;
  return r;
}

//===----------------------------------------------------------------------===//
// stripmine / tile
//===----------------------------------------------------------------------===//

RewriteResult stripmine(const TreeRef &tree, const std::string &loop,
                        int64_t size, const std::string &pitId,
                        const std::string &stripId) {
  RewriteResult r;
  r.tree = clone_tree(tree);
  ScheduleNode *b = bandOrThrow(r.tree, loop);
  auto [pit, strip] = stripmineBand(r.tree, b, size, pitId, stripId);
  if (!pitId.empty())
    r.bindings[pitId] = pit;
  if (!stripId.empty())
    r.bindings[stripId] = strip;
  return r;
}

RewriteResult tile(const TreeRef &tree, const std::vector<std::string> &loops,
                   const std::vector<int64_t> &sizes,
                   const std::vector<std::string> &pitIds,
                   const std::vector<std::string> &tileIds) {
  if (loops.empty() || sizes.size() != loops.size())
    throw Diag(ErrCode::ClauseArityError,
               "tile needs one size per target loop");
  for (int64_t s : sizes)
    if (s < 2)
      throw Diag(ErrCode::BadSize,
                 "tile size must be at least 2, got " + std::to_string(s));

  RewriteResult r;
  r.tree = clone_tree(tree);
  std::vector<ScheduleNode *> chain =
      bandChain(r.tree, loops, ErrCode::NotPerfectlyNested);
  if (chain.size() != loops.size())
    throw Diag(ErrCode::NotPerfectlyNested, "tile targets are not a nest");

  std::vector<ScheduleNode *> pits, strips;
  for (size_t i = 0; i < chain.size(); ++i) {
    auto [pit, strip] = stripmineBand(
        r.tree, chain[i], sizes[i], i < pitIds.size() ? pitIds[i] : "",
        i < tileIds.size() ? tileIds[i] : "");
    pits.push_back(pit);
    strips.push_back(strip);
  }
  // The chain is now pit0 strip0 pit1 strip1 ...; hoist all pits above all
  // strips, preserving relative order on both sides.
  std::vector<ScheduleNode *> oldChain, newChain;
  for (size_t i = 0; i < pits.size(); ++i) {
    oldChain.push_back(pits[i]);
    oldChain.push_back(strips[i]);
  }
  newChain = pits;
  newChain.insert(newChain.end(), strips.begin(), strips.end());
  if (pits.size() > 1)
    rewireChain(r.tree, oldChain, newChain);

  for (size_t i = 0; i < pits.size(); ++i) {
    if (i < pitIds.size() && !pitIds[i].empty())
      r.bindings[pitIds[i]] = pits[i];
    if (i < tileIds.size() && !tileIds[i].empty())
      r.bindings[tileIds[i]] = strips[i];
  }
  return r;
}

//===----------------------------------------------------------------------===//
// unroll
//===----------------------------------------------------------------------===//

namespace {

RewriteResult unrollFull(TreeRef cloned, ScheduleNode *b, int64_t fullCap) {
  auto trip = tripCount(b);
  if (!trip)
    throw Diag(ErrCode::FullUnrollTooLarge,
               "full unroll requires a constant trip count");
  if (*trip > fullCap)
    throw Diag(ErrCode::FullUnrollTooLarge,
               "full unroll of " + std::to_string(*trip) +
                   " iterations exceeds the cap of " + std::to_string(fullCap));
  int64_t lo = *b->lower.tryConstant();
  TreeRef child = b->children[0];
  std::vector<TreeRef> copies;
  for (int64_t t = 0; t < *trip; ++t) {
    int64_t iter = b->reversed ? *trip - 1 - t : t;
    TreeRef copy = clone_tree(child);
    substTree(copy, b->counter, AffineExpr(lo + iter * b->step));
    markCopy(copy, ".u" + std::to_string(t));
    copies.push_back(std::move(copy));
  }
  ScheduleNode *parent = find_parent(cloned, b);
  replaceChild(parent, b, ScheduleNode::sequence(std::move(copies)));
  RewriteResult r;
  r.tree = std::move(cloned);
  return r;
}

} // namespace

RewriteResult unroll(const TreeRef &tree, const std::string &loop,
                     int64_t factor, bool full, int64_t fullCap) {
  TreeRef cloned = clone_tree(tree);
  ScheduleNode *b = bandOrThrow(cloned, loop);
  if (full)
    return unrollFull(std::move(cloned), b, fullCap);
  if (factor < 2)
    throw Diag(ErrCode::BadFactor, "unroll factor must be at least 2, got " +
                                       std::to_string(factor));

  const int64_t s = b->step, f = factor;
  const BoundExpr origLower = b->lower;
  const std::vector<BoundExpr> origUppers = b->uppers;
  TreeRef origChild = b->children[0];
  auto trip = tripCount(b);

  // Replicated body: offset 0 keeps the original keys and band ids.
  std::vector<TreeRef> copies(static_cast<size_t>(f));
  for (int64_t t = 0; t < f; ++t) {
    int64_t offset = (b->reversed ? f - 1 - t : t) * s;
    if (offset == 0) {
      copies[static_cast<size_t>(t)] = origChild;
      continue;
    }
    TreeRef copy = clone_tree(origChild);
    substTree(copy, b->counter, AffineExpr::sym(b->counter) + offset);
    markCopy(copy, ".c" + std::to_string(offset / s));
    copies[static_cast<size_t>(t)] = std::move(copy);
  }
  b->step = checkedMul(s, f);
  b->children = {ScheduleNode::sequence(std::move(copies))};

  bool needEpilogue;
  BoundExpr epiLower;
  if (trip) {
    needEpilogue = *trip % f != 0;
    if (needEpilogue) {
      int64_t lo = *origLower.tryConstant();
      int64_t hi =
          *BoundExpr::min(std::vector<BoundExpr>(origUppers)).tryConstant();
      b->uppers = {BoundExpr(hi - s * (f - 1))};
      epiLower = BoundExpr(lo + s * f * (*trip / f));
    }
  } else {
    // Parametric trip count: shrink the main bound by s*(f-1) and keep a
    // guarded epilogue for the remainder.
    needEpilogue = true;
    std::vector<BoundExpr> shrunk;
    for (const auto &u : origUppers)
      shrunk.push_back(BoundExpr::add(u, BoundExpr(-s * (f - 1))));
    b->uppers = std::move(shrunk);
    BoundExpr minU = BoundExpr::min(std::vector<BoundExpr>(origUppers));
    BoundExpr groups = BoundExpr::floord(
        BoundExpr::add(BoundExpr::add(minU, BoundExpr::mul(origLower, -1)),
                       BoundExpr(s - 1)),
        checkedMul(s, f));
    epiLower = BoundExpr::max(
        {origLower,
         BoundExpr::add(origLower, BoundExpr::mul(groups, checkedMul(s, f)))});
  }

  RewriteResult r;
  if (needEpilogue) {
    TreeRef epiChild = clone_tree(origChild);
    markCopy(epiChild, ".e");
    TreeRef epi = ScheduleNode::band(b->counter, epiLower, origUppers, s,
                                     std::move(epiChild));
    epi->reversed = b->reversed;
    ScheduleNode *parent = find_parent(cloned, b);
    TreeRef bRef = refOf(cloned, b);
    std::vector<TreeRef> seq =
        b->reversed ? std::vector<TreeRef>{epi, bRef}
                    : std::vector<TreeRef>{bRef, epi};
    replaceChild(parent, b, ScheduleNode::sequence(std::move(seq)));
  }
  r.tree = std::move(cloned);
  r.bindings[loop] = b;
  return r;
}

//===----------------------------------------------------------------------===//
// distribute / fuse
//===----------------------------------------------------------------------===//

RewriteResult distribute(const TreeRef &tree, const std::string &loop,
                         const std::vector<std::string> &ids) {
  RewriteResult r;
  r.tree = clone_tree(tree);
  ScheduleNode *b = bandOrThrow(r.tree, loop);
  TreeRef child = b->children[0];
  if (child->kind != ScheduleNode::Kind::Sequence || child->children.size() < 2)
    throw Diag(ErrCode::NothingToDistribute,
               "loop '" + loop + "' has a single-statement body");
  if (!ids.empty() && ids.size() != child->children.size())
    throw Diag(ErrCode::ClauseArityError,
               "distribute ids(...) needs one id per distributed loop");

  std::vector<TreeRef> pieces;
  for (size_t i = 0; i < child->children.size(); ++i) {
    TreeRef piece = ScheduleNode::band(b->counter, b->lower, b->uppers,
                                       b->step, child->children[i]);
    piece->reversed = b->reversed;
    if (i < ids.size())
      piece->loopId = ids[i];
    pieces.push_back(std::move(piece));
  }
  ScheduleNode *parent = find_parent(r.tree, b);
  TreeRef seq = ScheduleNode::sequence(std::move(pieces));
  for (size_t i = 0; i < ids.size(); ++i)
    r.bindings[ids[i]] = seq->children[i].get();
  replaceChild(parent, b, std::move(seq));
  return r;
}

namespace {

bool sameRange(const ScheduleNode *a, const ScheduleNode *b) {
  return a->step == b->step && a->reversed == b->reversed &&
         a->lower == b->lower &&
         BoundExpr::min(std::vector<BoundExpr>(a->uppers)) ==
             BoundExpr::min(std::vector<BoundExpr>(b->uppers));
}

/// Fuses `count` adjacent band children of `seq` starting at `first`.
/// Returns the fused band. Works on nodes in place.
ScheduleNode *fuseRun(ScheduleNode *seq, size_t first, size_t count) {
  std::vector<TreeRef> bands(seq->children.begin() +
                                 static_cast<ptrdiff_t>(first),
                             seq->children.begin() +
                                 static_cast<ptrdiff_t>(first + count));
  for (const auto &n : bands)
    if (n->kind != ScheduleNode::Kind::Band)
      throw Diag(ErrCode::NonAdjacent, "fuse target is not a loop");
  for (size_t i = 1; i < bands.size(); ++i)
    if (!sameRange(bands[0].get(), bands[i].get()))
      throw Diag(ErrCode::RangeMismatch,
                 "fused loops have different iteration ranges");

  std::vector<TreeRef> bodies;
  for (const auto &n : bands) {
    if (n->counter != bands[0]->counter)
      substTree(n->children[0], n->counter,
                AffineExpr::sym(bands[0]->counter));
    bodies.push_back(n->children[0]);
  }
  bands[0]->children = {ScheduleNode::sequence(std::move(bodies))};
  seq->children.erase(seq->children.begin() + static_cast<ptrdiff_t>(first + 1),
                      seq->children.begin() +
                          static_cast<ptrdiff_t>(first + count));
  return bands[0].get();
}

} // namespace

RewriteResult fuse(const TreeRef &tree, const std::vector<std::string> &loops) {
  if (loops.size() < 2)
    throw Diag(ErrCode::NonAdjacent, "fuse needs at least two loops");
  RewriteResult r;
  r.tree = clone_tree(tree);
  std::vector<ScheduleNode *> bands;
  for (const auto &id : loops)
    bands.push_back(bandOrThrow(r.tree, id));
  ScheduleNode *parent = find_parent(r.tree, bands[0]);
  if (!parent || parent->kind != ScheduleNode::Kind::Sequence)
    throw Diag(ErrCode::NonAdjacent,
               "fuse targets are not sequence siblings");
  size_t first = 0;
  while (first < parent->children.size() &&
         parent->children[first].get() != bands[0])
    ++first;
  for (size_t i = 0; i < bands.size(); ++i) {
    size_t at = first + i;
    if (at >= parent->children.size() ||
        parent->children[at].get() != bands[i])
      throw Diag(ErrCode::NonAdjacent,
                 "fuse targets must be adjacent siblings in order");
  }
  ScheduleNode *fused = fuseRun(parent, first, bands.size());
  // A one-element sequence left behind collapses into its parent.
  if (parent->children.size() == 1) {
    if (ScheduleNode *gp = find_parent(r.tree, parent))
      replaceChild(gp, parent, parent->children[0]);
  }
  r.bindings[loops[0]] = fused;
  return r;
}

//===----------------------------------------------------------------------===//
// unroll_and_jam
//===----------------------------------------------------------------------===//

RewriteResult unroll_and_jam(const TreeRef &tree,
                             const std::string &unrollLoop,
                             const std::string &jamLoop, int64_t factor) {
  ScheduleNode *u = bandOrThrow(tree, unrollLoop);
  if (!jamLoop.empty() && jamLoop == unrollLoop)
    throw Diag(ErrCode::JamNotNested,
               "unroll_and_jam needs a jam loop strictly inside the "
               "unrolled loop");

  // Depth of the band chain from below `u` down to the jam loop.
  size_t levels = 0;
  const ScheduleNode *cur = u;
  bool found = jamLoop.empty();
  while (cur->children.size() == 1 &&
         cur->children[0]->kind == ScheduleNode::Kind::Band) {
    cur = cur->children[0].get();
    ++levels;
    if (!jamLoop.empty() && cur->loopId == jamLoop) {
      found = true;
      break;
    }
  }
  if (!jamLoop.empty() && !found)
    throw Diag(ErrCode::JamNotNested,
               "loop '" + jamLoop + "' is not perfectly nested inside '" +
                   unrollLoop + "'");
  if (levels == 0)
    throw Diag(ErrCode::JamNotNested,
               "no loop to jam into below '" + unrollLoop + "'");

  RewriteResult r = unroll(tree, unrollLoop, factor);
  ScheduleNode *b = find_band(r.tree, unrollLoop);
  for (size_t lvl = 0; lvl < levels; ++lvl) {
    ScheduleNode *seq = b->children[0].get();
    TreeRef seqRef = b->children[0];
    ScheduleNode *fused = fuseRun(seq, 0, seq->children.size());
    b->children = {seqRef->children[0]};
    b = fused;
  }
  r.bindings.clear();
  r.bindings[unrollLoop] = find_band(r.tree, unrollLoop);
  if (!jamLoop.empty())
    r.bindings[jamLoop] = b;
  return r;
}

} // namespace loopforge
