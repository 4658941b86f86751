//===- codegen.cpp - schedule tree to mini-C ---------------------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/codegen.hpp"

#include <functional>
#include <set>

namespace loopforge {

namespace {

//===----------------------------------------------------------------------===//
// Runtime check
//===----------------------------------------------------------------------===//

void classifyAccesses(const ExprRef &e, std::set<std::string> &accessed) {
  if (!e)
    return;
  if (e->kind == Expr::Kind::Access)
    accessed.insert(e->name);
  for (const ExprRef &a : e->args)
    classifyAccesses(a, accessed);
}

void classifyStmt(const Stmt &s, std::set<std::string> &written,
                  std::set<std::string> &accessed) {
  switch (s.kind) {
  case Stmt::Kind::Assign:
    if (s.lhs->kind == Expr::Kind::Access) {
      written.insert(s.lhs->name);
      accessed.insert(s.lhs->name);
      for (const ExprRef &a : s.lhs->args)
        classifyAccesses(a, accessed);
    }
    classifyAccesses(s.rhs, accessed);
    break;
  case Stmt::Kind::Call:
    for (const ExprRef &a : s.args)
      classifyAccesses(a, accessed);
    break;
  case Stmt::Kind::Loop:
  case Stmt::Kind::Block:
  case Stmt::Kind::If:
    classifyAccesses(s.init, accessed);
    classifyAccesses(s.bound, accessed);
    classifyAccesses(s.lhs, accessed);
    for (const StmtRef &c : s.body)
      classifyStmt(*c, written, accessed);
    for (const StmtRef &c : s.elseBody)
      classifyStmt(*c, written, accessed);
    break;
  }
}

//===----------------------------------------------------------------------===//
// Loop emission
//===----------------------------------------------------------------------===//

void stripPragmas(const StmtRef &s) {
  s->pragmas.clear();
  for (const StmtRef &c : s->body)
    stripPragmas(c);
  for (const StmtRef &c : s->elseBody)
    stripPragmas(c);
}

/// Re-renders every affine subexpression in canonical form, folding the
/// counter substitutions codegen applied (e.g. i2 - i1 under i2 = i1 + c4
/// becomes plain c4).
ExprRef foldAffine(const ExprRef &e) {
  if (!e)
    return e;
  if (e->kind != Expr::Kind::Access && e->kind != Expr::Kind::AddrOf)
    if (auto a = toAffine(e))
      return Expr::fromAffine(*a);
  auto n = std::make_shared<Expr>(*e);
  for (ExprRef &a : n->args)
    a = foldAffine(a);
  return n;
}

class Emitter {
public:
  Emitter(const Function &f, CodegenStyle style) : style(style) {
    collectNames(f);
    sourceNames = usedNames;
  }

  std::vector<StmtRef> emit(const TreeRef &tree) {
    std::vector<StmtRef> out;
    emitNode(tree, 0, out);
    return out;
  }

private:
  CodegenStyle style;
  std::set<std::string> usedNames; // source identifiers + emitted counters
  std::set<std::string> sourceNames;
  std::set<std::string> activeNames;
  // Pending renames/normalizations, applied to bounds and statements.
  std::vector<std::pair<std::string, AffineExpr>> substs;
  int freshIdx = 0;

  void collectNames(const Function &f) {
    for (const Param &p : f.params)
      usedNames.insert(p.name);
    for (const ArrayDecl &d : f.locals)
      usedNames.insert(d.name);
    std::function<void(const ExprRef &)> visitExpr = [&](const ExprRef &e) {
      if (!e)
        return;
      if (!e->name.empty())
        usedNames.insert(e->name);
      for (const ExprRef &a : e->args)
        visitExpr(a);
    };
    std::function<void(const StmtRef &)> visitStmt = [&](const StmtRef &s) {
      if (!s->counter.empty())
        usedNames.insert(s->counter);
      visitExpr(s->init);
      visitExpr(s->bound);
      visitExpr(s->lhs);
      visitExpr(s->rhs);
      for (const ExprRef &a : s->args)
        visitExpr(a);
      for (const StmtRef &c : s->body)
        visitStmt(c);
      for (const StmtRef &c : s->elseBody)
        visitStmt(c);
    };
    for (const StmtRef &s : f.body)
      visitStmt(s);
  }

  std::string freshCounter() {
    std::string n;
    do
      n = "c" + std::to_string(freshIdx++);
    while (usedNames.count(n));
    return n;
  }

  BoundExpr substBound(BoundExpr b) const {
    for (const auto &[name, repl] : substs)
      b = b.substituted(name, repl);
    return b;
  }

  ExprRef substExpr(ExprRef e) const {
    if (!e)
      return e;
    for (const auto &[name, repl] : substs)
      e = substituteVar(e, name, repl);
    return e;
  }

  void emitNode(const TreeRef &n, int depth, std::vector<StmtRef> &out) {
    switch (n->kind) {
    case ScheduleNode::Kind::Domain:
    case ScheduleNode::Kind::Sequence:
      for (const TreeRef &c : n->children)
        emitNode(c, depth, out);
      return;
    case ScheduleNode::Kind::Band:
      emitBand(n, depth, out);
      return;
    case ScheduleNode::Kind::Leaf: {
      StmtRef s = n->stmt->clone();
      stripPragmas(s);
      s->lhs = foldAffine(substExpr(s->lhs));
      s->rhs = foldAffine(substExpr(s->rhs));
      for (ExprRef &a : s->args)
        a = foldAffine(substExpr(a));
      out.push_back(std::move(s));
      return;
    }
    }
  }

  void emitBand(const TreeRef &n, int depth, std::vector<StmtRef> &out) {
    BoundExpr lower = substBound(n->lower);
    std::vector<BoundExpr> uppers;
    for (const BoundExpr &u : n->uppers)
      uppers.push_back(substBound(u));
    BoundExpr minUpper = BoundExpr::min(uppers);

    auto loop = std::make_shared<Stmt>();
    loop->kind = Stmt::Kind::Loop;

    bool normalized = style == CodegenStyle::Normalized && !n->reversed &&
                      lower.isAffine();
    size_t substMark = substs.size();
    if (normalized) {
      // counter = lower + step * cD, cD in 0 ..= floord(minUpper-1-lower, s).
      // Depth-indexed names; sequential siblings may share one, which is
      // valid since the scopes do not overlap.
      std::string name = "c" + std::to_string(depth);
      while (sourceNames.count(name))
        name += "_";
      AffineExpr cs = AffineExpr::sym(name);
      substs.emplace_back(n->counter, lower.affine() + cs * n->step);
      BoundExpr ub = BoundExpr::floord(
          BoundExpr::add(minUpper, BoundExpr(lower.affine() * -1 +
                                             AffineExpr(-1))),
          n->step);
      loop->counter = name;
      loop->init = Expr::intLit(0);
      loop->cmp = CmpOp::LE;
      loop->bound = ub.toExpr();
      loop->step = 1;
    } else {
      std::string name = !n->loopId.empty() && n->loopId[0] != '@'
                             ? n->loopId
                             : n->counter;
      if (activeNames.count(name) ||
          (style == CodegenStyle::Normalized && name.empty()))
        name = freshCounter();
      if (name != n->counter)
        substs.emplace_back(n->counter, AffineExpr::sym(name));
      loop->counter = name;
      if (n->reversed) {
        // Last iteration value down to the lower bound.
        BoundExpr last = BoundExpr::add(
            lower, BoundExpr::mul(
                       BoundExpr::floord(
                           BoundExpr::add(
                               minUpper,
                               BoundExpr::mul(BoundExpr::add(lower, 1), -1)),
                           n->step),
                       n->step));
        loop->init = last.toExpr();
        loop->cmp = CmpOp::GE;
        loop->bound = lower.toExpr();
        loop->step = -n->step;
      } else {
        loop->init = lower.toExpr();
        loop->cmp = CmpOp::LT;
        loop->bound = minUpper.toExpr();
        loop->step = n->step;
      }
    }

    activeNames.insert(loop->counter);
    usedNames.insert(loop->counter);
    emitNode(n->children[0], depth + 1, loop->body);
    activeNames.erase(loop->counter);
    substs.resize(substMark);
    out.push_back(std::move(loop));
  }
};

ExprRef zeroAddr(const Param &p) {
  std::vector<ExprRef> zeros(p.dims.size());
  for (ExprRef &z : zeros)
    z = Expr::intLit(0);
  return Expr::addrOf(Expr::access(p.name, std::move(zeros)));
}

ExprRef elemCount(const Param &p) {
  ExprRef e = p.dims[0];
  for (size_t i = 1; i < p.dims.size(); ++i)
    e = Expr::binary('*', e, p.dims[i]);
  return e;
}

} // namespace

RuntimeCheck build_runtime_check(const Function &f,
                                 const std::vector<Directive> &plan) {
  RuntimeCheck check;
  if (plan.empty())
    return check;
  std::set<std::string> written, accessed;
  for (const StmtRef &s : f.body)
    classifyStmt(*s, written, accessed);
  std::vector<std::string> arrays;
  for (const Param &p : f.params)
    if (!p.dims.empty() && accessed.count(p.name))
      arrays.push_back(p.name);
  for (size_t i = 0; i < arrays.size(); ++i)
    for (size_t j = i + 1; j < arrays.size(); ++j)
      if (written.count(arrays[i]) || written.count(arrays[j]))
        check.pairs.emplace_back(arrays[i], arrays[j]);
  return check;
}

Function generate(const TreeRef &tree, const Function &original,
                  const RuntimeCheck &check,
                  const std::vector<ArrayDecl> &packedDecls,
                  CodegenStyle style) {
  Function out;
  out.retType = original.retType;
  out.name = original.name;
  out.params = original.params;
  out.locals = original.locals;
  out.loc = original.loc;
  for (const ArrayDecl &d : packedDecls)
    out.locals.push_back(d);

  std::vector<StmtRef> transformed = Emitter(original, style).emit(tree);

  if (check.trivial()) {
    out.body = std::move(transformed);
    return out;
  }

  ExprRef cond;
  for (const auto &[a, b] : check.pairs) {
    const Param *pa = original.findParam(a);
    const Param *pb = original.findParam(b);
    ExprRef c = Expr::call("no_overlap", {zeroAddr(*pa), elemCount(*pa),
                                          zeroAddr(*pb), elemCount(*pb)});
    cond = cond ? Expr::binary('A', cond, c) : c;
  }

  auto guard = std::make_shared<Stmt>();
  guard->kind = Stmt::Kind::If;
  guard->lhs = cond;
  guard->body = std::move(transformed);
  for (const StmtRef &s : original.body) {
    StmtRef c = s->clone();
    stripPragmas(c);
    guard->elseBody.push_back(std::move(c));
  }
  out.body.push_back(std::move(guard));
  return out;
}

std::string emit_c(const Program &p) {
  std::string out =
      "#define min(a, b) (((a) < (b)) ? (a) : (b))\n"
      "#define max(a, b) (((a) > (b)) ? (a) : (b))\n"
      "#define floord(n, d) (((n) < 0) ? -((-(n) + (d) - 1) / (d)) : (n) / "
      "(d))\n"
      "#define no_overlap(b1, n1, b2, n2) ((b1) + (n1) <= (b2) || (b2) + "
      "(n2) <= (b1))\n"
      "#include <stdlib.h>\n"
      "\n";
  PrintOptions opts;
  opts.includePragmas = false;
  out += printProgram(p, opts);
  return out;
}

} // namespace loopforge
