//===- bound.cpp - loop bound expressions -------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/bound.hpp"

#include <algorithm>
#include <cassert>

namespace loopforge {

BoundExpr BoundExpr::add(BoundExpr a, BoundExpr b) {
  if (a.isAffine() && b.isAffine())
    return BoundExpr(a.affine_ + b.affine_);
  // Distribute an affine addend into min/max so strip-loop bounds fold to
  // the min(size-1, remainder) form.
  if ((a.kind_ == Kind::Min || a.kind_ == Kind::Max) && b.isAffine()) {
    std::vector<BoundExpr> kids;
    for (const BoundExpr &k : a.kids_)
      kids.push_back(add(k, b));
    return a.kind_ == Kind::Min ? min(std::move(kids)) : max(std::move(kids));
  }
  if ((b.kind_ == Kind::Min || b.kind_ == Kind::Max) && a.isAffine())
    return add(std::move(b), std::move(a));
  BoundExpr r;
  r.kind_ = Kind::Add;
  r.kids_ = {std::move(a), std::move(b)};
  return r;
}

BoundExpr BoundExpr::mul(BoundExpr a, int64_t k) {
  if (a.isAffine())
    return BoundExpr(a.affine_ * k);
  BoundExpr r;
  r.kind_ = Kind::MulConst;
  r.k_ = k;
  r.kids_ = {std::move(a)};
  return r;
}

BoundExpr BoundExpr::extremum(std::vector<BoundExpr> items, Kind kind,
                              bool minimum) {
  assert(!items.empty() && "extremum of nothing");
  // Flatten nested nodes of the same kind and drop duplicates.
  std::vector<BoundExpr> flat;
  for (auto &it : items) {
    if (it.kind() == kind)
      for (const auto &k : it.operands())
        flat.push_back(k);
    else
      flat.push_back(std::move(it));
  }
  std::vector<BoundExpr> uniq;
  for (auto &it : flat)
    if (std::find(uniq.begin(), uniq.end(), it) == uniq.end())
      uniq.push_back(std::move(it));
  // Fold constants into one entry.
  std::optional<int64_t> best;
  std::vector<BoundExpr> keep;
  for (auto &it : uniq) {
    if (auto c = it.tryConstant())
      best = best ? (minimum ? std::min(*best, *c) : std::max(*best, *c)) : *c;
    else
      keep.push_back(std::move(it));
  }
  if (best)
    keep.push_back(BoundExpr(*best));
  if (keep.size() == 1)
    return keep[0];
  BoundExpr r;
  r.kind_ = kind;
  r.kids_ = std::move(keep);
  return r;
}

BoundExpr BoundExpr::min(std::vector<BoundExpr> items) {
  if (items.size() == 1)
    return items[0];
  return extremum(std::move(items), Kind::Min, true);
}

BoundExpr BoundExpr::max(std::vector<BoundExpr> items) {
  if (items.size() == 1)
    return items[0];
  return extremum(std::move(items), Kind::Max, false);
}

BoundExpr BoundExpr::floord(BoundExpr a, int64_t den) {
  assert(den > 0 && "floord needs a positive divisor");
  if (den == 1)
    return a;
  if (auto c = a.tryConstant())
    return BoundExpr(floordiv(*c, den));
  // Floor division is monotone, so it distributes over min/max.
  if (a.kind() == Kind::Min || a.kind() == Kind::Max) {
    std::vector<BoundExpr> kids;
    for (const BoundExpr &k : a.operands())
      kids.push_back(floord(k, den));
    return a.kind() == Kind::Min ? min(std::move(kids))
                                 : max(std::move(kids));
  }
  BoundExpr r;
  r.kind_ = Kind::Floord;
  r.k_ = den;
  r.kids_ = {std::move(a)};
  return r;
}

std::optional<AffineExpr> BoundExpr::tryAffine() const {
  if (kind_ == Kind::Affine)
    return affine_;
  return std::nullopt;
}

std::optional<int64_t> BoundExpr::tryConstant() const {
  if (kind_ == Kind::Affine)
    return affine_.tryConstant();
  return std::nullopt;
}

int64_t BoundExpr::eval(const std::map<std::string, int64_t> &env) const {
  switch (kind_) {
  case Kind::Affine:
    return affine_.eval(env);
  case Kind::Add:
    return checkedAdd(kids_[0].eval(env), kids_[1].eval(env));
  case Kind::MulConst:
    return checkedMul(kids_[0].eval(env), k_);
  case Kind::Min:
  case Kind::Max: {
    int64_t best = kids_[0].eval(env);
    for (size_t i = 1; i < kids_.size(); ++i)
      best = kind_ == Kind::Min ? std::min(best, kids_[i].eval(env))
                                : std::max(best, kids_[i].eval(env));
    return best;
  }
  case Kind::Floord:
    return floordiv(kids_[0].eval(env), k_);
  }
  return 0;
}

BoundExpr BoundExpr::substituted(const std::string &name,
                                 const AffineExpr &repl) const {
  switch (kind_) {
  case Kind::Affine:
    return BoundExpr(affine_.substitute(name, repl));
  case Kind::Add:
    return add(kids_[0].substituted(name, repl),
               kids_[1].substituted(name, repl));
  case Kind::MulConst:
    return mul(kids_[0].substituted(name, repl), k_);
  case Kind::Min:
  case Kind::Max: {
    std::vector<BoundExpr> items;
    for (const auto &k : kids_)
      items.push_back(k.substituted(name, repl));
    return kind_ == Kind::Min ? min(std::move(items)) : max(std::move(items));
  }
  case Kind::Floord:
    return floord(kids_[0].substituted(name, repl), k_);
  }
  return *this;
}

void BoundExpr::collectSyms(std::set<std::string> &out) const {
  if (kind_ == Kind::Affine) {
    for (const auto &[s, c] : affine_.coeffs())
      if (c != 0)
        out.insert(s);
    return;
  }
  for (const auto &k : kids_)
    k.collectSyms(out);
}

bool BoundExpr::references(const std::string &name) const {
  std::set<std::string> syms;
  collectSyms(syms);
  return syms.count(name) != 0;
}

ExprRef BoundExpr::toExpr() const {
  switch (kind_) {
  case Kind::Affine:
    return Expr::fromAffine(affine_);
  case Kind::Add:
    return Expr::binary('+', kids_[0].toExpr(), kids_[1].toExpr());
  case Kind::MulConst:
    return Expr::binary('*', Expr::intLit(k_), kids_[0].toExpr());
  case Kind::Min:
  case Kind::Max: {
    // min/max are binary helpers; fold left for longer lists.
    const char *fn = kind_ == Kind::Min ? "min" : "max";
    ExprRef acc = kids_[0].toExpr();
    for (size_t i = 1; i < kids_.size(); ++i)
      acc = Expr::call(fn, {acc, kids_[i].toExpr()});
    return acc;
  }
  case Kind::Floord:
    return Expr::call("floord", {kids_[0].toExpr(), Expr::intLit(k_)});
  }
  return Expr::intLit(0);
}

std::string BoundExpr::str() const { return printExpr(toExpr()); }

bool BoundExpr::operator==(const BoundExpr &o) const {
  return kind_ == o.kind_ && affine_ == o.affine_ && k_ == o.k_ &&
         kids_ == o.kids_;
}

} // namespace loopforge
