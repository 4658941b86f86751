//===- bound.hpp - loop bound expressions --------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_BOUND_HPP
#define LOOPFORGE_BOUND_HPP

#include "loopforge/affine.hpp"
#include "loopforge/ast.hpp"

#include <set>
#include <vector>

namespace loopforge {

/// A loop bound: affine expressions closed under addition, multiplication by
/// a constant, min, and floor division by a positive constant. Affine covers
/// almost every bound; min appears in strip-mined uppers and floor division
/// in unroll epilogue lowers.
class BoundExpr {
public:
  enum class Kind { Affine, Add, MulConst, Min, Max, Floord };

  BoundExpr() : kind_(Kind::Affine) {}
  /*implicit*/ BoundExpr(AffineExpr a) : kind_(Kind::Affine), affine_(std::move(a)) {}
  /*implicit*/ BoundExpr(int64_t c) : BoundExpr(AffineExpr(c)) {}

  static BoundExpr add(BoundExpr a, BoundExpr b);
  static BoundExpr mul(BoundExpr a, int64_t k);
  static BoundExpr min(std::vector<BoundExpr> items);
  static BoundExpr max(std::vector<BoundExpr> items);
  static BoundExpr floord(BoundExpr a, int64_t den);

  Kind kind() const { return kind_; }
  const AffineExpr &affine() const { return affine_; }
  int64_t constArg() const { return k_; }
  const std::vector<BoundExpr> &operands() const { return kids_; }

  bool isAffine() const { return kind_ == Kind::Affine; }
  std::optional<AffineExpr> tryAffine() const;
  std::optional<int64_t> tryConstant() const;

  int64_t eval(const std::map<std::string, int64_t> &env) const;
  BoundExpr substituted(const std::string &name, const AffineExpr &repl) const;
  void collectSyms(std::set<std::string> &out) const;
  bool references(const std::string &name) const;

  /// Renders as a mini-C expression using the min()/floord() helpers.
  ExprRef toExpr() const;
  std::string str() const;

  bool operator==(const BoundExpr &o) const;

private:
  static BoundExpr extremum(std::vector<BoundExpr> items, Kind kind,
                            bool minimum);

  Kind kind_;
  AffineExpr affine_; // Affine
  int64_t k_ = 0;     // MulConst factor / Floord divisor
  std::vector<BoundExpr> kids_;
};

} // namespace loopforge

#endif // LOOPFORGE_BOUND_HPP
