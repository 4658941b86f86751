//===- affine.hpp - exact integer affine expressions -------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_AFFINE_HPP
#define LOOPFORGE_AFFINE_HPP

#include "loopforge/diag.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace loopforge {

/// Checked 64-bit arithmetic. Overflow is always an error, never wraps.
int64_t checkedAdd(int64_t a, int64_t b);
int64_t checkedSub(int64_t a, int64_t b);
int64_t checkedMul(int64_t a, int64_t b);

/// Floor division with the sign convention of isl/Polly: rounds towards
/// negative infinity, e.g. floordiv(-1, 8) == -1. Divisor must be positive.
int64_t floordiv(int64_t num, int64_t den);

/// An exact integer affine function of named symbols (loop counters and
/// parameters): constant + sum(coeff[s] * s).
class AffineExpr {
public:
  AffineExpr() = default;
  explicit AffineExpr(int64_t constant) : constant_(constant) {}
  static AffineExpr sym(const std::string &name, int64_t coeff = 1);

  int64_t constant() const { return constant_; }
  const std::map<std::string, int64_t> &coeffs() const { return coeffs_; }

  bool isConstant() const { return coeffs_.empty(); }
  std::optional<int64_t> tryConstant() const {
    if (isConstant())
      return constant_;
    return std::nullopt;
  }
  int64_t coeff(const std::string &name) const {
    auto it = coeffs_.find(name);
    return it == coeffs_.end() ? 0 : it->second;
  }
  bool references(const std::string &name) const {
    return coeffs_.count(name) != 0;
  }

  AffineExpr operator+(const AffineExpr &o) const;
  AffineExpr operator-(const AffineExpr &o) const;
  AffineExpr operator*(int64_t k) const;
  AffineExpr operator+(int64_t k) const { return *this + AffineExpr(k); }
  AffineExpr operator-(int64_t k) const { return *this - AffineExpr(k); }
  bool operator==(const AffineExpr &o) const = default;

  /// Replace a symbol by an affine expression.
  AffineExpr substitute(const std::string &name, const AffineExpr &repl) const;

  /// Evaluate under a full assignment. Unbound symbols are an EvalError.
  int64_t eval(const std::map<std::string, int64_t> &env) const;

  /// Renders in source style, e.g. "96 * i1 + c4" or "n - 1".
  std::string str() const;

private:
  void drop(const std::string &name) { coeffs_.erase(name); }

  int64_t constant_ = 0;
  std::map<std::string, int64_t> coeffs_;
};

} // namespace loopforge

#endif // LOOPFORGE_AFFINE_HPP
