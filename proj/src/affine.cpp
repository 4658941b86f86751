//===- affine.cpp - exact integer affine expressions ------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/affine.hpp"

#include <cassert>

namespace loopforge {

const char *errCodeName(ErrCode code) {
  switch (code) {
  case ErrCode::SyntaxError: return "SyntaxError";
  case ErrCode::NonCanonicalLoop: return "NonCanonicalLoop";
  case ErrCode::NonAffineAccess: return "NonAffineAccess";
  case ErrCode::Overflow: return "Overflow";
  case ErrCode::UnknownTransformation: return "UnknownTransformation";
  case ErrCode::UnknownClause: return "UnknownClause";
  case ErrCode::ClauseArityError: return "ClauseArityError";
  case ErrCode::DuplicateClause: return "DuplicateClause";
  case ErrCode::UnresolvedLoopId: return "UnresolvedLoopId";
  case ErrCode::AmbiguousImplicitId: return "AmbiguousImplicitId";
  case ErrCode::TargetNotPerfectlyNested: return "TargetNotPerfectlyNested";
  case ErrCode::IdRedefinition: return "IdRedefinition";
  case ErrCode::InstanceCapExceeded: return "InstanceCapExceeded";
  case ErrCode::NotPerfectlyNested: return "NotPerfectlyNested";
  case ErrCode::InvalidPermutation: return "InvalidPermutation";
  case ErrCode::BadSize: return "BadSize";
  case ErrCode::BadFactor: return "BadFactor";
  case ErrCode::FullUnrollTooLarge: return "FullUnrollTooLarge";
  case ErrCode::NothingToDistribute: return "NothingToDistribute";
  case ErrCode::NonAdjacent: return "NonAdjacent";
  case ErrCode::RangeMismatch: return "RangeMismatch";
  case ErrCode::JamNotNested: return "JamNotNested";
  case ErrCode::NonAffinePack: return "NonAffinePack";
  case ErrCode::ParametricFootprint: return "ParametricFootprint";
  case ErrCode::EmptyFootprint: return "EmptyFootprint";
  case ErrCode::WriteWithoutCopyOutSupport: return "WriteWithoutCopyOutSupport";
  case ErrCode::UnsupportedScheduleShape: return "UnsupportedScheduleShape";
  case ErrCode::IllegalTransformation: return "IllegalTransformation";
  case ErrCode::BudgetExceeded: return "BudgetExceeded";
  case ErrCode::OutOfBounds: return "OutOfBounds";
  case ErrCode::EvalError: return "EvalError";
  }
  return "UnknownError";
}

int64_t checkedAdd(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw Diag(ErrCode::Overflow, "integer overflow in addition");
  return r;
}

int64_t checkedSub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw Diag(ErrCode::Overflow, "integer overflow in subtraction");
  return r;
}

int64_t checkedMul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw Diag(ErrCode::Overflow, "integer overflow in multiplication");
  return r;
}

int64_t floordiv(int64_t num, int64_t den) {
  assert(den > 0 && "floordiv requires a positive divisor");
  int64_t q = num / den;
  if (num % den != 0 && num < 0)
    --q;
  return q;
}

AffineExpr AffineExpr::sym(const std::string &name, int64_t coeff) {
  AffineExpr e;
  if (coeff != 0)
    e.coeffs_[name] = coeff;
  return e;
}

AffineExpr AffineExpr::operator+(const AffineExpr &o) const {
  AffineExpr r = *this;
  r.constant_ = checkedAdd(r.constant_, o.constant_);
  for (const auto &[name, c] : o.coeffs_) {
    int64_t nc = checkedAdd(r.coeff(name), c);
    if (nc == 0)
      r.drop(name);
    else
      r.coeffs_[name] = nc;
  }
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr &o) const {
  return *this + (o * -1);
}

AffineExpr AffineExpr::operator*(int64_t k) const {
  AffineExpr r;
  if (k == 0)
    return r;
  r.constant_ = checkedMul(constant_, k);
  for (const auto &[name, c] : coeffs_)
    r.coeffs_[name] = checkedMul(c, k);
  return r;
}

AffineExpr AffineExpr::substitute(const std::string &name,
                                  const AffineExpr &repl) const {
  int64_t c = coeff(name);
  if (c == 0)
    return *this;
  AffineExpr r = *this;
  r.drop(name);
  return r + repl * c;
}

int64_t AffineExpr::eval(const std::map<std::string, int64_t> &env) const {
  int64_t v = constant_;
  for (const auto &[name, c] : coeffs_) {
    auto it = env.find(name);
    if (it == env.end())
      throw Diag(ErrCode::EvalError, "unbound symbol '" + name + "'");
    v = checkedAdd(v, checkedMul(c, it->second));
  }
  return v;
}

std::string AffineExpr::str() const {
  std::string s;
  bool first = true;
  for (const auto &[name, c] : coeffs_) {
    if (first) {
      if (c == -1)
        s += "-" + name;
      else if (c == 1)
        s += name;
      else
        s += std::to_string(c) + " * " + name;
      first = false;
      continue;
    }
    int64_t a = c < 0 ? -c : c;
    s += c < 0 ? " - " : " + ";
    if (a != 1)
      s += std::to_string(a) + " * ";
    s += name;
  }
  if (first)
    return std::to_string(constant_);
  if (constant_ > 0)
    s += " + " + std::to_string(constant_);
  else if (constant_ < 0)
    s += " - " + std::to_string(-constant_);
  return s;
}

} // namespace loopforge
