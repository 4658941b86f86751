// SPDX-License-Identifier: Apache-2.0
#include "loopforge/affine.hpp"
#include "loopforge/bound.hpp"

#include <doctest.h>

#include <limits>

using namespace loopforge;

TEST_CASE("checked arithmetic") {
  CHECK(checkedAdd(2, 3) == 5);
  CHECK(checkedMul(-4, 5) == -20);
  CHECK_THROWS_AS(checkedAdd(std::numeric_limits<int64_t>::max(), 1), Diag);
  CHECK_THROWS_AS(checkedMul(std::numeric_limits<int64_t>::max(), 2), Diag);
}

TEST_CASE("floordiv rounds towards negative infinity") {
  CHECK(floordiv(7, 2) == 3);
  CHECK(floordiv(-1, 8) == -1);
  CHECK(floordiv(-8, 8) == -1);
  CHECK(floordiv(-9, 8) == -2);
  CHECK(floordiv(0, 3) == 0);
}

TEST_CASE("affine arithmetic and printing") {
  AffineExpr e = AffineExpr::sym("i1") * 96 + AffineExpr::sym("c4") + 3;
  CHECK(e.coeff("i1") == 96);
  CHECK(e.constant() == 3);
  CHECK(e.eval({{"i1", 2}, {"c4", 5}}) == 200);
  CHECK(e.str() == "c4 + 96 * i1 + 3");

  AffineExpr zero = e - e;
  CHECK(zero.isConstant());
  CHECK(zero.tryConstant() == 0);

  AffineExpr sub = e.substitute("i1", AffineExpr::sym("k") + 1);
  CHECK(sub.eval({{"k", 1}, {"c4", 5}}) == 200);
  CHECK_THROWS_AS(e.eval({{"i1", 0}}), Diag);
}

TEST_CASE("bound expressions fold and evaluate") {
  BoundExpr n(AffineExpr::sym("n"));
  BoundExpr m = BoundExpr::min({n, BoundExpr(128), BoundExpr(100)});
  CHECK(m.kind() == BoundExpr::Kind::Min);
  CHECK(m.eval({{"n", 50}}) == 50);
  CHECK(m.eval({{"n", 500}}) == 100);
  CHECK(m.str() == "min(n, 100)");

  BoundExpr onlyConst = BoundExpr::min({BoundExpr(4), BoundExpr(9)});
  CHECK(onlyConst.tryConstant() == 4);

  BoundExpr mx = BoundExpr::max({BoundExpr(0), BoundExpr(AffineExpr(-3))});
  CHECK(mx.tryConstant() == 0);

  BoundExpr f = BoundExpr::floord(BoundExpr::add(n, BoundExpr(-1)), 8);
  CHECK(f.eval({{"n", 0}}) == -1);
  CHECK(f.eval({{"n", 17}}) == 2);
  CHECK(f.str() == "floord(n - 1, 8)");

  BoundExpr affAdd = BoundExpr::add(n, BoundExpr(5));
  CHECK(affAdd.isAffine());
  BoundExpr s = m.substituted("n", AffineExpr(7));
  CHECK(s.tryConstant() == 7);
}
