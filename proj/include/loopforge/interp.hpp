//===- interp.hpp - reference interpreter for mini-C -------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_INTERP_HPP
#define LOOPFORGE_INTERP_HPP

#include "loopforge/ast.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace loopforge {

/// One executed statement instance: the statement's schedule name and the
/// values of the enclosing loop counters, outermost first.
struct TraceEntry {
  std::string name;
  std::vector<int64_t> coords;

  bool operator==(const TraceEntry &o) const {
    return name == o.name && coords == o.coords;
  }
  std::string str() const;
};

/// Flat element store for one array: index tuple -> value. Elements that were
/// never written are absent and read as the seeded initial fill.
using ArrayStore = std::map<std::vector<int64_t>, int64_t>;

struct RunResult {
  std::map<std::string, ArrayStore> stores;
  std::vector<TraceEntry> trace;
};

/// Deterministic initial value of array element `name[index]` under `seed`,
/// in [-100, 100]. Also used for never-written elements when comparing runs.
int64_t seeded_fill(const std::string &name, const std::vector<int64_t> &index,
                    uint64_t seed);

/// Executes `f` with all scalar parameters bound by `params`. Reads of
/// never-written array elements yield seeded_fill values. Opaque calls
/// evaluate their arguments and are traced but have no effect on memory.
/// Throws Diag on OutOfBounds, BudgetExceeded or EvalError.
RunResult run(const Function &f, const std::map<std::string, int64_t> &params,
              uint64_t seed = 0, int64_t budget = 10000000);

struct EquivResult {
  bool equal = true;
  // Witness on mismatch.
  std::string array;
  std::vector<int64_t> index;
  int64_t lhs = 0;
  int64_t rhs = 0;

  explicit operator bool() const { return equal; }
  std::string str() const;
};

/// True iff the final stores of `a` and `b` match elementwise over every
/// array declared in both functions. Copy buffers introduced by packing
/// (names starting with "Packed_") are excluded from the comparison.
EquivResult equivalent(const Function &a, const Function &b,
                       const std::map<std::string, int64_t> &params,
                       uint64_t seed = 0, int64_t budget = 10000000);

} // namespace loopforge

#endif // LOOPFORGE_INTERP_HPP
