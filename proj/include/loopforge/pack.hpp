//===- pack.hpp - array packing -----------------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_PACK_HPP
#define LOOPFORGE_PACK_HPP

#include "loopforge/tree.hpp"

namespace loopforge {

/// A packed copy of an array's working set under one placement loop, with
/// constant bounding-box extents and an affine index map per packed
/// dimension (the origin subscript minus the box base).
struct PackedArrayDecl {
  std::string name;   // Packed_<origin>
  std::string type;   // element type, from the origin declaration
  std::string origin; // packed array
  std::vector<int64_t> extents;
  bool heap = false;
  /// Origin dimension packed at each position (the layout permutation).
  std::vector<int64_t> layout;
  /// Box base per origin dimension, affine in loops outside the placement.
  std::vector<AffineExpr> base;

  ArrayDecl toDecl() const;
};

struct PackResult {
  TreeRef tree;
  PackedArrayDecl decl;
};

/// Packs `array` at the band identified by `placementLoop`: inserts a
/// copy-in loop nest immediately before the band, rewrites every interior
/// access of the array to the packed buffer, and returns the declaration to
/// hoist. Read-only packs only; writes are WriteWithoutCopyOutSupport.
/// `layout` optionally permutes the packed dimensions; by default the
/// dimension whose subscript varies in the deepest interior loop goes last.
/// Errors: NonAffinePack, ParametricFootprint, EmptyFootprint,
/// WriteWithoutCopyOutSupport, UnresolvedLoopId.
PackResult pack(const TreeRef &tree, const std::string &placementLoop,
                const std::string &array, const Function &f, bool heap = false,
                const std::vector<int64_t> &layout = {});

} // namespace loopforge

#endif // LOOPFORGE_PACK_HPP
