//===- directive.hpp - pragma directives and transformation plans -*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_DIRECTIVE_HPP
#define LOOPFORGE_DIRECTIVE_HPP

#include "loopforge/ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace loopforge {

enum class DirKind {
  Id,
  Reverse,
  Interchange,
  Tile,
  StripMine,
  Unroll,
  UnrollAndJam,
  Distribute,
  Fuse,
  Pack,
};

const char *dirKindName(DirKind k);

/// One parsed pragma in the directive-clause syntax:
///   #pragma clang loop [(ids,...)] transformation clause(args)...
struct Directive {
  DirKind kind = DirKind::Reverse;
  std::vector<std::string> targets; // the loop(...) list; empty = next loop
  bool forced = true;               // `hint` downgrades
  bool unsafe = false;              // bypass the legality check
  SourceLoc loc;

  // Clause payloads (meaningful per kind).
  std::string idName;                       // id
  std::vector<std::string> permutation;     // interchange
  std::vector<int64_t> sizes;               // tile
  std::vector<std::string> pitIds, tileIds; // tile
  int64_t size = 0;                         // stripmine
  std::string pitId, stripId;               // stripmine
  int64_t factor = 0;                       // unroll, unroll_and_jam
  bool full = false;                        // unroll full
  std::vector<std::string> distIds;         // distribute ids(...)
  std::string array;                        // pack
  bool heapAlloc = false;                   // pack allocate(malloc)
  std::vector<int64_t> layout;              // pack layout(...)

  /// One-line rendering used by the plan dump and the legality report.
  std::string str() const;
};

/// Parses one pragma line. The line must begin with `#pragma clang loop` or
/// `#pragma loop`. Errors: UnknownTransformation, UnknownClause,
/// ClauseArityError, DuplicateClause.
Directive parse_directive(const std::string &line, SourceLoc loc = {});

/// Returns true if the line carries the loop-transformation pragma prefix.
bool isLoopPragma(const std::string &line);

/// The resolved transformation plan of one function: directives in
/// application order with targets rewritten to band identifiers, plus the
/// band identifier assigned to each source loop.
struct FunctionPlan {
  std::vector<Directive> order;
  /// Band id per source loop statement (explicit id or internal "@Ln").
  std::map<const Stmt *, std::string> loopIds;
  /// Induction-variable aliases; empty string marks an ambiguous name.
  std::map<std::string, std::string> aliases;
};

/// Resolves the pragma stacks of a function into a plan. Stacked pragmas
/// apply bottom-up: the directive nearest the loop first, each one above it
/// to the previous directive's output. Loops are referenced by explicit ids,
/// by output-loop ids promised by earlier-applied directives, or by their
/// induction-variable name when unambiguous.
FunctionPlan resolve_plan(const Function &f);

/// One line per planned directive, in application order.
std::string dump_plan(const Program &p);

} // namespace loopforge

#endif // LOOPFORGE_DIRECTIVE_HPP
