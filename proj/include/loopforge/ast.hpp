//===- ast.hpp - mini-C abstract syntax ---------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_AST_HPP
#define LOOPFORGE_AST_HPP

#include "loopforge/affine.hpp"
#include "loopforge/diag.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace loopforge {

struct Expr;
using ExprRef = std::shared_ptr<const Expr>;

/// Expression node. One struct instead of a class hierarchy; the kind
/// discriminates which fields are meaningful. Nodes are immutable after
/// construction and shared freely.
struct Expr {
  enum class Kind {
    IntLit,   // intVal
    FloatLit, // fltVal
    Var,      // name (scalar variable or parameter)
    Access,   // name[args...] array element
    Unary,    // op ('-'), args[0]
    Binary,   // op ('+','-','*','/','%'), args[0], args[1]
    Call,     // name(args...); also the builtins min/floord/no_overlap
    AddrOf,   // &args[0], only valid as a call argument
  };

  Kind kind = Kind::IntLit;
  int64_t intVal = 0;
  double fltVal = 0.0;
  std::string name;
  char op = 0;
  std::vector<ExprRef> args;
  SourceLoc loc;

  static ExprRef intLit(int64_t v);
  static ExprRef floatLit(double v);
  static ExprRef var(std::string name, SourceLoc loc = {});
  static ExprRef access(std::string array, std::vector<ExprRef> subs,
                        SourceLoc loc = {});
  static ExprRef unary(char op, ExprRef a);
  static ExprRef binary(char op, ExprRef a, ExprRef b);
  static ExprRef call(std::string callee, std::vector<ExprRef> args,
                      SourceLoc loc = {});
  static ExprRef addrOf(ExprRef a);

  /// Builds the expression for an affine function (sorted, deterministic).
  static ExprRef fromAffine(const AffineExpr &e);
};

/// Tries to interpret an expression as an affine function of identifiers.
/// Handles +, -, literal multiplication and parenthesization.
std::optional<AffineExpr> toAffine(const ExprRef &e);

/// Replaces every occurrence of identifier `name` (Var or loop counter use)
/// by an affine expression. Used by unroll body replication and loop fusion.
ExprRef substituteVar(const ExprRef &e, const std::string &name,
                      const AffineExpr &repl);

/// A raw pragma line as attached to the statement that follows it.
/// Continuation backslashes are already folded into one logical line.
struct RawPragma {
  std::string text;
  SourceLoc loc;
};

struct Stmt;
using StmtRef = std::shared_ptr<Stmt>;

enum class CmpOp { LT, LE, GT, GE };

struct Stmt {
  enum class Kind { Loop, Assign, Call, Block, If };

  Kind kind = Kind::Block;
  SourceLoc loc;
  std::vector<RawPragma> pragmas;

  // Loop
  std::string counter;
  ExprRef init;
  CmpOp cmp = CmpOp::LT;
  ExprRef bound;
  int64_t step = 0; // signed: negative for downward loops
  std::vector<StmtRef> body;

  // Assign: lhs is Access or Var; op one of '=', '+', '-', '*'
  ExprRef lhs;
  char assignOp = '=';
  ExprRef rhs;

  // Call
  std::string callee;
  std::vector<ExprRef> args;

  // Block reuses `body`.

  // If: condition in `lhs`, then-branch in `body`, else-branch here.
  // Only produced when re-parsing versioned output; not part of the
  // transformable subset.
  std::vector<StmtRef> elseBody;

  /// Statement name used in schedule trees and traces. Calls are named after
  /// their callee, assignments get StmtN; assigned after parsing.
  std::string name;

  StmtRef clone() const;
};

struct ArrayDecl {
  std::string type; // "int", "long", "double"
  std::string name;
  std::vector<ExprRef> dims; // empty = scalar
  bool heap = false;
  SourceLoc loc;
};

struct Param {
  std::string type;
  std::string name;
  std::vector<ExprRef> dims; // empty = scalar parameter
  SourceLoc loc;
};

struct Function {
  std::string retType;
  std::string name;
  std::vector<Param> params;
  std::vector<ArrayDecl> locals;
  std::vector<StmtRef> body;
  SourceLoc loc;

  const Param *findParam(const std::string &n) const;
  const ArrayDecl *findLocal(const std::string &n) const;
  /// Declared dimensions of an array (param or local); null for scalars and
  /// unknown names.
  const std::vector<ExprRef> *arrayDims(const std::string &n) const;
  std::string arrayType(const std::string &n) const;
};

struct Program {
  std::vector<Function> functions;

  Function *findFunction(const std::string &n);
  const Function *findFunction(const std::string &n) const;
};

struct PrintOptions {
  bool includePragmas = true;
  int indent = 0;
};

std::string printExpr(const ExprRef &e);
std::string printStmt(const Stmt &s, const PrintOptions &opts);
std::string printFunction(const Function &f, const PrintOptions &opts);
std::string printProgram(const Program &p, const PrintOptions &opts = {});

/// Structural equality, ignoring source locations.
bool structurallyEqual(const Program &a, const Program &b);

} // namespace loopforge

#endif // LOOPFORGE_AST_HPP
