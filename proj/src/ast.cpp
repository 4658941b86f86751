//===- ast.cpp - mini-C abstract syntax --------------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/ast.hpp"

#include <sstream>

namespace loopforge {

ExprRef Expr::intLit(int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::IntLit;
  e->intVal = v;
  return e;
}

ExprRef Expr::floatLit(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::FloatLit;
  e->fltVal = v;
  return e;
}

ExprRef Expr::var(std::string name, SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  e->loc = loc;
  return e;
}

ExprRef Expr::access(std::string array, std::vector<ExprRef> subs,
                     SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Access;
  e->name = std::move(array);
  e->args = std::move(subs);
  e->loc = loc;
  return e;
}

ExprRef Expr::unary(char op, ExprRef a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->op = op;
  e->args = {std::move(a)};
  return e;
}

ExprRef Expr::binary(char op, ExprRef a, ExprRef b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprRef Expr::call(std::string callee, std::vector<ExprRef> args,
                   SourceLoc loc) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->name = std::move(callee);
  e->args = std::move(args);
  e->loc = loc;
  return e;
}

ExprRef Expr::addrOf(ExprRef a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::AddrOf;
  e->args = {std::move(a)};
  return e;
}

ExprRef Expr::fromAffine(const AffineExpr &a) {
  ExprRef acc;
  // Emit positive terms first so n - i prints as such rather than starting
  // from a negated term; a positive constant leads when no term is positive.
  bool anyPositive = false;
  for (const auto &[name, c] : a.coeffs())
    anyPositive |= c > 0;
  int64_t k = a.constant();
  if (!anyPositive && k > 0 && !a.coeffs().empty()) {
    acc = Expr::intLit(k);
    k = 0;
  }
  for (bool positivePass : {true, false})
    for (const auto &[name, c] : a.coeffs()) {
      if ((c > 0) != positivePass)
        continue;
      ExprRef term = Expr::var(name);
      if (c != 1 && c != -1)
        term = Expr::binary('*', Expr::intLit(c < 0 ? -c : c), term);
      if (!acc)
        acc = (c < 0 && c != -1) ? Expr::binary('-', Expr::intLit(0), term)
              : c == -1          ? Expr::unary('-', term)
                                 : term;
      else
        acc = Expr::binary(c < 0 ? '-' : '+', acc, term);
    }
  if (!acc)
    return Expr::intLit(k);
  if (k > 0)
    acc = Expr::binary('+', acc, Expr::intLit(k));
  else if (k < 0)
    acc = Expr::binary('-', acc, Expr::intLit(-k));
  return acc;
}

namespace {

int precedence(const Expr &e) {
  switch (e.kind) {
  case Expr::Kind::Binary:
    if (e.op == 'A') // logical &&
      return 0;
    return (e.op == '*' || e.op == '/' || e.op == '%') ? 2 : 1;
  case Expr::Kind::Unary:
    return 3;
  default:
    return 4;
  }
}

void printExprInto(const ExprRef &e, std::string &out) {
  switch (e->kind) {
  case Expr::Kind::IntLit:
    out += std::to_string(e->intVal);
    break;
  case Expr::Kind::FloatLit: {
    std::ostringstream os;
    os << e->fltVal;
    out += os.str();
    if (out.find('.') == std::string::npos &&
        out.find('e') == std::string::npos)
      out += ".0";
    break;
  }
  case Expr::Kind::Var:
    out += e->name;
    break;
  case Expr::Kind::Access:
    out += e->name;
    for (const auto &s : e->args) {
      out += "[";
      printExprInto(s, out);
      out += "]";
    }
    break;
  case Expr::Kind::Unary: {
    out += e->op;
    bool paren = precedence(*e->args[0]) < precedence(*e);
    if (paren)
      out += "(";
    printExprInto(e->args[0], out);
    if (paren)
      out += ")";
    break;
  }
  case Expr::Kind::Binary: {
    int p = precedence(*e);
    bool lparen = precedence(*e->args[0]) < p;
    // Right operand needs parens on equal precedence for -, /, %.
    bool rparen = precedence(*e->args[1]) < p ||
                  (precedence(*e->args[1]) == p && e->op != '+' && e->op != '*');
    if (lparen)
      out += "(";
    printExprInto(e->args[0], out);
    if (lparen)
      out += ")";
    out += e->op == 'A' ? std::string(" && ") : std::string{' ', e->op, ' '};
    if (rparen)
      out += "(";
    printExprInto(e->args[1], out);
    if (rparen)
      out += ")";
    break;
  }
  case Expr::Kind::Call: {
    out += e->name + "(";
    for (size_t i = 0; i < e->args.size(); ++i) {
      if (i)
        out += ", ";
      printExprInto(e->args[i], out);
    }
    out += ")";
    break;
  }
  case Expr::Kind::AddrOf:
    out += "&";
    printExprInto(e->args[0], out);
    break;
  }
}

} // namespace

std::string printExpr(const ExprRef &e) {
  std::string s;
  printExprInto(e, s);
  return s;
}

std::optional<AffineExpr> toAffine(const ExprRef &e) {
  switch (e->kind) {
  case Expr::Kind::IntLit:
    return AffineExpr(e->intVal);
  case Expr::Kind::Var:
    return AffineExpr::sym(e->name);
  case Expr::Kind::Unary: {
    if (e->op != '-')
      return std::nullopt;
    auto a = toAffine(e->args[0]);
    if (!a)
      return std::nullopt;
    return *a * -1;
  }
  case Expr::Kind::Binary: {
    auto l = toAffine(e->args[0]);
    auto r = toAffine(e->args[1]);
    if (!l || !r)
      return std::nullopt;
    switch (e->op) {
    case '+':
      return *l + *r;
    case '-':
      return *l - *r;
    case '*':
      if (auto k = l->tryConstant())
        return *r * *k;
      if (auto k = r->tryConstant())
        return *l * *k;
      return std::nullopt;
    default:
      return std::nullopt;
    }
  }
  default:
    return std::nullopt;
  }
}

ExprRef substituteVar(const ExprRef &e, const std::string &name,
                      const AffineExpr &repl) {
  switch (e->kind) {
  case Expr::Kind::Var:
    if (e->name == name)
      return Expr::fromAffine(repl);
    return e;
  case Expr::Kind::IntLit:
  case Expr::Kind::FloatLit:
    return e;
  default: {
    bool changed = false;
    std::vector<ExprRef> args;
    args.reserve(e->args.size());
    for (const auto &a : e->args) {
      ExprRef na = substituteVar(a, name, repl);
      changed |= na != a;
      args.push_back(std::move(na));
    }
    if (!changed)
      return e;
    auto n = std::make_shared<Expr>(*e);
    n->args = std::move(args);
    return n;
  }
  }
}

StmtRef Stmt::clone() const {
  auto s = std::make_shared<Stmt>(*this);
  s->body.clear();
  for (const auto &c : body)
    s->body.push_back(c->clone());
  s->elseBody.clear();
  for (const auto &c : elseBody)
    s->elseBody.push_back(c->clone());
  return s;
}

const Param *Function::findParam(const std::string &n) const {
  for (const auto &p : params)
    if (p.name == n)
      return &p;
  return nullptr;
}

const ArrayDecl *Function::findLocal(const std::string &n) const {
  for (const auto &d : locals)
    if (d.name == n)
      return &d;
  return nullptr;
}

const std::vector<ExprRef> *Function::arrayDims(const std::string &n) const {
  if (const Param *p = findParam(n))
    return p->dims.empty() ? nullptr : &p->dims;
  if (const ArrayDecl *d = findLocal(n))
    return d->dims.empty() ? nullptr : &d->dims;
  return nullptr;
}

std::string Function::arrayType(const std::string &n) const {
  if (const Param *p = findParam(n))
    return p->type;
  if (const ArrayDecl *d = findLocal(n))
    return d->type;
  return "int";
}

Function *Program::findFunction(const std::string &n) {
  for (auto &f : functions)
    if (f.name == n)
      return &f;
  return nullptr;
}

const Function *Program::findFunction(const std::string &n) const {
  for (const auto &f : functions)
    if (f.name == n)
      return &f;
  return nullptr;
}

namespace {

std::string ind(int n) { return std::string(2 * n, ' '); }

void printStmtInto(const Stmt &s, int depth, bool pragmas, std::string &out);

void printBody(const std::vector<StmtRef> &body, int depth, bool pragmas,
               std::string &out) {
  if (body.empty()) {
    out += ind(depth) + ";\n";
    return;
  }
  if (body.size() == 1 && body[0]->kind != Stmt::Kind::Block &&
      body[0]->pragmas.empty()) {
    printStmtInto(*body[0], depth, pragmas, out);
    return;
  }
  out += ind(depth - 1) + "{\n";
  for (const auto &c : body)
    printStmtInto(*c, depth, pragmas, out);
  out += ind(depth - 1) + "}\n";
}

void printStmtInto(const Stmt &s, int depth, bool pragmas, std::string &out) {
  if (pragmas)
    for (const auto &p : s.pragmas)
      out += ind(depth) + p.text + "\n";
  switch (s.kind) {
  case Stmt::Kind::Loop: {
    out += ind(depth) + "for (int " + s.counter + " = " + printExpr(s.init) +
           "; " + s.counter;
    switch (s.cmp) {
    case CmpOp::LT: out += " < "; break;
    case CmpOp::LE: out += " <= "; break;
    case CmpOp::GT: out += " > "; break;
    case CmpOp::GE: out += " >= "; break;
    }
    out += printExpr(s.bound) + "; " + s.counter;
    if (s.step >= 0)
      out += " += " + std::to_string(s.step);
    else
      out += " -= " + std::to_string(-s.step);
    out += ")\n";
    printBody(s.body, depth + 1, pragmas, out);
    break;
  }
  case Stmt::Kind::Assign: {
    out += ind(depth) + printExpr(s.lhs) + " ";
    if (s.assignOp != '=')
      out += std::string(1, s.assignOp);
    out += "= " + printExpr(s.rhs) + ";\n";
    break;
  }
  case Stmt::Kind::Call: {
    out += ind(depth) + s.callee + "(";
    for (size_t i = 0; i < s.args.size(); ++i) {
      if (i)
        out += ", ";
      out += printExpr(s.args[i]);
    }
    out += ");\n";
    break;
  }
  case Stmt::Kind::Block: {
    out += ind(depth) + "{\n";
    for (const auto &c : s.body)
      printStmtInto(*c, depth + 1, pragmas, out);
    out += ind(depth) + "}\n";
    break;
  }
  case Stmt::Kind::If: {
    out += ind(depth) + "if (" + printExpr(s.lhs) + ")\n";
    printBody(s.body, depth + 1, pragmas, out);
    if (!s.elseBody.empty()) {
      out += ind(depth) + "else\n";
      printBody(s.elseBody, depth + 1, pragmas, out);
    }
    break;
  }
  }
}

std::string declText(const std::string &type, const std::string &name,
                     const std::vector<ExprRef> &dims) {
  std::string s = type + " " + name;
  for (const auto &d : dims)
    s += "[" + printExpr(d) + "]";
  return s;
}

} // namespace

std::string printStmt(const Stmt &s, const PrintOptions &opts) {
  std::string out;
  printStmtInto(s, opts.indent, opts.includePragmas, out);
  return out;
}

std::string printFunction(const Function &f, const PrintOptions &opts) {
  std::string out = f.retType + " " + f.name + "(";
  for (size_t i = 0; i < f.params.size(); ++i) {
    if (i)
      out += ", ";
    out += declText(f.params[i].type, f.params[i].name, f.params[i].dims);
  }
  out += ") {\n";
  for (const auto &d : f.locals) {
    if (d.heap) {
      // Heap arrays keep the multi-dimensional access syntax via a pointer to
      // the inner array type: double (*P)[n2][n3] = malloc(sizeof(double[n1][n2][n3]));
      std::string innerDims, allDims;
      for (size_t i = 0; i < d.dims.size(); ++i) {
        std::string dim = "[" + printExpr(d.dims[i]) + "]";
        allDims += dim;
        if (i > 0)
          innerDims += dim;
      }
      out += "  " + d.type + " (*" + d.name + ")" + innerDims +
             " = malloc(sizeof(" + d.type + allDims + "));\n";
    } else {
      out += "  " + declText(d.type, d.name, d.dims) + ";\n";
    }
  }
  for (const auto &s : f.body) {
    PrintOptions o = opts;
    o.indent = 1;
    out += printStmt(*s, o);
  }
  for (const auto &d : f.locals)
    if (d.heap)
      out += "  free(" + d.name + ");\n";
  out += "}\n";
  return out;
}

std::string printProgram(const Program &p, const PrintOptions &opts) {
  std::string out;
  for (size_t i = 0; i < p.functions.size(); ++i) {
    if (i)
      out += "\n";
    out += printFunction(p.functions[i], opts);
  }
  return out;
}

namespace {

bool exprEq(const ExprRef &a, const ExprRef &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->kind != b->kind || a->intVal != b->intVal || a->fltVal != b->fltVal ||
      a->name != b->name || a->op != b->op || a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!exprEq(a->args[i], b->args[i]))
      return false;
  return true;
}

bool stmtEq(const Stmt &a, const Stmt &b) {
  if (a.kind != b.kind)
    return false;
  if (a.pragmas.size() != b.pragmas.size())
    return false;
  for (size_t i = 0; i < a.pragmas.size(); ++i)
    if (a.pragmas[i].text != b.pragmas[i].text)
      return false;
  switch (a.kind) {
  case Stmt::Kind::Loop:
    if (a.counter != b.counter || a.cmp != b.cmp || a.step != b.step ||
        !exprEq(a.init, b.init) || !exprEq(a.bound, b.bound))
      return false;
    break;
  case Stmt::Kind::Assign:
    return exprEq(a.lhs, b.lhs) && a.assignOp == b.assignOp &&
           exprEq(a.rhs, b.rhs);
  case Stmt::Kind::Call: {
    if (a.callee != b.callee || a.args.size() != b.args.size())
      return false;
    for (size_t i = 0; i < a.args.size(); ++i)
      if (!exprEq(a.args[i], b.args[i]))
        return false;
    return true;
  }
  case Stmt::Kind::Block:
    break;
  case Stmt::Kind::If:
    if (!exprEq(a.lhs, b.lhs) || a.elseBody.size() != b.elseBody.size())
      return false;
    for (size_t i = 0; i < a.elseBody.size(); ++i)
      if (!stmtEq(*a.elseBody[i], *b.elseBody[i]))
        return false;
    break;
  }
  if (a.body.size() != b.body.size())
    return false;
  for (size_t i = 0; i < a.body.size(); ++i)
    if (!stmtEq(*a.body[i], *b.body[i]))
      return false;
  return true;
}

} // namespace

bool structurallyEqual(const Program &pa, const Program &pb) {
  if (pa.functions.size() != pb.functions.size())
    return false;
  for (size_t i = 0; i < pa.functions.size(); ++i) {
    const Function &a = pa.functions[i], &b = pb.functions[i];
    if (a.name != b.name || a.retType != b.retType ||
        a.params.size() != b.params.size() || a.locals.size() != b.locals.size() ||
        a.body.size() != b.body.size())
      return false;
    for (size_t j = 0; j < a.params.size(); ++j) {
      if (a.params[j].name != b.params[j].name ||
          a.params[j].type != b.params[j].type ||
          a.params[j].dims.size() != b.params[j].dims.size())
        return false;
      for (size_t k = 0; k < a.params[j].dims.size(); ++k)
        if (!exprEq(a.params[j].dims[k], b.params[j].dims[k]))
          return false;
    }
    for (size_t j = 0; j < a.locals.size(); ++j) {
      if (a.locals[j].name != b.locals[j].name ||
          a.locals[j].type != b.locals[j].type ||
          a.locals[j].heap != b.locals[j].heap ||
          a.locals[j].dims.size() != b.locals[j].dims.size())
        return false;
      for (size_t k = 0; k < a.locals[j].dims.size(); ++k)
        if (!exprEq(a.locals[j].dims[k], b.locals[j].dims[k]))
          return false;
    }
    for (size_t j = 0; j < a.body.size(); ++j)
      if (!stmtEq(*a.body[j], *b.body[j]))
        return false;
  }
  return true;
}

} // namespace loopforge
