//===- parse.cpp - mini-C lexer and parser -----------------------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/parse.hpp"

#include <cctype>
#include <map>
#include <set>
#include <vector>

namespace loopforge {

namespace {

struct Token {
  enum class Kind { Ident, Int, Float, Punct, Pragma, End };
  Kind kind = Kind::End;
  std::string text;
  int64_t intVal = 0;
  double fltVal = 0.0;
  SourceLoc loc;
};

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) { lexAll(); }
  const std::vector<Token> &tokens() const { return tokens_; }

private:
  void lexAll() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        colBase_ = ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          ++pos_;
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        pos_ += 2;
        while (pos_ + 1 < src_.size() &&
               !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
          if (src_[pos_] == '\n') {
            ++line_;
            colBase_ = pos_ + 1;
          }
          ++pos_;
        }
        pos_ = std::min(pos_ + 2, src_.size());
        continue;
      }
      if (c == '#') {
        lexHashLine();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lexIdent();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lexNumber();
        continue;
      }
      lexPunct();
    }
    Token t;
    t.kind = Token::Kind::End;
    t.loc = here();
    tokens_.push_back(t);
  }

  char peek(size_t off) const {
    return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
  }

  SourceLoc here() const {
    return {line_, static_cast<int>(pos_ - colBase_) + 1};
  }

  void lexHashLine() {
    SourceLoc loc = here();
    std::string text;
    // Collect the logical line, folding backslash continuations.
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && (peek(1) == '\n' || (peek(1) == '\r' && peek(2) == '\n'))) {
        pos_ += peek(1) == '\n' ? 2 : 3;
        ++line_;
        colBase_ = pos_;
        text += ' ';
        continue;
      }
      if (c == '\n')
        break;
      text += c;
      ++pos_;
    }
    // Normalize interior whitespace runs to single spaces.
    std::string norm;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!norm.empty() && norm.back() != ' ')
          norm += ' ';
      } else {
        norm += c;
      }
    }
    while (!norm.empty() && norm.back() == ' ')
      norm.pop_back();
    if (norm.rfind("#pragma", 0) == 0) {
      Token t;
      t.kind = Token::Kind::Pragma;
      t.text = norm;
      t.loc = loc;
      tokens_.push_back(t);
    }
    // Other preprocessor lines (e.g. the emitted #define helpers) are skipped.
  }

  void lexIdent() {
    Token t;
    t.kind = Token::Kind::Ident;
    t.loc = here();
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      t.text += src_[pos_++];
    tokens_.push_back(t);
  }

  void lexNumber() {
    Token t;
    t.loc = here();
    std::string num;
    bool isFloat = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        num += c;
        ++pos_;
      } else if (c == '.' && !isFloat) {
        isFloat = true;
        num += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (isFloat) {
      t.kind = Token::Kind::Float;
      t.fltVal = std::stod(num);
    } else {
      t.kind = Token::Kind::Int;
      t.intVal = std::stoll(num);
    }
    t.text = num;
    tokens_.push_back(t);
  }

  void lexPunct() {
    Token t;
    t.kind = Token::Kind::Punct;
    t.loc = here();
    static const char *two[] = {"+=", "-=", "*=", "/=", "++", "--",
                                "<=", ">=", "==", "&&", "||"};
    for (const char *p : two) {
      if (src_[pos_] == p[0] && peek(1) == p[1]) {
        t.text = p;
        pos_ += 2;
        tokens_.push_back(t);
        return;
      }
    }
    t.text = std::string(1, src_[pos_++]);
    tokens_.push_back(t);
  }

  const std::string &src_;
  size_t pos_ = 0;
  int line_ = 1;
  size_t colBase_ = 0;
  std::vector<Token> tokens_;
};

bool isTypeName(const std::string &s) {
  return s == "int" || s == "long" || s == "double" || s == "void";
}

class Parser {
public:
  explicit Parser(const std::string &src) : lexer_(src), toks_(lexer_.tokens()) {}

  Program parse() {
    Program p;
    while (!at(Token::Kind::End))
      p.functions.push_back(parseFunction());
    for (Function &f : p.functions)
      finalizeFunction(f);
    return p;
  }

private:
  [[noreturn]] void error(const std::string &msg, SourceLoc loc = {}) {
    throw Diag(ErrCode::SyntaxError, msg, loc.valid() ? loc : cur().loc);
  }

  const Token &cur() const { return toks_[idx_]; }
  const Token &peek(size_t off = 1) const {
    return toks_[std::min(idx_ + off, toks_.size() - 1)];
  }
  bool at(Token::Kind k) const { return cur().kind == k; }
  bool atPunct(const std::string &p) const {
    return cur().kind == Token::Kind::Punct && cur().text == p;
  }
  bool atIdent(const std::string &s) const {
    return cur().kind == Token::Kind::Ident && cur().text == s;
  }
  Token take() { return toks_[idx_++]; }
  Token expectPunct(const std::string &p) {
    if (!atPunct(p))
      error("expected '" + p + "', found '" + cur().text + "'");
    return take();
  }
  Token expectIdent() {
    if (!at(Token::Kind::Ident))
      error("expected identifier, found '" + cur().text + "'");
    return take();
  }

  Function parseFunction() {
    Function f;
    f.loc = cur().loc;
    if (!at(Token::Kind::Ident) || !isTypeName(cur().text))
      error("expected function return type");
    f.retType = take().text;
    f.name = expectIdent().text;
    expectPunct("(");
    if (!atPunct(")")) {
      while (true) {
        Param prm;
        prm.loc = cur().loc;
        if (!at(Token::Kind::Ident) || !isTypeName(cur().text))
          error("expected parameter type");
        prm.type = take().text;
        prm.name = expectIdent().text;
        while (atPunct("[")) {
          take();
          prm.dims.push_back(parseExpr());
          expectPunct("]");
        }
        f.params.push_back(std::move(prm));
        if (atPunct(","))
          take();
        else
          break;
      }
    }
    expectPunct(")");
    expectPunct("{");
    while (!atPunct("}")) {
      if (at(Token::Kind::End))
        error("unexpected end of input in function body");
      if (at(Token::Kind::Ident) && isTypeName(cur().text) &&
          !atIdent("void") && !isForHeaderDecl())
        parseLocalDecl(f);
      else if (StmtRef s = parseStmt())
        f.body.push_back(std::move(s));
    }
    take(); // }
    return f;
  }

  // Distinguishes `int i = ...` local declarations from loop headers; local
  // declarations occur only at statement level directly.
  bool isForHeaderDecl() const { return false; }

  void parseLocalDecl(Function &f) {
    ArrayDecl d;
    d.loc = cur().loc;
    d.type = take().text;
    if (atPunct("(")) {
      // Heap form: T (*name)[d2]...[dk] = malloc(sizeof(T[d1]...[dk]));
      take();
      expectPunct("*");
      d.name = expectIdent().text;
      expectPunct(")");
      while (atPunct("[")) {
        take();
        parseExpr();
        expectPunct("]");
      }
      expectPunct("=");
      if (!atIdent("malloc"))
        error("expected malloc in heap array declaration");
      take();
      expectPunct("(");
      if (!atIdent("sizeof"))
        error("expected sizeof in heap array declaration");
      take();
      expectPunct("(");
      if (!at(Token::Kind::Ident) || !isTypeName(cur().text))
        error("expected element type in sizeof");
      take();
      while (atPunct("[")) {
        take();
        d.dims.push_back(parseExpr());
        expectPunct("]");
      }
      expectPunct(")");
      expectPunct(")");
      expectPunct(";");
      d.heap = true;
      if (d.dims.empty())
        error("heap array needs at least one dimension");
    } else {
      d.name = expectIdent().text;
      while (atPunct("[")) {
        take();
        d.dims.push_back(parseExpr());
        expectPunct("]");
      }
      expectPunct(";");
    }
    f.locals.push_back(std::move(d));
  }

  StmtRef parseStmt() {
    std::vector<RawPragma> pragmas;
    while (at(Token::Kind::Pragma)) {
      Token t = take();
      pragmas.push_back({t.text, t.loc});
    }
    if (atPunct("}") || at(Token::Kind::End)) {
      if (!pragmas.empty())
        error("pragma is not followed by a statement", pragmas.front().loc);
    }
    StmtRef s = parseBareStmt();
    if (!s) {
      if (!pragmas.empty())
        error("pragma is not followed by a statement", pragmas.front().loc);
      return nullptr;
    }
    s->pragmas = std::move(pragmas);
    return s;
  }

  StmtRef parseBareStmt() {
    if (atIdent("for"))
      return parseFor();
    if (atIdent("if"))
      return parseIf();
    if (atPunct("{")) {
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::Block;
      s->loc = take().loc;
      while (!atPunct("}")) {
        if (at(Token::Kind::End))
          error("unexpected end of input in block");
        if (StmtRef inner = parseStmt())
          s->body.push_back(std::move(inner));
      }
      take();
      return s;
    }
    if (atPunct(";")) {
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::Block;
      s->loc = take().loc;
      return s;
    }
    return parseSimpleStmt();
  }

  StmtRef parseFor() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Loop;
    s->loc = take().loc; // for
    expectPunct("(");
    if (at(Token::Kind::Ident) && (cur().text == "int" || cur().text == "long"))
      take();
    s->counter = expectIdent().text;
    expectPunct("=");
    s->init = parseExpr();
    expectPunct(";");
    std::string condVar = expectIdent().text;
    if (condVar != s->counter)
      error("loop condition must test the loop counter '" + s->counter + "'");
    if (atPunct("<"))
      s->cmp = CmpOp::LT;
    else if (atPunct("<="))
      s->cmp = CmpOp::LE;
    else if (atPunct(">"))
      s->cmp = CmpOp::GT;
    else if (atPunct(">="))
      s->cmp = CmpOp::GE;
    else
      error("expected loop comparison operator");
    take();
    s->bound = parseExpr();
    expectPunct(";");
    std::string incVar = expectIdent().text;
    if (incVar != s->counter)
      error("loop increment must update the loop counter");
    if (atPunct("+=") || atPunct("-=")) {
      bool down = cur().text == "-=";
      take();
      if (!at(Token::Kind::Int))
        error("loop step must be an integer constant");
      int64_t v = take().intVal;
      if (v == 0)
        error("loop step must be nonzero");
      s->step = down ? -v : v;
    } else if (atPunct("++")) {
      take();
      s->step = 1;
    } else if (atPunct("--")) {
      take();
      s->step = -1;
    } else {
      error("expected loop step");
    }
    expectPunct(")");
    StmtRef body = parseStmt();
    if (body && body->kind == Stmt::Kind::Block && body->pragmas.empty())
      s->body = std::move(body->body);
    else if (body)
      s->body.push_back(std::move(body));
    return s;
  }

  StmtRef parseIf() {
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::If;
    s->loc = take().loc;
    expectPunct("(");
    s->lhs = parseCondExpr();
    expectPunct(")");
    StmtRef thenStmt = parseStmt();
    if (thenStmt && thenStmt->kind == Stmt::Kind::Block &&
        thenStmt->pragmas.empty())
      s->body = std::move(thenStmt->body);
    else if (thenStmt)
      s->body.push_back(std::move(thenStmt));
    if (atIdent("else")) {
      take();
      StmtRef elseStmt = parseStmt();
      if (elseStmt && elseStmt->kind == Stmt::Kind::Block &&
          elseStmt->pragmas.empty())
        s->elseBody = std::move(elseStmt->body);
      else if (elseStmt)
        s->elseBody.push_back(std::move(elseStmt));
    }
    return s;
  }

  StmtRef parseSimpleStmt() {
    SourceLoc loc = cur().loc;
    Token name = expectIdent();
    if (atPunct("(")) {
      // Call statement.
      auto s = std::make_shared<Stmt>();
      s->kind = Stmt::Kind::Call;
      s->loc = loc;
      s->callee = name.text;
      take();
      if (!atPunct(")")) {
        while (true) {
          s->args.push_back(parseCallArg());
          if (atPunct(","))
            take();
          else
            break;
        }
      }
      expectPunct(")");
      expectPunct(";");
      // free() of a heap-allocated local carries no semantics here; the
      // printer re-emits it automatically, so drop it on input.
      if (s->callee == "free" && s->args.size() == 1)
        return nullptr;
      return s;
    }
    // Assignment.
    auto s = std::make_shared<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->loc = loc;
    if (atPunct("[")) {
      std::vector<ExprRef> subs;
      while (atPunct("[")) {
        take();
        subs.push_back(parseExpr());
        expectPunct("]");
      }
      s->lhs = Expr::access(name.text, std::move(subs), loc);
    } else {
      s->lhs = Expr::var(name.text, loc);
    }
    if (atPunct("+=") || atPunct("-=") || atPunct("*=")) {
      s->assignOp = take().text[0];
    } else if (atPunct("=")) {
      take();
      s->assignOp = '=';
    } else {
      error("expected assignment operator");
    }
    s->rhs = parseExpr();
    expectPunct(";");
    return s;
  }

  ExprRef parseCallArg() {
    if (atPunct("&")) {
      SourceLoc loc = take().loc;
      ExprRef inner = parseExpr();
      (void)loc;
      return Expr::addrOf(inner);
    }
    return parseExpr();
  }

  ExprRef parseCondExpr() {
    ExprRef e = parseExpr();
    while (atPunct("&&")) {
      take();
      e = Expr::binary('A', e, parseExpr());
    }
    return e;
  }

  ExprRef parseExpr() { return parseAdditive(); }

  ExprRef parseAdditive() {
    ExprRef e = parseMultiplicative();
    while (atPunct("+") || atPunct("-")) {
      char op = take().text[0];
      e = Expr::binary(op, e, parseMultiplicative());
    }
    return e;
  }

  ExprRef parseMultiplicative() {
    ExprRef e = parseUnary();
    while (atPunct("*") || atPunct("/") || atPunct("%")) {
      char op = take().text[0];
      e = Expr::binary(op, e, parseUnary());
    }
    return e;
  }

  ExprRef parseUnary() {
    if (atPunct("-")) {
      take();
      return Expr::unary('-', parseUnary());
    }
    if (atPunct("+")) {
      take();
      return parseUnary();
    }
    return parsePrimary();
  }

  ExprRef parsePrimary() {
    if (at(Token::Kind::Int)) {
      Token t = take();
      return Expr::intLit(t.intVal);
    }
    if (at(Token::Kind::Float)) {
      Token t = take();
      return Expr::floatLit(t.fltVal);
    }
    if (atPunct("(")) {
      take();
      ExprRef e = parseCondExpr();
      expectPunct(")");
      return e;
    }
    if (at(Token::Kind::Ident)) {
      Token t = take();
      if (atPunct("(")) {
        take();
        std::vector<ExprRef> args;
        if (!atPunct(")")) {
          while (true) {
            args.push_back(parseCallArg());
            if (atPunct(","))
              take();
            else
              break;
          }
        }
        expectPunct(")");
        return Expr::call(t.text, std::move(args), t.loc);
      }
      if (atPunct("[")) {
        std::vector<ExprRef> subs;
        while (atPunct("[")) {
          take();
          subs.push_back(parseExpr());
          expectPunct("]");
        }
        return Expr::access(t.text, std::move(subs), t.loc);
      }
      return Expr::var(t.text, t.loc);
    }
    error("expected expression, found '" + cur().text + "'");
  }

  //===--------------------------------------------------------------------===//
  // Post-parse validation and statement naming
  //===--------------------------------------------------------------------===//

  void finalizeFunction(Function &f) {
    assignNames(f);
    ScopeChecker checker(f);
    checker.checkBody(f.body);
    for (const auto &s : f.body)
      validatePragmaNests(f, *s, /*inAnnotated=*/false);
  }

  void assignNames(Function &f) {
    int assignIdx = 0;
    std::map<std::string, int> calleeCount;
    walkStmts(f.body, [&](Stmt &s) {
      if (s.kind == Stmt::Kind::Assign) {
        s.name = "Stmt" + std::to_string(assignIdx++);
      } else if (s.kind == Stmt::Kind::Call) {
        int n = ++calleeCount[s.callee];
        s.name = n == 1 ? s.callee : s.callee + "_" + std::to_string(n);
      }
    });
    // A second pass: a callee occurring more than once gets suffixes on all
    // occurrences for unambiguous naming.
    std::map<std::string, int> seen;
    walkStmts(f.body, [&](Stmt &s) {
      if (s.kind == Stmt::Kind::Call && calleeCount[s.callee] > 1)
        s.name = s.callee + "_" + std::to_string(++seen[s.callee]);
    });
  }

  template <typename Fn> void walkStmts(std::vector<StmtRef> &body, Fn fn) {
    for (auto &s : body) {
      fn(*s);
      walkStmts(s->body, fn);
      walkStmts(s->elseBody, fn);
    }
  }

  /// Declared-before-use and rank checking.
  class ScopeChecker {
  public:
    explicit ScopeChecker(const Function &f) : f_(f) {
      for (const auto &p : f.params)
        ranks_[p.name] = p.dims.size();
      for (const auto &d : f.locals)
        ranks_[d.name] = d.dims.size();
    }

    void checkBody(const std::vector<StmtRef> &body) {
      for (const auto &s : body)
        checkStmt(*s);
    }

  private:
    void checkStmt(const Stmt &s) {
      switch (s.kind) {
      case Stmt::Kind::Loop: {
        checkExpr(s.init);
        counters_.insert(s.counter);
        checkExpr(s.bound);
        checkBody(s.body);
        counters_.erase(s.counter);
        break;
      }
      case Stmt::Kind::Assign:
        checkExpr(s.lhs);
        checkExpr(s.rhs);
        break;
      case Stmt::Kind::Call:
        for (const auto &a : s.args)
          checkExpr(a);
        break;
      case Stmt::Kind::Block:
        checkBody(s.body);
        break;
      case Stmt::Kind::If:
        checkExpr(s.lhs);
        checkBody(s.body);
        checkBody(s.elseBody);
        break;
      }
    }

    void checkExpr(const ExprRef &e) {
      switch (e->kind) {
      case Expr::Kind::Var: {
        if (counters_.count(e->name))
          return;
        auto it = ranks_.find(e->name);
        if (it == ranks_.end())
          throw Diag(ErrCode::SyntaxError,
                     "use of undeclared identifier '" + e->name + "'", e->loc);
        if (it->second != 0)
          throw Diag(ErrCode::SyntaxError,
                     "array '" + e->name + "' used without subscripts", e->loc);
        return;
      }
      case Expr::Kind::Access: {
        auto it = ranks_.find(e->name);
        if (it == ranks_.end())
          throw Diag(ErrCode::SyntaxError,
                     "use of undeclared array '" + e->name + "'", e->loc);
        if (it->second != e->args.size())
          throw Diag(ErrCode::SyntaxError,
                     "array '" + e->name + "' has rank " +
                         std::to_string(it->second) + " but is accessed with " +
                         std::to_string(e->args.size()) + " subscripts",
                     e->loc);
        for (const auto &a : e->args)
          checkExpr(a);
        return;
      }
      case Expr::Kind::Call:
      case Expr::Kind::Unary:
      case Expr::Kind::Binary:
      case Expr::Kind::AddrOf:
        for (const auto &a : e->args)
          checkExpr(a);
        return;
      default:
        return;
      }
    }

    const Function &f_;
    std::map<std::string, size_t> ranks_;
    std::set<std::string> counters_;
  };

  /// Canonical-form and affinity checks inside pragma-annotated nests.
  void validatePragmaNests(const Function &f, const Stmt &s, bool inAnnotated) {
    bool annotated = inAnnotated || !s.pragmas.empty();
    if (!s.pragmas.empty() && s.kind == Stmt::Kind::Loop) {
      std::string why = checkCanonical(s);
      if (!why.empty())
        throw Diag(ErrCode::NonCanonicalLoop,
                   "pragma applies to a non-canonical loop: " + why, s.loc);
    }
    if (annotated)
      checkAffineAccesses(f, s);
    for (const auto &c : s.body)
      validatePragmaNests(f, *c, annotated);
    for (const auto &c : s.elseBody)
      validatePragmaNests(f, *c, annotated);
  }

  void checkAffineAccesses(const Function &, const Stmt &s) {
    auto checkE = [&](const ExprRef &e, auto &&self) -> void {
      if (e->kind == Expr::Kind::Access) {
        for (const auto &sub : e->args)
          if (!toAffine(sub))
            throw Diag(ErrCode::NonAffineAccess,
                       "non-affine subscript in transformed region: " +
                           printExpr(sub),
                       e->loc);
      }
      for (const auto &a : e->args)
        self(a, self);
    };
    switch (s.kind) {
    case Stmt::Kind::Assign:
      checkE(s.lhs, checkE);
      checkE(s.rhs, checkE);
      break;
    case Stmt::Kind::Call:
      for (const auto &a : s.args)
        checkE(a, checkE);
      break;
    default:
      break;
    }
  }

  Lexer lexer_;
  const std::vector<Token> &toks_;
  size_t idx_ = 0;
};

/// Collects counters modified in a statement subtree.
void collectModified(const Stmt &s, std::set<std::string> &out) {
  switch (s.kind) {
  case Stmt::Kind::Assign:
    if (s.lhs->kind == Expr::Kind::Var)
      out.insert(s.lhs->name);
    break;
  case Stmt::Kind::Loop:
    out.insert(s.counter);
    for (const auto &c : s.body)
      collectModified(*c, out);
    break;
  default:
    for (const auto &c : s.body)
      collectModified(*c, out);
    for (const auto &c : s.elseBody)
      collectModified(*c, out);
    break;
  }
}

} // namespace

Program parse_source(const std::string &text) {
  Parser parser(text);
  return parser.parse();
}

std::string checkCanonical(const Stmt &loop) {
  if (loop.kind != Stmt::Kind::Loop)
    return "not a for-loop";
  if (!toAffine(loop.init))
    return "non-affine initialization '" + printExpr(loop.init) + "'";
  if (!toAffine(loop.bound))
    return "non-affine bound '" + printExpr(loop.bound) + "'";
  if (loop.step == 0)
    return "zero step";
  bool up = loop.step > 0;
  bool cmpUp = loop.cmp == CmpOp::LT || loop.cmp == CmpOp::LE;
  if (up != cmpUp)
    return "step direction does not match comparison";
  std::set<std::string> modified;
  for (const auto &c : loop.body)
    collectModified(*c, modified);
  if (modified.count(loop.counter))
    return "counter '" + loop.counter + "' is modified in the loop body";
  if (loop.step < -1) {
    // Downward strided loops are only normalizable when the span is known.
    AffineExpr lowIncl = loop.cmp == CmpOp::GT ? *toAffine(loop.bound) + 1
                                               : *toAffine(loop.bound);
    if (!(*toAffine(loop.init) - lowIncl).tryConstant())
      return "downward loop with step > 1 and parametric range";
  }
  return "";
}

LoopRange normalizeLoop(const Stmt &loop) {
  std::string why = checkCanonical(loop);
  if (!why.empty())
    throw Diag(ErrCode::NonCanonicalLoop, why, loop.loc);
  AffineExpr init = *toAffine(loop.init);
  AffineExpr bound = *toAffine(loop.bound);
  LoopRange r;
  if (loop.step > 0) {
    r.step = loop.step;
    r.reversed = false;
    r.lower = init;
    r.upperExcl = loop.cmp == CmpOp::LT ? bound : bound + 1;
    return r;
  }
  // Downward loop: values init, init-s, ..., >= lowest. Normalize to an
  // upward range anchored so the top value is exactly `init`.
  int64_t s = -loop.step;
  r.step = s;
  r.reversed = true;
  AffineExpr lowIncl = loop.cmp == CmpOp::GT ? bound + 1 : bound;
  r.upperExcl = init + 1;
  if (s == 1) {
    r.lower = lowIncl;
    return r;
  }
  AffineExpr span = init - lowIncl;
  if (auto k = span.tryConstant()) {
    if (*k < 0) {
      r.lower = init + 1; // empty range
      return r;
    }
    r.lower = init - (*k / s) * s;
    return r;
  }
  throw Diag(ErrCode::NonCanonicalLoop,
             "downward loop with step > 1 and parametric range", loop.loc);
}

std::pair<AffineExpr, AffineExpr> canonical_range(const Stmt &loop) {
  LoopRange r = normalizeLoop(loop);
  AffineExpr span = r.upperExcl - r.lower;
  if (r.step == 1)
    return {r.lower, span};
  if (auto k = span.tryConstant())
    return {r.lower, AffineExpr(*k <= 0 ? 0 : (*k + r.step - 1) / r.step)};
  throw Diag(ErrCode::NonCanonicalLoop,
             "parametric trip count with step > 1 has no affine closed form",
             loop.loc);
}

} // namespace loopforge
