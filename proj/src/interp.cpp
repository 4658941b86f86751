//===- interp.cpp - reference interpreter for mini-C ------------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/interp.hpp"

#include "loopforge/affine.hpp"

#include <algorithm>
#include <set>

namespace loopforge {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string indexStr(const std::vector<int64_t> &index) {
  std::string s;
  for (int64_t v : index)
    s += "[" + std::to_string(v) + "]";
  return s;
}

class Machine {
public:
  Machine(const Function &f, const std::map<std::string, int64_t> &params,
          uint64_t seed, int64_t budget)
      : func(f), scalars(params), seed(seed), budget(budget) {
    for (const Param &p : f.params)
      if (!p.dims.empty())
        extents[p.name] = evalDims(p.dims);
    for (const ArrayDecl &d : f.locals)
      if (!d.dims.empty())
        extents[d.name] = evalDims(d.dims);
  }

  RunResult run() {
    for (const StmtRef &s : func.body)
      exec(*s);
    RunResult r;
    r.stores = std::move(stores);
    r.trace = std::move(trace);
    return r;
  }

private:
  const Function &func;
  std::map<std::string, int64_t> scalars; // params, counters, scalar locals
  std::map<std::string, std::vector<int64_t>> extents;
  std::map<std::string, ArrayStore> stores;
  std::vector<TraceEntry> trace;
  std::vector<std::string> loopStack;
  uint64_t seed;
  int64_t budget;

  std::vector<int64_t> evalDims(const std::vector<ExprRef> &dims) {
    std::vector<int64_t> out;
    for (const ExprRef &d : dims)
      out.push_back(eval(d));
    return out;
  }

  void charge(SourceLoc loc) {
    if (--budget < 0)
      throw Diag(ErrCode::BudgetExceeded, "interpreter step budget exhausted",
                 loc);
  }

  std::vector<int64_t> coords() const {
    std::vector<int64_t> c;
    for (const std::string &ctr : loopStack)
      c.push_back(scalars.at(ctr));
    return c;
  }

  int64_t load(const std::string &name, const std::vector<int64_t> &index,
               SourceLoc loc) {
    checkBounds(name, index, loc);
    ArrayStore &st = stores[name];
    auto it = st.find(index);
    if (it != st.end())
      return it->second;
    return seeded_fill(name, index, seed);
  }

  void store(const std::string &name, const std::vector<int64_t> &index,
             int64_t value, SourceLoc loc) {
    checkBounds(name, index, loc);
    stores[name][index] = value;
  }

  void checkBounds(const std::string &name, const std::vector<int64_t> &index,
                   SourceLoc loc, bool addressOnly = false) {
    auto it = extents.find(name);
    if (it == extents.end())
      throw Diag(ErrCode::EvalError, "unknown array '" + name + "'", loc);
    const std::vector<int64_t> &ext = it->second;
    if (index.size() != ext.size())
      throw Diag(ErrCode::EvalError,
                 "array '" + name + "' subscript rank mismatch", loc);
    // Taking an address never reads memory, so the one-past-the-end
    // position is allowed, as in C.
    for (size_t i = 0; i < index.size(); ++i)
      if (index[i] < 0 || index[i] >= ext[i] + (addressOnly ? 1 : 0))
        throw Diag(ErrCode::OutOfBounds,
                   "access " + name + indexStr(index) + " outside extent " +
                       indexStr(ext),
                   loc);
  }

  int64_t eval(const ExprRef &e) {
    switch (e->kind) {
    case Expr::Kind::IntLit:
      return e->intVal;
    case Expr::Kind::FloatLit:
      return static_cast<int64_t>(e->fltVal);
    case Expr::Kind::Var: {
      auto it = scalars.find(e->name);
      if (it != scalars.end())
        return it->second;
      if (const ArrayDecl *d = func.findLocal(e->name); d && d->dims.empty())
        return seeded_fill(e->name, {}, seed);
      throw Diag(ErrCode::EvalError, "unbound variable '" + e->name + "'",
                 e->loc);
    }
    case Expr::Kind::Access: {
      std::vector<int64_t> index;
      for (const ExprRef &a : e->args)
        index.push_back(eval(a));
      return load(e->name, index, e->loc);
    }
    case Expr::Kind::Unary:
      return -eval(e->args[0]);
    case Expr::Kind::Binary: {
      int64_t a = eval(e->args[0]);
      if (e->op == 'A') // short-circuit &&
        return a != 0 && eval(e->args[1]) != 0;
      int64_t b = eval(e->args[1]);
      switch (e->op) {
      case '+':
        return a + b;
      case '-':
        return a - b;
      case '*':
        return a * b;
      case '/':
        if (b == 0)
          throw Diag(ErrCode::EvalError, "division by zero", e->loc);
        return a / b;
      case '%':
        if (b == 0)
          throw Diag(ErrCode::EvalError, "division by zero", e->loc);
        return a % b;
      default:
        throw Diag(ErrCode::EvalError,
                   std::string("unknown operator '") + e->op + "'", e->loc);
      }
    }
    case Expr::Kind::Call: {
      if (e->name == "min" || e->name == "max") {
        if (e->args.size() < 2)
          throw Diag(ErrCode::EvalError, e->name + " needs two arguments",
                     e->loc);
        int64_t v = eval(e->args[0]);
        for (size_t i = 1; i < e->args.size(); ++i) {
          int64_t w = eval(e->args[i]);
          v = e->name == "min" ? std::min(v, w) : std::max(v, w);
        }
        return v;
      }
      if (e->name == "floord") {
        if (e->args.size() != 2)
          throw Diag(ErrCode::EvalError, "floord needs two arguments", e->loc);
        int64_t num = eval(e->args[0]);
        int64_t den = eval(e->args[1]);
        if (den <= 0)
          throw Diag(ErrCode::EvalError, "floord divisor must be positive",
                     e->loc);
        return floordiv(num, den);
      }
      if (e->name == "no_overlap") {
        // The interpreter's arrays never alias; the predicate always holds.
        for (const ExprRef &a : e->args)
          evalArg(a);
        return 1;
      }
      throw Diag(ErrCode::EvalError,
                 "opaque call '" + e->name + "' used as a value", e->loc);
    }
    case Expr::Kind::AddrOf:
      throw Diag(ErrCode::EvalError, "address-of used as a value", e->loc);
    }
    return 0;
  }

  // Call arguments additionally allow &A[...]: its subscripts are evaluated
  // (and bounds-checked) without reading the element.
  void evalArg(const ExprRef &e) {
    if (e->kind == Expr::Kind::AddrOf) {
      const ExprRef &inner = e->args[0];
      if (inner->kind == Expr::Kind::Access) {
        std::vector<int64_t> index;
        for (const ExprRef &a : inner->args)
          index.push_back(eval(a));
        checkBounds(inner->name, index, inner->loc, /*addressOnly=*/true);
        return;
      }
      eval(inner);
      return;
    }
    eval(e);
  }

  void exec(const Stmt &s) {
    switch (s.kind) {
    case Stmt::Kind::Block:
      for (const StmtRef &c : s.body)
        exec(*c);
      return;
    case Stmt::Kind::If: {
      charge(s.loc);
      const auto &branch = eval(s.lhs) != 0 ? s.body : s.elseBody;
      for (const StmtRef &c : branch)
        exec(*c);
      return;
    }
    case Stmt::Kind::Loop:
      execLoop(s);
      return;
    case Stmt::Kind::Assign:
      execAssign(s);
      return;
    case Stmt::Kind::Call:
      execCall(s);
      return;
    }
  }

  void execLoop(const Stmt &s) {
    int64_t i = eval(s.init);
    auto shadowed = scalars.find(s.counter);
    bool hadShadow = shadowed != scalars.end();
    int64_t shadowVal = hadShadow ? shadowed->second : 0;
    loopStack.push_back(s.counter);
    while (true) {
      scalars[s.counter] = i;
      int64_t b = eval(s.bound);
      bool cont = false;
      switch (s.cmp) {
      case CmpOp::LT:
        cont = i < b;
        break;
      case CmpOp::LE:
        cont = i <= b;
        break;
      case CmpOp::GT:
        cont = i > b;
        break;
      case CmpOp::GE:
        cont = i >= b;
        break;
      }
      if (!cont)
        break;
      charge(s.loc);
      for (const StmtRef &c : s.body)
        exec(*c);
      i += s.step;
    }
    loopStack.pop_back();
    if (hadShadow)
      scalars[s.counter] = shadowVal;
    else
      scalars.erase(s.counter);
  }

  void execAssign(const Stmt &s) {
    charge(s.loc);
    int64_t rhs = eval(s.rhs);
    if (s.lhs->kind == Expr::Kind::Access) {
      std::vector<int64_t> index;
      for (const ExprRef &a : s.lhs->args)
        index.push_back(eval(a));
      int64_t v = rhs;
      if (s.assignOp != '=') {
        int64_t old = load(s.lhs->name, index, s.loc);
        v = s.assignOp == '+'   ? old + rhs
            : s.assignOp == '-' ? old - rhs
                                : old * rhs;
      }
      store(s.lhs->name, index, v, s.loc);
    } else {
      const std::string &n = s.lhs->name;
      int64_t v = rhs;
      if (s.assignOp != '=') {
        auto it = scalars.find(n);
        int64_t old = it != scalars.end() ? it->second
                                          : seeded_fill(n, {}, seed);
        v = s.assignOp == '+'   ? old + rhs
            : s.assignOp == '-' ? old - rhs
                                : old * rhs;
      }
      scalars[n] = v;
    }
    trace.push_back({s.name, coords()});
  }

  void execCall(const Stmt &s) {
    charge(s.loc);
    for (const ExprRef &a : s.args)
      evalArg(a);
    trace.push_back({s.name, coords()});
  }
};

} // namespace

int64_t seeded_fill(const std::string &name, const std::vector<int64_t> &index,
                    uint64_t seed) {
  uint64_t h = splitmix64(seed);
  for (char c : name)
    h = splitmix64(h ^ static_cast<uint64_t>(static_cast<unsigned char>(c)));
  for (int64_t v : index)
    h = splitmix64(h ^ static_cast<uint64_t>(v));
  return static_cast<int64_t>(h % 201) - 100;
}

std::string TraceEntry::str() const {
  std::string s = name + "[";
  for (size_t i = 0; i < coords.size(); ++i) {
    if (i)
      s += ", ";
    s += std::to_string(coords[i]);
  }
  return s + "]";
}

RunResult run(const Function &f, const std::map<std::string, int64_t> &params,
              uint64_t seed, int64_t budget) {
  return Machine(f, params, seed, budget).run();
}

std::string EquivResult::str() const {
  if (equal)
    return "equal";
  return array + indexStr(index) + ": " + std::to_string(lhs) +
         " != " + std::to_string(rhs);
}

EquivResult equivalent(const Function &a, const Function &b,
                       const std::map<std::string, int64_t> &params,
                       uint64_t seed, int64_t budget) {
  RunResult ra = run(a, params, seed, budget);
  RunResult rb = run(b, params, seed, budget);

  auto comparable = [&](const std::string &name) {
    if (name.rfind("Packed_", 0) == 0)
      return false;
    return a.arrayDims(name) != nullptr && b.arrayDims(name) != nullptr;
  };

  EquivResult res;
  std::map<std::string, std::set<std::vector<int64_t>>> keys;
  for (const auto &[name, st] : ra.stores)
    if (comparable(name))
      for (const auto &[idx, v] : st)
        keys[name].insert(idx);
  for (const auto &[name, st] : rb.stores)
    if (comparable(name))
      for (const auto &[idx, v] : st)
        keys[name].insert(idx);

  auto valueOf = [&](const RunResult &r, const std::string &name,
                     const std::vector<int64_t> &idx) {
    auto sit = r.stores.find(name);
    if (sit != r.stores.end()) {
      auto it = sit->second.find(idx);
      if (it != sit->second.end())
        return it->second;
    }
    return seeded_fill(name, idx, seed);
  };

  for (const auto &[name, idxSet] : keys)
    for (const std::vector<int64_t> &idx : idxSet) {
      int64_t va = valueOf(ra, name, idx);
      int64_t vb = valueOf(rb, name, idx);
      if (va != vb) {
        res.equal = false;
        res.array = name;
        res.index = idx;
        res.lhs = va;
        res.rhs = vb;
        return res;
      }
    }
  return res;
}

} // namespace loopforge
