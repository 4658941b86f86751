//===- legality.cpp - instance-level dependence oracle ----------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/legality.hpp"

#include "loopforge/affine.hpp"

#include <functional>

namespace loopforge {

namespace {

/// One memory access of a statement instance.
struct Access {
  std::string array;
  std::vector<int64_t> element;
  bool write = false;
};

int64_t evalExpr(const ExprRef &e, const std::map<std::string, int64_t> &env) {
  switch (e->kind) {
  case Expr::Kind::IntLit:
    return e->intVal;
  case Expr::Kind::FloatLit:
    return static_cast<int64_t>(e->fltVal);
  case Expr::Kind::Var: {
    auto it = env.find(e->name);
    if (it == env.end())
      throw Diag(ErrCode::EvalError,
                 "non-affine subscript: unbound '" + e->name + "'", e->loc);
    return it->second;
  }
  case Expr::Kind::Unary:
    return -evalExpr(e->args[0], env);
  case Expr::Kind::Binary: {
    int64_t a = evalExpr(e->args[0], env);
    int64_t b = evalExpr(e->args[1], env);
    switch (e->op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/':
      if (b == 0)
        throw Diag(ErrCode::EvalError, "division by zero", e->loc);
      return a / b;
    case '%':
      if (b == 0)
        throw Diag(ErrCode::EvalError, "division by zero", e->loc);
      return a % b;
    default:
      throw Diag(ErrCode::EvalError, "unsupported operator in subscript",
                 e->loc);
    }
  }
  case Expr::Kind::Call:
    if (e->name == "min" || e->name == "max") {
      int64_t v = evalExpr(e->args[0], env);
      for (size_t i = 1; i < e->args.size(); ++i) {
        int64_t w = evalExpr(e->args[i], env);
        v = e->name == "min" ? std::min(v, w) : std::max(v, w);
      }
      return v;
    }
    if (e->name == "floord" && e->args.size() == 2)
      return floordiv(evalExpr(e->args[0], env), evalExpr(e->args[1], env));
    throw Diag(ErrCode::EvalError, "opaque call in subscript", e->loc);
  case Expr::Kind::Access:
  case Expr::Kind::AddrOf:
    throw Diag(ErrCode::EvalError, "non-affine subscript", e->loc);
  }
  return 0;
}

/// Collects the memory accesses of one statement instance. Arrays and scalar
/// locals are memory; parameters and loop counters (present in `env`) are
/// not. `isScalarLocal` distinguishes the two for bare identifiers.
class AccessCollector {
public:
  AccessCollector(const Function &f, const std::map<std::string, int64_t> &env)
      : func(f), env(env) {}

  std::vector<Access> collect(const Stmt &s) {
    out.clear();
    if (s.kind == Stmt::Kind::Assign) {
      readsOf(s.rhs);
      if (s.lhs->kind == Expr::Kind::Access) {
        std::vector<int64_t> idx;
        for (const ExprRef &a : s.lhs->args)
          idx.push_back(evalExpr(a, env));
        if (s.assignOp != '=')
          out.push_back({s.lhs->name, idx, false});
        out.push_back({s.lhs->name, idx, true});
      } else {
        if (s.assignOp != '=')
          out.push_back({s.lhs->name, {}, false});
        out.push_back({s.lhs->name, {}, true});
      }
    } else if (s.kind == Stmt::Kind::Call) {
      for (const ExprRef &a : s.args)
        readsOf(a);
    }
    return out;
  }

private:
  const Function &func;
  const std::map<std::string, int64_t> &env;
  std::vector<Access> out;

  void readsOf(const ExprRef &e) {
    switch (e->kind) {
    case Expr::Kind::Access: {
      std::vector<int64_t> idx;
      for (const ExprRef &a : e->args)
        idx.push_back(evalExpr(a, env));
      out.push_back({e->name, idx, false});
      return;
    }
    case Expr::Kind::Var: {
      // Counters and scalar parameters are not memory; scalar locals are.
      const ArrayDecl *d = func.findLocal(e->name);
      if (d && d->dims.empty())
        out.push_back({e->name, {}, false});
      return;
    }
    case Expr::Kind::AddrOf:
      readsOf(e->args[0]);
      return;
    case Expr::Kind::Unary:
    case Expr::Kind::Binary:
    case Expr::Kind::Call:
      for (const ExprRef &a : e->args)
        readsOf(a);
      return;
    case Expr::Kind::IntLit:
    case Expr::Kind::FloatLit:
      return;
    }
  }
};

/// Instance plus its accesses, in execution order.
struct OrderedInstance {
  Instance inst;
  std::vector<Access> accesses;
};

void walkOrder(const TreeRef &n, const Function &f,
               std::map<std::string, int64_t> &env,
               std::vector<OrderedInstance> &out, size_t cap) {
  switch (n->kind) {
  case ScheduleNode::Kind::Domain:
  case ScheduleNode::Kind::Sequence:
    for (const TreeRef &c : n->children)
      walkOrder(c, f, env, out, cap);
    return;
  case ScheduleNode::Kind::Band: {
    int64_t lo = n->lower.eval(env);
    int64_t hi = BoundExpr::min(std::vector<BoundExpr>(n->uppers)).eval(env);
    auto saved = env.find(n->counter) != env.end()
                     ? std::optional<int64_t>(env[n->counter])
                     : std::nullopt;
    if (lo < hi) {
      if (n->reversed) {
        int64_t last = lo + n->step * floordiv(hi - 1 - lo, n->step);
        for (int64_t v = last; v >= lo; v -= n->step) {
          env[n->counter] = v;
          walkOrder(n->children[0], f, env, out, cap);
        }
      } else {
        for (int64_t v = lo; v < hi; v += n->step) {
          env[n->counter] = v;
          walkOrder(n->children[0], f, env, out, cap);
        }
      }
    }
    if (saved)
      env[n->counter] = *saved;
    else
      env.erase(n->counter);
    return;
  }
  case ScheduleNode::Kind::Leaf: {
    if (out.size() >= cap)
      throw Diag(ErrCode::InstanceCapExceeded,
                 "instance cap exceeded during dependence analysis");
    OrderedInstance oi;
    oi.inst.leafKey = n->stmt ? n->stmt->name : n->leafKey;
    oi.inst.isCopy = n->isCopy;
    std::map<std::string, int64_t> stmtEnv = env;
    for (const Coord &c : n->coords) {
      int64_t v = c.expr.eval(env);
      oi.inst.coords.push_back(v);
      stmtEnv[c.counter] = v;
    }
    // Packing copies are exempt: their soundness comes from packing
    // transparency, not the dependence oracle.
    if (!n->isCopy)
      oi.accesses = AccessCollector(f, stmtEnv).collect(*n->stmt);
    out.push_back(std::move(oi));
    return;
  }
  }
}

} // namespace

const char *depKindName(DepKind k) {
  switch (k) {
  case DepKind::Flow: return "flow";
  case DepKind::Anti: return "anti";
  case DepKind::Output: return "output";
  }
  return "?";
}

std::string Dependence::str() const {
  std::string s = std::string(depKindName(kind)) + " " + src.str() + " -> " +
                  dst.str() + " on " + array;
  for (int64_t v : element)
    s += "[" + std::to_string(v) + "]";
  return s;
}

DependenceSet compute_dependences(const Function &f, const TreeRef &tree,
                                  const std::map<std::string, int64_t> &params,
                                  size_t cap) {
  std::map<std::string, int64_t> env = params;
  std::vector<OrderedInstance> order;
  walkOrder(tree, f, env, order, cap);

  // Per element: last writer and the readers since that write.
  struct ElemState {
    std::optional<size_t> lastWrite;
    std::vector<size_t> readsSinceWrite;
  };
  std::map<std::pair<std::string, std::vector<int64_t>>, ElemState> state;

  DependenceSet deps;
  for (size_t i = 0; i < order.size(); ++i) {
    for (const Access &a : order[i].accesses) {
      ElemState &st = state[{a.array, a.element}];
      if (a.write) {
        if (st.lastWrite)
          deps.push_back({order[*st.lastWrite].inst, order[i].inst,
                          DepKind::Output, a.array, a.element});
        for (size_t r : st.readsSinceWrite)
          if (!(order[r].inst == order[i].inst))
            deps.push_back({order[r].inst, order[i].inst, DepKind::Anti,
                            a.array, a.element});
        st.lastWrite = i;
        st.readsSinceWrite.clear();
      } else {
        if (st.lastWrite && !(order[*st.lastWrite].inst == order[i].inst))
          deps.push_back({order[*st.lastWrite].inst, order[i].inst,
                          DepKind::Flow, a.array, a.element});
        st.readsSinceWrite.push_back(i);
      }
    }
  }
  return deps;
}

std::string Verdict::str() const {
  if (legal)
    return "legal";
  std::string s = "illegal";
  if (witness)
    s += ": " + witness->str();
  if (!binding.empty()) {
    s += " at";
    for (const auto &[k, v] : binding)
      s += " " + k + "=" + std::to_string(v);
  }
  return s;
}

std::vector<std::map<std::string, int64_t>>
grid_bindings(const Function &f, const std::vector<int64_t> &values) {
  std::vector<std::string> names;
  for (const Param &p : f.params)
    if (p.dims.empty())
      names.push_back(p.name);
  std::vector<std::map<std::string, int64_t>> out{{}};
  for (const std::string &n : names) {
    std::vector<std::map<std::string, int64_t>> next;
    for (const auto &base : out)
      for (int64_t v : values) {
        auto b = base;
        b[n] = v;
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

Verdict check_legal(const Function &f, const TreeRef &before,
                    const TreeRef &after,
                    const std::vector<std::map<std::string, int64_t>> &grid,
                    size_t cap) {
  for (const auto &binding : grid) {
    DependenceSet deps = compute_dependences(f, before, binding, cap);
    if (deps.empty())
      continue;
    std::vector<Instance> order = enumerate_order(after, binding, cap);
    std::map<Instance, size_t> pos;
    for (size_t i = 0; i < order.size(); ++i)
      if (!order[i].isCopy && !pos.count(order[i]))
        pos[order[i]] = i;
    for (const Dependence &d : deps) {
      auto s = pos.find(d.src);
      auto t = pos.find(d.dst);
      if (s == pos.end() || t == pos.end() || s->second >= t->second) {
        Verdict v;
        v.legal = false;
        v.witness = d;
        v.binding = binding;
        return v;
      }
    }
  }
  return {};
}

std::string ReportEntry::line() const {
  std::string l = loc.valid() ? loc.str() : "-";
  return l + "\t" + kind + "\t" + verdict + "\t" + witness;
}

PolicyAction apply_policy(const Verdict &verdict, const Directive &directive,
                          PolicyMode mode, std::vector<ReportEntry> &report) {
  ReportEntry e;
  e.loc = directive.loc;
  e.kind = dirKindName(directive.kind);
  if (verdict.legal) {
    e.verdict = "legal";
    report.push_back(e);
    return PolicyAction::Apply;
  }
  e.witness = verdict.witness ? verdict.witness->str() : "-";
  if (!directive.forced) {
    e.verdict = "skipped-hint";
    report.push_back(e);
    return PolicyAction::Skip;
  }
  switch (mode) {
  case PolicyMode::ForcedError:
    e.verdict = "illegal";
    report.push_back(e);
    throw Diag(ErrCode::IllegalTransformation,
               std::string(dirKindName(directive.kind)) +
                   " violates a dependence: " + verdict.str(),
               directive.loc);
  case PolicyMode::ForcedWarnSkip:
    e.verdict = "skipped-warning";
    report.push_back(e);
    return PolicyAction::Skip;
  case PolicyMode::SilentSkip:
    e.verdict = "skipped";
    report.push_back(e);
    return PolicyAction::Skip;
  }
  return PolicyAction::Skip;
}

} // namespace loopforge
