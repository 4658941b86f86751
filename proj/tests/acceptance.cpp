// SPDX-License-Identifier: Apache-2.0
//
// Acceptance harness: one pass/fail line per criterion.
//
//   usage: loopforge_acceptance [path-to-cli] [golden-dir]
//
// Criteria:
//   1. structural goldens for the single-transformation examples
//   2. matmul end-to-end against a checked-in golden file
//   3. interpreter equivalence: matmul at desk scale + generator corpus
//   4. legality oracle cross-check: soundness + seeded illegal witnesses
//   5. sugar identities: tile = stripmine+interchange, unroll_and_jam =
//      unroll+fuse, as execution-order equality
//   6. policy behavior of the command-line tool
//   7. (optional smoke) emitted C compiles and matches the interpreter

#include "loopforge/pipeline.hpp"
#include "loopforge/transform.hpp"

#include "gen.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sys/wait.h>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace loopforge;

namespace {

std::string cliPath;
std::string goldenDir;

std::string readFile(const std::string &path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

//===----------------------------------------------------------------------===//
// Counter canonicalization: rename every loop counter to k0, k1, ... in
// program order so two structurally equal nests print identically.
//===----------------------------------------------------------------------===//

ExprRef renameExpr(const ExprRef &e,
                   const std::map<std::string, std::string> &m) {
  if (!e)
    return e;
  auto n = std::make_shared<Expr>(*e);
  n->args.clear();
  for (const ExprRef &a : e->args)
    n->args.push_back(renameExpr(a, m));
  if (e->kind == Expr::Kind::Var) {
    auto it = m.find(e->name);
    if (it != m.end())
      n->name = it->second;
  }
  // min/max are commutative; order their arguments deterministically.
  if (n->kind == Expr::Kind::Call && (n->name == "min" || n->name == "max"))
    std::sort(n->args.begin(), n->args.end(),
              [](const ExprRef &a, const ExprRef &b) {
                return printExpr(a) < printExpr(b);
              });
  return n;
}

void renameStmt(Stmt &s, std::map<std::string, std::string> &m, int &next) {
  s.lhs = renameExpr(s.lhs, m);
  s.rhs = renameExpr(s.rhs, m);
  for (ExprRef &a : s.args)
    a = renameExpr(a, m);
  if (s.kind == Stmt::Kind::Loop) {
    s.init = renameExpr(s.init, m);
    s.bound = renameExpr(s.bound, m);
    std::string fresh = "k" + std::to_string(next++);
    auto old = m.find(s.counter);
    std::optional<std::string> saved;
    if (old != m.end())
      saved = old->second;
    std::string source = s.counter;
    m[source] = fresh;
    s.counter = fresh;
    for (StmtRef &c : s.body)
      renameStmt(*c, m, next);
    if (saved)
      m[source] = *saved;
    else
      m.erase(source);
    return;
  }
  for (StmtRef &c : s.body)
    renameStmt(*c, m, next);
  for (StmtRef &c : s.elseBody)
    renameStmt(*c, m, next);
}

/// Canonical text: print, reparse (to unify expression shapes), rename
/// counters, print again without pragmas.
std::string canon(const Function &f) {
  PrintOptions np;
  np.includePragmas = false;
  Program p = parse_source(printFunction(f, np));
  Function &g = p.functions[0];
  int next = 0;
  std::map<std::string, std::string> m;
  for (StmtRef &s : g.body)
    renameStmt(*s, m, next);
  return printFunction(g, np);
}

bool goldenCase(const char *label, const std::string &input,
                const std::string &expected, std::string &detail) {
  PipelineResult r = run_pipeline(parse_source(input));
  std::string got = canon(r.output.functions[0]);
  std::string want = canon(parse_source(expected).functions[0]);
  if (got == want)
    return true;
  detail += std::string("  [") + label + "] mismatch\n  expected:\n" + want +
            "  got:\n" + got;
  return false;
}

//===----------------------------------------------------------------------===//
// Criterion 1: structural goldens for single transformations.
//===----------------------------------------------------------------------===//

bool criterion1(std::string &detail) {
  bool ok = true;

  ok &= goldenCase("reverse",
                   "void f(int n) {\n"
                   "#pragma clang loop reverse\n"
                   "  for (int i = 0; i < n; i += 1)\n"
                   "    Stmt(i);\n"
                   "}\n",
                   "void f(int n) {\n"
                   "  for (int i = n - 1; i >= 0; i -= 1)\n"
                   "    Stmt(i);\n"
                   "}\n",
                   detail);

  ok &= goldenCase("interchange",
                   "void f(int n, int m) {\n"
                   "#pragma clang loop(i, j) interchange permutation(j, i)\n"
                   "#pragma clang loop id(i)\n"
                   "  for (int i = 0; i < n; i += 1)\n"
                   "#pragma clang loop id(j)\n"
                   "    for (int j = 0; j < m; j += 1)\n"
                   "      Stmt(i, j);\n"
                   "}\n",
                   "void f(int n, int m) {\n"
                   "  for (int j = 0; j < m; j += 1)\n"
                   "    for (int i = 0; i < n; i += 1)\n"
                   "      Stmt(i, j);\n"
                   "}\n",
                   detail);

  ok &= goldenCase(
      "tile",
      "void f(int n, int m) {\n"
      "#pragma clang loop(i, j) tile sizes(4, 8)\n"
      "#pragma clang loop id(i)\n"
      "  for (int i = 0; i < n; i += 1)\n"
      "#pragma clang loop id(j)\n"
      "    for (int j = 0; j < m; j += 1)\n"
      "      Stmt(i, j);\n"
      "}\n",
      "void f(int n, int m) {\n"
      "  for (int i1 = 0; i1 < n; i1 += 4)\n"
      "    for (int j1 = 0; j1 < m; j1 += 8)\n"
      "      for (int i2 = i1; i2 < min(n, i1 + 4); i2 += 1)\n"
      "        for (int j2 = j1; j2 < min(m, j1 + 8); j2 += 1)\n"
      "          Stmt(i2, j2);\n"
      "}\n",
      detail);

  ok &= goldenCase(
      "stripmine",
      "void f() {\n"
      "#pragma clang loop stripmine size(4) pit_id(i1) strip_id(i2)\n"
      "  for (int i = 0; i < 128; i += 1)\n"
      "    Stmt(i);\n"
      "}\n",
      "void f() {\n"
      "  for (int i1 = 0; i1 < 128; i1 += 4)\n"
      "    for (int i2 = i1; i2 < min(128, i1 + 4); i2 += 1)\n"
      "      Stmt(i2);\n"
      "}\n",
      detail);

  ok &= goldenCase("unroll-then-reverse",
                   "void f() {\n"
                   "#pragma clang loop reverse\n"
                   "#pragma clang loop unroll factor(2)\n"
                   "  for (int i = 0; i < 128; i += 1)\n"
                   "    Stmt(i);\n"
                   "}\n",
                   "void f() {\n"
                   "  for (int i = 126; i >= 0; i -= 2) {\n"
                   "    Stmt(i);\n"
                   "    Stmt(i + 1);\n"
                   "  }\n"
                   "}\n",
                   detail);

  ok &= goldenCase("pack",
                   "void g(int n, double A[32][n]) {\n"
                   "  for (int i = 0; i < n; i += 1)\n"
                   "#pragma clang loop pack array(A)\n"
                   "    for (int j = 0; j < 32; j += 1)\n"
                   "      f(A[j][i], i);\n"
                   "}\n",
                   "void g(int n, double A[32][n]) {\n"
                   "  double Packed_A[32];\n"
                   "  for (int i = 0; i < n; i += 1) {\n"
                   "    for (int t = 0; t < 32; t += 1)\n"
                   "      Packed_A[t] = A[t][i];\n"
                   "    for (int j = 0; j < 32; j += 1)\n"
                   "      f(Packed_A[j], i);\n"
                   "  }\n"
                   "}\n",
                   detail);

  return ok;
}

//===----------------------------------------------------------------------===//
// Criterion 2: matmul against the checked-in golden file.
//===----------------------------------------------------------------------===//

bool criterion2(std::string &detail) {
  std::string input = readFile(goldenDir + "/matmul.c");
  std::string want = readFile(goldenDir + "/matmul_expected.c");
  if (input.empty() || want.empty()) {
    detail += "  golden files missing under " + goldenDir + "\n";
    return false;
  }
  PipelineOptions opts;
  opts.style = CodegenStyle::Normalized;
  opts.maxInstances = 20000; // full-size nests exceed any practical cap
  PipelineResult r = run_pipeline(parse_source(input), opts);
  std::string got = emit_c(r.output);
  if (got == want)
    return true;
  detail += "  matmul output does not match matmul_expected.c\n";
  return false;
}

//===----------------------------------------------------------------------===//
// Criterion 3: interpreter equivalence.
//===----------------------------------------------------------------------===//

const char *kDeskMatmul =
    "void matmul(int M, int N, int K, double C[M][N], double A[M][K], "
    "double B[K][N]) {\n"
    "#pragma clang loop(j2) pack array(A)\n"
    "#pragma clang loop(i1) pack array(B)\n"
    "#pragma clang loop(i1, j1, k1, i2, j2, k2) interchange "
    "permutation(j1, k1, i1, j2, i2, k2)\n"
    "#pragma clang loop(i, j, k) tile sizes(2, 3, 2) "
    "pit_ids(i1, j1, k1) tile_ids(i2, j2, k2)\n"
    "#pragma clang loop id(i)\n"
    "  for (int i = 0; i < M; i += 1)\n"
    "#pragma clang loop id(j)\n"
    "    for (int j = 0; j < N; j += 1)\n"
    "#pragma clang loop id(k)\n"
    "      for (int k = 0; k < K; k += 1)\n"
    "        C[i][j] += A[i][k] * B[k][j];\n"
    "}\n";

bool criterion3(std::string &detail) {
  // Desk-scale matmul: full pragma chain, verified at M=7, N=5, K=6 and
  // over the whole parameter grid.
  Program p = parse_source(kDeskMatmul);
  PipelineResult r = run_pipeline(p);
  EquivResult desk = equivalent(p.functions[0], r.output.functions[0],
                                {{"M", 7}, {"N", 5}, {"K", 6}});
  if (!desk) {
    detail += "  desk matmul mismatch: " + desk.str() + "\n";
    return false;
  }
  std::vector<VerifyResult> bad = verify_equivalence(p, r.output);
  if (!bad.empty()) {
    detail += "  desk matmul grid mismatch: " + bad[0].equiv.str() + "\n";
    return false;
  }

  // Generator corpus: 20 cases per directive kind (200 total). Illegal
  // plans are skipped silently, so the emitted code must always match.
  PipelineOptions opts;
  opts.policy = PolicyMode::SilentSkip;
  size_t applied = 0;
  std::vector<gen::Case> corpus = gen::corpus(20, 20240817);
  for (size_t i = 0; i < corpus.size(); ++i) {
    Program cp = parse_source(corpus[i].source);
    opts.style =
        (i % 2) ? CodegenStyle::Normalized : CodegenStyle::Source;
    PipelineResult cr = run_pipeline(cp, opts);
    applied += cr.functions[0].applied;
    std::vector<VerifyResult> mismatch = verify_equivalence(cp, cr.output);
    if (!mismatch.empty()) {
      detail += "  corpus case " + std::to_string(i) + " (" +
                dirKindName(corpus[i].kind) +
                ") mismatch: " + mismatch[0].equiv.str() + "\n  source:\n" +
                corpus[i].source;
      return false;
    }
  }
  if (applied < corpus.size() / 2) {
    detail += "  generator produced too few applicable plans (" +
              std::to_string(applied) + ")\n";
    return false;
  }
  return true;
}

//===----------------------------------------------------------------------===//
// Criterion 4: legality oracle cross-check.
//===----------------------------------------------------------------------===//

bool checkWitness(const Function &f, const TreeRef &before,
                  const TreeRef &after, const Verdict &v,
                  std::string &detail) {
  if (v.legal || !v.witness) {
    detail += "  expected an illegal verdict with a witness\n";
    return false;
  }
  // The witness must be a real dependence of the original order...
  DependenceSet deps = compute_dependences(f, before, v.binding);
  bool found = false;
  for (const Dependence &d : deps)
    found |= d.str() == v.witness->str();
  if (!found) {
    detail += "  witness " + v.witness->str() + " is not a dependence\n";
    return false;
  }
  // ... and must indeed be misordered by the new schedule.
  auto order = enumerate_order(after, v.binding);
  std::optional<size_t> srcPos, dstPos;
  for (size_t i = 0; i < order.size(); ++i) {
    if (order[i].isCopy)
      continue;
    if (order[i] == v.witness->src)
      srcPos = i;
    if (order[i] == v.witness->dst)
      dstPos = i;
  }
  if (srcPos && dstPos && *srcPos < *dstPos) {
    detail += "  witness " + v.witness->str() + " is not misordered\n";
    return false;
  }
  return true;
}

bool criterion4(std::string &detail) {
  // Soundness over the generator corpus: every directive judged legal must
  // leave the program interpreter-equivalent. (Criterion 3 verified the
  // emitted code; here the verdicts are inspected case by case.)
  PipelineOptions opts;
  opts.policy = PolicyMode::SilentSkip;
  size_t legalCount = 0, illegalCount = 0;
  std::vector<gen::Case> corpus = gen::corpus(20, 429);
  for (size_t i = 0; i < corpus.size(); ++i) {
    Program cp = parse_source(corpus[i].source);
    PipelineResult cr = run_pipeline(cp, opts);
    for (const ReportEntry &e : cr.functions[0].report) {
      if (e.verdict == "legal")
        ++legalCount;
      else if (e.verdict == "skipped")
        ++illegalCount;
    }
    std::vector<VerifyResult> mismatch = verify_equivalence(cp, cr.output);
    if (!mismatch.empty()) {
      detail += "  unsound verdict in corpus case " + std::to_string(i) +
                " (" + dirKindName(corpus[i].kind) + "): " +
                mismatch[0].equiv.str() + "\n  source:\n" + corpus[i].source;
      return false;
    }
  }
  if (legalCount == 0 || illegalCount == 0) {
    detail += "  corpus lacks verdict diversity (legal=" +
              std::to_string(legalCount) +
              ", illegal=" + std::to_string(illegalCount) + ")\n";
    return false;
  }

  // Seeded illegal cases for every order-changing directive kind, each
  // rejected with a concrete misordered dependence pair.
  struct Seed {
    const char *label;
    const char *source;
    std::function<TreeRef(const TreeRef &)> apply;
  };
  std::vector<Seed> seeds = {
      {"reverse",
       "void f(int n, double A[n + 2]) {\n"
       "#pragma clang loop id(L)\n"
       "  for (int i = 1; i < n + 1; i += 1)\n"
       "    A[i] = A[i - 1] + 1;\n"
       "}\n",
       [](const TreeRef &t) { return reverse(t, "L").tree; }},
      {"interchange",
       "void f(int n, double C[n + 2][n + 2]) {\n"
       "#pragma clang loop id(Li)\n"
       "  for (int i = 1; i < n + 1; i += 1)\n"
       "#pragma clang loop id(Lj)\n"
       "    for (int j = 0; j < n; j += 1)\n"
       "      C[i][j] = C[i - 1][j + 1] + 1;\n"
       "}\n",
       [](const TreeRef &t) {
         return interchange(t, {"Li", "Lj"}, {"Lj", "Li"}).tree;
       }},
      {"tile",
       "void f(int n, double C[n + 2][n + 2]) {\n"
       "#pragma clang loop id(Li)\n"
       "  for (int i = 1; i < n + 1; i += 1)\n"
       "#pragma clang loop id(Lj)\n"
       "    for (int j = 0; j < n; j += 1)\n"
       "      C[i][j] = C[i - 1][j + 1] + 1;\n"
       "}\n",
       [](const TreeRef &t) { return tile(t, {"Li", "Lj"}, {2, 2}).tree; }},
      {"distribute",
       "void f(int n, double A[n + 2], double B[n + 2]) {\n"
       "#pragma clang loop id(L)\n"
       "  for (int i = 0; i < n; i += 1) {\n"
       "    A[i] = B[i];\n"
       "    B[i + 1] = A[i] + 1;\n"
       "  }\n"
       "}\n",
       [](const TreeRef &t) { return distribute(t, "L").tree; }},
      {"fuse",
       "void f(int n, double A[n + 2], double B[n + 2]) {\n"
       "#pragma clang loop id(La)\n"
       "  for (int i = 0; i < n; i += 1)\n"
       "    A[i] = B[i];\n"
       "#pragma clang loop id(Lb)\n"
       "  for (int i = 0; i < n; i += 1)\n"
       "    B[i] = A[i + 1];\n"
       "}\n",
       [](const TreeRef &t) { return fuse(t, {"La", "Lb"}).tree; }},
      {"unroll_and_jam",
       "void f(int n, double C[n + 2][n + 2]) {\n"
       "#pragma clang loop id(Li)\n"
       "  for (int i = 1; i < n + 1; i += 1)\n"
       "#pragma clang loop id(Lj)\n"
       "    for (int j = 0; j < n; j += 1)\n"
       "      C[i][j] = C[i - 1][j + 1] + 1;\n"
       "}\n",
       [](const TreeRef &t) {
         return unroll_and_jam(t, "Li", "Lj", 2).tree;
       }},
  };
  for (const Seed &s : seeds) {
    Program sp = parse_source(s.source);
    Function &f = sp.functions[0];
    FunctionPlan plan = resolve_plan(f);
    TreeRef before = lower_to_tree(f, &plan);
    TreeRef after = s.apply(before);
    Verdict v = check_legal(f, before, after, grid_bindings(f));
    std::string why;
    if (!checkWitness(f, before, after, v, why)) {
      detail += std::string("  seeded ") + s.label + ":\n" + why;
      return false;
    }
  }

  // Order-preserving kinds can never break a dependence; confirm they stay
  // legal even on a tight recurrence.
  {
    Program sp = parse_source("void f(int n, double A[n + 2]) {\n"
                              "#pragma clang loop id(L)\n"
                              "  for (int i = 1; i < n + 1; i += 1)\n"
                              "    A[i] = A[i - 1] + 1;\n"
                              "}\n");
    Function &f = sp.functions[0];
    FunctionPlan plan = resolve_plan(f);
    TreeRef before = lower_to_tree(f, &plan);
    auto grid = grid_bindings(f);
    for (auto &[label, after] :
         std::vector<std::pair<const char *, TreeRef>>{
             {"stripmine", stripmine(before, "L", 3).tree},
             {"unroll", unroll(before, "L", 2).tree}}) {
      Verdict v = check_legal(f, before, after, grid);
      if (!v) {
        detail += std::string("  order-preserving ") + label +
                  " wrongly rejected: " + v.str() + "\n";
        return false;
      }
    }
  }
  return true;
}

//===----------------------------------------------------------------------===//
// Criterion 5: sugar identities over a 10-case nest corpus.
//===----------------------------------------------------------------------===//

bool sameOrder(const TreeRef &a, const TreeRef &b,
               const std::map<std::string, int64_t> &params) {
  return enumerate_order(a, params) == enumerate_order(b, params);
}

bool criterion5(std::string &detail) {
  // Ten 2-deep nests with varying bounds and bodies; loop ids Li, Lj.
  std::vector<std::string> corpus;
  const char *uppers[5][2] = {
      {"n", "m"}, {"6", "7"}, {"n", "5"}, {"n + 1", "m"}, {"9", "m + 2"}};
  const char *lowers[2][2] = {{"0", "0"}, {"1", "2"}};
  for (int u = 0; u < 5; ++u)
    for (int l = 0; l < 2; ++l) {
      std::string body = (u + l) % 2 ? "Stmt(i, j);"
                                     : "A[i][j] = A[i][j] + i + j;";
      corpus.push_back(std::string("void f(int n, int m, "
                                   "double A[n + 12][m + 12]) {\n"
                                   "#pragma clang loop id(Li)\n"
                                   "  for (int i = ") +
                       lowers[l][0] + "; i < " + uppers[u][0] +
                       "; i += 1)\n"
                       "#pragma clang loop id(Lj)\n"
                       "    for (int j = " +
                       lowers[l][1] + "; j < " + uppers[u][1] +
                       "; j += 1)\n"
                       "      " + body + "\n}\n");
    }

  for (size_t c = 0; c < corpus.size(); ++c) {
    Program p = parse_source(corpus[c]);
    Function &f = p.functions[0];
    FunctionPlan plan = resolve_plan(f);
    TreeRef t = lower_to_tree(f, &plan);
    auto grid = grid_bindings(f, {0, 1, 2, 3, 5, 8});

    // tile = per-loop stripmine, then interchange pits outward.
    TreeRef sugar = tile(t, {"Li", "Lj"}, {3, 2}, {"p0", "p1"},
                         {"s0", "s1"})
                        .tree;
    TreeRef steps = stripmine(t, "Li", 3, "p0", "s0").tree;
    steps = stripmine(steps, "Lj", 2, "p1", "s1").tree;
    steps = interchange(steps, {"s0", "p1"}, {"p1", "s0"}).tree;
    for (const auto &binding : grid)
      if (!sameOrder(sugar, steps, binding)) {
        detail += "  tile identity broken on nest " + std::to_string(c) +
                  "\n";
        return false;
      }

    // unroll_and_jam = unroll, then fuse the replicated inner bands.
    TreeRef uaj = unroll_and_jam(t, "Li", "Lj", 2).tree;
    RewriteResult ur = unroll(t, "Li", 2);
    ScheduleNode *main = find_band(ur.tree, "Li");
    if (!main || main->children[0]->kind != ScheduleNode::Kind::Sequence) {
      detail += "  unexpected unroll shape on nest " + std::to_string(c) +
                "\n";
      return false;
    }
    int tag = 0;
    for (const TreeRef &child : main->children[0]->children)
      child->loopId = "F" + std::to_string(tag++);
    std::vector<std::string> fuseIds;
    for (int k = 0; k < tag; ++k)
      fuseIds.push_back("F" + std::to_string(k));
    TreeRef fused = fuse(ur.tree, fuseIds).tree;
    for (const auto &binding : grid)
      if (!sameOrder(uaj, fused, binding)) {
        detail += "  unroll_and_jam identity broken on nest " +
                  std::to_string(c) + "\n";
        return false;
      }
  }
  return true;
}

//===----------------------------------------------------------------------===//
// Criterion 6: policy behavior of the command-line tool.
//===----------------------------------------------------------------------===//

int runCli(const std::string &args, const std::string &outFile,
           const std::string &errFile) {
  std::string cmd =
      cliPath + " " + args + " > " + outFile + " 2> " + errFile;
  int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

bool criterion6(std::string &detail) {
  if (cliPath.empty()) {
    detail += "  no CLI path given\n";
    return false;
  }
  std::string dir = "acceptance_tmp";
  std::system(("mkdir -p " + dir).c_str());
  std::string src = dir + "/illegal.c";
  {
    std::ofstream out(src);
    out << "void f(int n, double A[n + 2]) {\n"
           "#pragma clang loop reverse\n"
           "  for (int i = 1; i < n + 1; i += 1)\n"
           "    A[i] = A[i - 1] + 1;\n"
           "}\n";
  }

  // --policy=error: abort, diagnostic names the directive and a witness.
  int rc = runCli(src + " --policy=error", dir + "/err_out.c",
                  dir + "/err_msg.txt");
  std::string msg = readFile(dir + "/err_msg.txt");
  if (rc != 1) {
    detail += "  --policy=error exited " + std::to_string(rc) +
              ", expected 1\n";
    return false;
  }
  if (msg.find("reverse") == std::string::npos ||
      msg.find("flow") == std::string::npos ||
      msg.find("->") == std::string::npos) {
    detail += "  --policy=error diagnostic lacks directive or witness:\n" +
              msg;
    return false;
  }

  // --policy=warn: exit 0, warn on stderr, emitted code equivalent.
  rc = runCli(src + " --policy=warn", dir + "/warn_out.c",
              dir + "/warn_msg.txt");
  std::string warn = readFile(dir + "/warn_msg.txt");
  if (rc != 0) {
    detail += "  --policy=warn exited " + std::to_string(rc) +
              ", expected 0\n";
    return false;
  }
  if (warn.find("reverse") == std::string::npos) {
    detail += "  --policy=warn produced no warning:\n" + warn;
    return false;
  }
  Program orig = parse_source(readFile(src));
  Program out = parse_source(readFile(dir + "/warn_out.c"));
  for (int64_t n : {0, 1, 2, 3, 5, 8}) {
    EquivResult e =
        equivalent(orig.functions[0], out.functions[0], {{"n", n}});
    if (!e) {
      detail += "  --policy=warn output not equivalent at n=" +
                std::to_string(n) + ": " + e.str() + "\n";
      return false;
    }
  }
  return true;
}

//===----------------------------------------------------------------------===//
// Criterion 7 (optional): external compile smoke test.
//===----------------------------------------------------------------------===//

bool haveCompiler(std::string &cc) {
  for (const char *candidate : {"cc", "gcc", "clang"})
    if (std::system((std::string("command -v ") + candidate +
                     " > /dev/null 2>&1")
                        .c_str()) == 0) {
      cc = candidate;
      return true;
    }
  return false;
}

// Desk-size self-initializing matmul: every array is filled from affine
// formulas, so the checksum is independent of the initial memory contents.
const char *kSmokeMatmul =
    "void matmul(double C[7][5], double A[7][6], double B[6][5]) {\n"
    "  for (int i0 = 0; i0 < 7; i0 += 1)\n"
    "    for (int j0 = 0; j0 < 6; j0 += 1)\n"
    "      A[i0][j0] = 1 + i0 + 2 * j0;\n"
    "  for (int i3 = 0; i3 < 6; i3 += 1)\n"
    "    for (int j3 = 0; j3 < 5; j3 += 1)\n"
    "      B[i3][j3] = 2 + 3 * i3 + j3;\n"
    "  for (int i4 = 0; i4 < 7; i4 += 1)\n"
    "    for (int j4 = 0; j4 < 5; j4 += 1)\n"
    "      C[i4][j4] = 0;\n"
    "#pragma clang loop(j2) pack array(A)\n"
    "#pragma clang loop(i1) pack array(B)\n"
    "#pragma clang loop(i1, j1, k1, i2, j2, k2) interchange "
    "permutation(j1, k1, i1, j2, i2, k2)\n"
    "#pragma clang loop(i, j, k) tile sizes(2, 3, 2) "
    "pit_ids(i1, j1, k1) tile_ids(i2, j2, k2)\n"
    "#pragma clang loop id(i)\n"
    "  for (int i = 0; i < 7; i += 1)\n"
    "#pragma clang loop id(j)\n"
    "    for (int j = 0; j < 5; j += 1)\n"
    "#pragma clang loop id(k)\n"
    "      for (int k = 0; k < 6; k += 1)\n"
    "        C[i][j] += A[i][k] * B[k][j];\n"
    "}\n";

bool criterion7(std::string &detail, bool &skipped) {
  std::string cc;
  if (!haveCompiler(cc)) {
    skipped = true;
    return true;
  }
  Program p = parse_source(kSmokeMatmul);
  PipelineOptions opts;
  opts.style = CodegenStyle::Normalized;
  PipelineResult r = run_pipeline(p, opts);

  // Interpreter checksum.
  RunResult run1 = run(r.output.functions[0], {});
  int64_t want = 0;
  for (const auto &[idx, v] : run1.stores.at("C"))
    want += v;

  std::string dir = "acceptance_tmp";
  std::system(("mkdir -p " + dir).c_str());
  {
    std::ofstream out(dir + "/smoke.c");
    out << emit_c(r.output);
    out << "#include <stdio.h>\n"
           "int main(void) {\n"
           "  static double C[7][5], A[7][6], B[6][5];\n"
           "  matmul(C, A, B);\n"
           "  long long sum = 0;\n"
           "  for (int i = 0; i < 7; ++i)\n"
           "    for (int j = 0; j < 5; ++j)\n"
           "      sum += (long long)C[i][j];\n"
           "  printf(\"%lld\\n\", sum);\n"
           "  return 0;\n"
           "}\n";
  }
  if (std::system((cc + " -std=c11 -O1 -o " + dir + "/smoke " + dir +
                   "/smoke.c 2> " + dir + "/smoke_cc.txt")
                      .c_str()) != 0) {
    detail += "  external compile failed:\n" + readFile(dir + "/smoke_cc.txt");
    return false;
  }
  if (std::system((dir + "/smoke > " + dir + "/smoke_out.txt").c_str()) !=
      0) {
    detail += "  compiled smoke binary failed to run\n";
    return false;
  }
  long long got = std::stoll(readFile(dir + "/smoke_out.txt"));
  if (got != want) {
    detail += "  checksum mismatch: compiled " + std::to_string(got) +
              " vs interpreter " + std::to_string(want) + "\n";
    return false;
  }
  return true;
}

} // namespace

int main(int argc, char **argv) {
  if (argc > 1)
    cliPath = argv[1];
  if (argc > 2)
    goldenDir = argv[2];
  else
    goldenDir = "golden";

  bool allOk = true;
  auto report = [&](int n, bool ok, const std::string &detail,
                    bool skipped = false) {
    if (skipped)
      std::cout << "criterion " << n << ": SKIP (no C compiler found)\n";
    else
      std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL")
                << "\n";
    if (!ok)
      std::cout << detail;
    allOk &= ok;
  };

  using Fn = bool (*)(std::string &);
  Fn criteria[6] = {criterion1, criterion2, criterion3,
                    criterion4, criterion5, criterion6};
  for (int i = 0; i < 6; ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i](detail);
    } catch (const std::exception &e) {
      detail += std::string("  exception: ") + e.what() + "\n";
    }
    report(i + 1, ok, detail);
  }
  {
    std::string detail;
    bool ok = false, skipped = false;
    try {
      ok = criterion7(detail, skipped);
    } catch (const std::exception &e) {
      detail += std::string("  exception: ") + e.what() + "\n";
    }
    report(7, ok, detail, skipped);
  }
  return allOk ? 0 : 1;
}
