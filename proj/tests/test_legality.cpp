// SPDX-License-Identifier: Apache-2.0
#include "loopforge/legality.hpp"

#include "loopforge/transform.hpp"

#include <doctest.h>

#include <algorithm>

using namespace loopforge;

namespace {

Function &parseInto(Program &store, const std::string &src) {
  store = parse_source(src);
  return store.functions[0];
}

std::vector<std::string> render(const DependenceSet &deps) {
  std::vector<std::string> out;
  for (const Dependence &d : deps)
    out.push_back(d.str());
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

TEST_CASE("recurrence A[i] = A[i-1] + 1 has chained flow dependences") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n + 1]) {\n"
                                 "  for (int i = 1; i < n + 1; i += 1)\n"
                                 "    A[i] = A[i - 1] + 1;\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  DependenceSet deps = compute_dependences(f, t, {{"n", 4}});
  // i writes A[i], i+1 reads it: flow Stmt0[i] -> Stmt0[i+1] for i in 1..3.
  std::vector<std::string> flows;
  for (const Dependence &d : deps)
    if (d.kind == DepKind::Flow)
      flows.push_back(d.src.str() + "->" + d.dst.str());
  std::sort(flows.begin(), flows.end());
  CHECK(flows == std::vector<std::string>{"Stmt0[1]->Stmt0[2]",
                                          "Stmt0[2]->Stmt0[3]",
                                          "Stmt0[3]->Stmt0[4]"});
}

TEST_CASE("independent writes produce no dependences") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n], double B[n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    A[i] = B[i];\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  CHECK(compute_dependences(f, t, {{"n", 4}}).empty());
}

TEST_CASE("matmul reduction carries only self dependences on C") {
  Program store;
  Function &f = parseInto(store,
                          "void f(int M, double C[M][M], double A[M][M], "
                          "double B[M][M]) {\n"
                          "  for (int i = 0; i < M; i += 1)\n"
                          "    for (int j = 0; j < M; j += 1)\n"
                          "      for (int k = 0; k < M; k += 1)\n"
                          "        C[i][j] += A[i][k] * B[k][j];\n"
                          "}\n");
  TreeRef t = lower_to_tree(f);
  DependenceSet deps = compute_dependences(f, t, {{"M", 2}});
  CHECK(!deps.empty());
  for (const Dependence &d : deps) {
    CHECK(d.array == "C");
    // Source and sink differ only in k.
    CHECK(d.src.coords[0] == d.dst.coords[0]);
    CHECK(d.src.coords[1] == d.dst.coords[1]);
    CHECK(d.src.coords[2] < d.dst.coords[2]);
  }
}

TEST_CASE("reversal of a recurrence is illegal with a concrete witness") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n + 1]) {\n"
                                 "  for (int i = 1; i < n + 1; i += 1)\n"
                                 "    A[i] = A[i - 1] + 1;\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef before = lower_to_tree(f, &plan);
  TreeRef after = reverse(before, "@L0").tree;
  Verdict v = check_legal(f, before, after, grid_bindings(f));
  CHECK(!v);
  REQUIRE(v.witness.has_value());
  CHECK(v.witness->array == "A");
  CHECK(!v.str().empty());
}

TEST_CASE("reversal of an independent loop is legal") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n], double B[n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    A[i] = B[i];\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef before = lower_to_tree(f, &plan);
  TreeRef after = reverse(before, "@L0").tree;
  CHECK(check_legal(f, before, after, grid_bindings(f)));
}

TEST_CASE("identity schedules are always legal") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n + 1]) {\n"
                                 "  for (int i = 1; i < n + 1; i += 1)\n"
                                 "    A[i] = A[i - 1] + 1;\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  CHECK(check_legal(f, t, t, grid_bindings(f)));
}

TEST_CASE("scalar locals act as zero-dimensional memory") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n]) {\n"
                                 "  double acc;\n"
                                 "  for (int i = 0; i < n; i += 1) {\n"
                                 "    acc = i;\n"
                                 "    A[i] = acc;\n"
                                 "  }\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  DependenceSet deps = compute_dependences(f, t, {{"n", 2}});
  bool sawAcc = false;
  for (const Dependence &d : deps)
    sawAcc |= d.array == "acc";
  CHECK(sawAcc);
  // Reversing the loop reorders the acc chain: illegal.
  FunctionPlan plan = resolve_plan(f);
  TreeRef before = lower_to_tree(f, &plan);
  TreeRef after = reverse(before, "@L0").tree;
  CHECK(!check_legal(f, before, after, grid_bindings(f)));
}

TEST_CASE("grid bindings cover the cartesian product of parameters") {
  Program store;
  Function &f = parseInto(store, "void f(int n, int m, double A[n][m]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    for (int j = 0; j < m; j += 1)\n"
                                 "      A[i][j] = 0;\n"
                                 "}\n");
  auto grid = grid_bindings(f, {0, 1, 2});
  CHECK(grid.size() == 9);
  auto noParams = grid_bindings(parseInto(store, "void g() {\n}\n"));
  REQUIRE(noParams.size() == 1);
  CHECK(noParams[0].empty());
}

TEST_CASE("policy table: legal applies, illegal hint skips silently") {
  Directive hint;
  hint.forced = false;
  hint.loc = {3, 1};
  Verdict legal;
  Verdict illegal;
  illegal.legal = false;
  illegal.witness = Dependence{};

  std::vector<ReportEntry> report;
  CHECK(apply_policy(legal, hint, PolicyMode::ForcedError, report) ==
        PolicyAction::Apply);
  CHECK(apply_policy(illegal, hint, PolicyMode::ForcedError, report) ==
        PolicyAction::Skip);
  CHECK(report.size() == 2);
  CHECK(report[0].verdict == "legal");
  CHECK(report[1].verdict == "skipped-hint");
}

TEST_CASE("policy table: illegal forced directive honours the mode") {
  Directive forced;
  forced.forced = true;
  forced.loc = {4, 1};
  Verdict illegal;
  illegal.legal = false;
  illegal.witness = Dependence{};

  std::vector<ReportEntry> report;
  try {
    apply_policy(illegal, forced, PolicyMode::ForcedError, report);
    FAIL("expected IllegalTransformation");
  } catch (const Diag &d) {
    CHECK(d.code() == ErrCode::IllegalTransformation);
  }
  CHECK(apply_policy(illegal, forced, PolicyMode::ForcedWarnSkip, report) ==
        PolicyAction::Skip);
  CHECK(apply_policy(illegal, forced, PolicyMode::SilentSkip, report) ==
        PolicyAction::Skip);
  // Report lines are tab-separated: loc, kind, verdict, witness.
  for (const ReportEntry &e : report) {
    std::string line = e.line();
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);
  }
}
