// SPDX-License-Identifier: Apache-2.0
#include "loopforge/codegen.hpp"

#include "loopforge/interp.hpp"
#include "loopforge/transform.hpp"

#include <doctest.h>

using namespace loopforge;

namespace {

Function &parseInto(Program &store, const std::string &src) {
  store = parse_source(src);
  return store.functions[0];
}

std::string bodyOf(const Function &f) {
  PrintOptions opts;
  opts.includePragmas = false;
  std::string all = printFunction(f, opts);
  // Strip the signature line and the closing brace.
  size_t open = all.find("{\n");
  size_t close = all.rfind("}");
  return all.substr(open + 2, close - open - 2);
}

} // namespace

TEST_CASE("source-style stripmine emits pit and strip loops") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    A[i] = i;\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef t = lower_to_tree(f, &plan);
  TreeRef sm = stripmine(t, "@L0", 4, "i1", "i2").tree;
  Function out = generate(sm, f, {});
  CHECK(bodyOf(out) == "  for (int i1 = 0; i1 < n; i1 += 4)\n"
                       "    for (int i2 = i1; i2 < min(n, i1 + 4); i2 += 1)\n"
                       "      A[i2] = i2;\n");
}

TEST_CASE("normalized style counts from zero with floord bounds") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    A[i] = i;\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef t = lower_to_tree(f, &plan);
  TreeRef sm = stripmine(t, "@L0", 4).tree;
  Function out = generate(sm, f, {}, {}, CodegenStyle::Normalized);
  CHECK(bodyOf(out) ==
        "  for (int c0 = 0; c0 <= floord(n - 1, 4); c0 += 1)\n"
        "    for (int c1 = 0; c1 <= min(n - 4 * c0 - 1, 3); c1 += 1)\n"
        "      A[4 * c0 + c1] = 4 * c0 + c1;\n");
}

TEST_CASE("identity generation round-trips through the parser") {
  Program store;
  std::string src = "void f(int n, double A[n], double B[n]) {\n"
                    "  for (int i = 0; i < n; i += 1)\n"
                    "    A[i] = B[i] + 1;\n"
                    "}\n";
  Function &f = parseInto(store, src);
  Function out = generate(lower_to_tree(f), f, {});
  Program reparsed = parse_source(printFunction(out, {}));
  REQUIRE(reparsed.functions.size() == 1);
  CHECK(equivalent(f, reparsed.functions[0], {{"n", 5}}));
}

TEST_CASE("generated code stays equivalent after a legal transformation") {
  Program store;
  Function &f = parseInto(store,
                          "void f(int n, int m, double A[n][m], "
                          "double B[n][m]) {\n"
                          "  for (int i = 0; i < n; i += 1)\n"
                          "    for (int j = 0; j < m; j += 1)\n"
                          "      A[i][j] = B[i][j] * 2;\n"
                          "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef t = lower_to_tree(f, &plan);
  TreeRef ic = interchange(t, {"@L0", "@L1"}, {"@L1", "@L0"}).tree;
  for (CodegenStyle style : {CodegenStyle::Source, CodegenStyle::Normalized}) {
    Function out = generate(ic, f, {}, {}, style);
    Program reparsed = parse_source(printFunction(out, {}));
    CHECK(equivalent(f, reparsed.functions[0], {{"n", 3}, {"m", 4}}));
  }
}

TEST_CASE("runtime check pairs written parameters against accessed ones") {
  Program store;
  Function &f = parseInto(store,
                          "void f(int n, double A[n], double B[n], "
                          "double C[n]) {\n"
                          "  for (int i = 0; i < n; i += 1)\n"
                          "    A[i] = B[i] + C[i];\n"
                          "}\n");
  Directive d;
  RuntimeCheck check = build_runtime_check(f, {d});
  REQUIRE(check.pairs.size() == 2);
  CHECK(check.pairs[0] == std::pair<std::string, std::string>{"A", "B"});
  CHECK(check.pairs[1] == std::pair<std::string, std::string>{"A", "C"});
  // Read-only pairs (B, C) are not checked; empty plans need no check.
  CHECK(build_runtime_check(f, {}).trivial());
}

TEST_CASE("a nontrivial check versions the function") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n], double B[n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    A[i] = B[i];\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef t = lower_to_tree(f, &plan);
  TreeRef rev = reverse(t, "@L0").tree;
  Directive d;
  Function out = generate(rev, f, build_runtime_check(f, {d}));
  std::string text = printFunction(out, {});
  CHECK(text.find("if (no_overlap(&A[0], n, &B[0], n))") != std::string::npos);
  CHECK(text.find("else") != std::string::npos);
  // The versioned form still re-parses and matches the original.
  Program reparsed = parse_source(text);
  CHECK(equivalent(f, reparsed.functions[0], {{"n", 6}}));
}

TEST_CASE("emit_c produces a self-contained translation unit") {
  Program store;
  parseInto(store, "void f(int n, double A[n]) {\n"
                   "  for (int i = 0; i < n; i += 1)\n"
                   "    A[i] = min(i, 3);\n"
                   "}\n");
  std::string unit = emit_c(store);
  CHECK(unit.find("#define min(") != std::string::npos);
  CHECK(unit.find("#define max(") != std::string::npos);
  CHECK(unit.find("#define floord(") != std::string::npos);
  CHECK(unit.find("#define no_overlap(") != std::string::npos);
  CHECK(unit.find("void f(") != std::string::npos);
}
