// SPDX-License-Identifier: Apache-2.0
#include "loopforge/tree.hpp"

#include <doctest.h>

using namespace loopforge;

namespace {

Function &parseInto(Program &store, const std::string &src) {
  store = parse_source(src);
  return store.functions[0];
}

std::vector<std::string> names(const std::vector<Instance> &v) {
  std::vector<std::string> out;
  for (const auto &i : v)
    out.push_back(i.str());
  return out;
}

} // namespace

TEST_CASE("lowering: two statements under one loop share a band") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 0; i < n; i += 1) {\n"
                                 "    StmtA(i);\n"
                                 "    StmtB(i);\n"
                                 "  }\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  CHECK(validate_tree(t).empty());
  REQUIRE(t->kind == ScheduleNode::Kind::Domain);
  const auto &band = t->children[0];
  REQUIRE(band->kind == ScheduleNode::Kind::Band);
  const auto &seq = band->children[0];
  REQUIRE(seq->kind == ScheduleNode::Kind::Sequence);
  CHECK(seq->children.size() == 2);

  // Interleaved order: StmtA[0], StmtB[0], StmtA[1], StmtB[1].
  auto order = enumerate_order(t, {{"n", 2}});
  CHECK(names(order) == std::vector<std::string>{"StmtA[0]", "StmtB[0]",
                                                 "StmtA[1]", "StmtB[1]"});
  CHECK(enumerate_order(t, {{"n", 0}}).empty());
}

TEST_CASE("lowering: triple nest is a band chain") {
  Program store;
  Function &f = parseInto(store,
                          "void f(int M, int N, int K, double C[M][N], "
                          "double A[M][K], double B[K][N]) {\n"
                          "  for (int i = 0; i < M; i += 1)\n"
                          "    for (int j = 0; j < N; j += 1)\n"
                          "      for (int k = 0; k < K; k += 1)\n"
                          "        C[i][j] += A[i][k] * B[k][j];\n"
                          "}\n");
  TreeRef t = lower_to_tree(f);
  CHECK(validate_tree(t).empty());
  const ScheduleNode *n = t->children[0].get();
  for (const char *c : {"i", "j", "k"}) {
    REQUIRE(n->kind == ScheduleNode::Kind::Band);
    CHECK(n->counter == c);
    n = n->children[0].get();
  }
  CHECK(n->kind == ScheduleNode::Kind::Leaf);
  CHECK(n->coords.size() == 3);
}

TEST_CASE("empty function lowers to a bare domain") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n}\n");
  TreeRef t = lower_to_tree(f);
  CHECK(t->kind == ScheduleNode::Kind::Domain);
  CHECK(t->children.empty());
  CHECK(validate_tree(t).empty());
  CHECK(enumerate_order(t, {}).empty());
}

TEST_CASE("reversed source loop enumerates downward") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 3; i >= 0; i -= 1)\n"
                                 "    Stmt(i);\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  auto order = enumerate_order(t, {});
  CHECK(names(order) ==
        std::vector<std::string>{"Stmt[3]", "Stmt[2]", "Stmt[1]", "Stmt[0]"});
}

TEST_CASE("strided loop enumeration") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 0; i < 10; i += 4)\n"
                                 "    Stmt(i);\n"
                                 "}\n");
  auto order = enumerate_order(lower_to_tree(f), {});
  CHECK(names(order) ==
        std::vector<std::string>{"Stmt[0]", "Stmt[4]", "Stmt[8]"});
}

TEST_CASE("instance cap") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    Stmt(i);\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  CHECK_THROWS_AS(enumerate_order(t, {{"n", 100}}, 10), Diag);
  CHECK(enumerate_order(t, {{"n", 10}}, 10).size() == 10);
}

TEST_CASE("validate_tree flags duplicated statements") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    Stmt(i);\n"
                                 "}\n");
  TreeRef t = lower_to_tree(f);
  // Duplicate the leaf under a sequence.
  TreeRef band = t->children[0];
  TreeRef leafNode = band->children[0];
  band->children = {ScheduleNode::sequence({leafNode, leafNode})};
  auto violations = validate_tree(t);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("more than one leaf") != std::string::npos);
}

TEST_CASE("tree printing uses the band-schedule notation") {
  Program store;
  Function &f = parseInto(store, "void f(int n) {\n"
                                 "  for (int i = 0; i < n; i += 1) {\n"
                                 "    StmtA(i);\n"
                                 "    StmtB(i);\n"
                                 "  }\n"
                                 "}\n");
  std::string txt = print_tree(lower_to_tree(f));
  CHECK(txt == "Domain: { StmtA[i]; StmtB[i] }\n"
               "  Band: { StmtA[i] -> [i]; StmtB[i] -> [i] | 0 <= i < n }\n"
               "    Sequence:\n"
               "      Leaf: StmtA[i]\n"
               "      Leaf: StmtB[i]\n");
}

TEST_CASE("find_band and find_parent navigate by loop id") {
  Program store;
  Function &f = parseInto(store, "void f(int n, double A[n][n]) {\n"
                                 "  for (int i = 0; i < n; i += 1)\n"
                                 "    for (int j = 0; j < n; j += 1)\n"
                                 "      A[i][j] = 0;\n"
                                 "}\n");
  FunctionPlan plan = resolve_plan(f);
  TreeRef t = lower_to_tree(f, &plan);
  ScheduleNode *outer = find_band(t, "@L0");
  ScheduleNode *inner = find_band(t, "@L1");
  REQUIRE(outer);
  REQUIRE(inner);
  CHECK(outer->counter == "i");
  CHECK(inner->counter == "j");
  CHECK(find_parent(t, inner) == outer);
  CHECK(find_parent(t, outer) == t.get());
  CHECK(find_band(t, "nope") == nullptr);
}
