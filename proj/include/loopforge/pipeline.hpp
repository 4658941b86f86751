//===- pipeline.hpp - parse -> plan -> rewrite -> codegen ---------*- C++ -*-===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#ifndef LOOPFORGE_PIPELINE_HPP
#define LOOPFORGE_PIPELINE_HPP

#include "loopforge/codegen.hpp"
#include "loopforge/interp.hpp"
#include "loopforge/legality.hpp"

namespace loopforge {

struct PipelineOptions {
  PolicyMode policy = PolicyMode::ForcedError;
  std::vector<int64_t> gridValues = {0, 1, 2, 3, 5, 8};
  uint64_t seed = 0;
  size_t maxInstances = 1000000;
  CodegenStyle style = CodegenStyle::Source;
};

struct FunctionResult {
  std::string name;
  FunctionPlan plan;
  TreeRef tree; // final transformed schedule tree
  std::vector<ReportEntry> report;
  size_t applied = 0; // directives actually applied
};

struct PipelineResult {
  Program output;
  std::vector<FunctionResult> functions;
};

/// Transforms every function of `p`: resolve the pragma plan, apply each
/// directive with a legality check under the policy, then generate output
/// code (versioned with a runtime overlap check when array parameters could
/// alias). Functions without directives pass through unchanged.
PipelineResult run_pipeline(const Program &p, const PipelineOptions &opts = {});

struct VerifyResult {
  std::string function;
  std::map<std::string, int64_t> binding;
  EquivResult equiv;
};

/// Interpreter equivalence of every function pair over the full parameter
/// grid. Returns the failures; empty means verified.
std::vector<VerifyResult> verify_equivalence(const Program &original,
                                             const Program &transformed,
                                             const PipelineOptions &opts = {});

} // namespace loopforge

#endif // LOOPFORGE_PIPELINE_HPP
