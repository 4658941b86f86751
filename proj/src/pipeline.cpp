//===- pipeline.cpp - parse -> plan -> rewrite -> codegen ---------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/pipeline.hpp"

#include "loopforge/interp.hpp"
#include "loopforge/pack.hpp"
#include "loopforge/transform.hpp"

#include <functional>

namespace loopforge {

namespace {

/// Applies one directive to the tree; pack also yields a declaration.
TreeRef applyDirective(const TreeRef &tree, const Directive &d,
                       const Function &f,
                       std::vector<ArrayDecl> &packedDecls) {
  switch (d.kind) {
  case DirKind::Reverse:
    return reverse(tree, d.targets[0]).tree;
  case DirKind::Interchange:
    return interchange(tree, d.targets, d.permutation).tree;
  case DirKind::Tile:
    return tile(tree, d.targets, d.sizes, d.pitIds, d.tileIds).tree;
  case DirKind::StripMine:
    return stripmine(tree, d.targets[0], d.size, d.pitId, d.stripId).tree;
  case DirKind::Unroll:
    return unroll(tree, d.targets[0], d.factor, d.full).tree;
  case DirKind::UnrollAndJam:
    return unroll_and_jam(tree, d.targets[0],
                          d.targets.size() > 1 ? d.targets[1] : "", d.factor)
        .tree;
  case DirKind::Distribute:
    return distribute(tree, d.targets[0], d.distIds).tree;
  case DirKind::Fuse:
    return fuse(tree, d.targets).tree;
  case DirKind::Pack: {
    PackResult r = pack(tree, d.targets[0], d.array, f, d.heapAlloc, d.layout);
    packedDecls.push_back(r.decl.toDecl());
    return r.tree;
  }
  case DirKind::Id:
    return tree;
  }
  return tree;
}

Function passThrough(const Function &f) {
  Function out = f;
  out.body.clear();
  for (const StmtRef &s : f.body) {
    StmtRef c = s->clone();
    std::function<void(const StmtRef &)> strip = [&](const StmtRef &x) {
      x->pragmas.clear();
      for (const StmtRef &b : x->body)
        strip(b);
      for (const StmtRef &b : x->elseBody)
        strip(b);
    };
    strip(c);
    out.body.push_back(std::move(c));
  }
  return out;
}

} // namespace

PipelineResult run_pipeline(const Program &p, const PipelineOptions &opts) {
  PipelineResult result;
  for (const Function &f : p.functions) {
    FunctionResult fr;
    fr.name = f.name;
    fr.plan = resolve_plan(f);

    if (fr.plan.order.empty()) {
      result.output.functions.push_back(passThrough(f));
      fr.tree = lower_to_tree(f, &fr.plan);
      result.functions.push_back(std::move(fr));
      continue;
    }

    std::vector<std::map<std::string, int64_t>> grid =
        grid_bindings(f, opts.gridValues);
    TreeRef tree = lower_to_tree(f, &fr.plan);
    std::vector<ArrayDecl> packedDecls;
    std::vector<Directive> appliedDirectives;

    for (const Directive &d : fr.plan.order) {
      std::vector<ArrayDecl> newDecls;
      TreeRef candidate = applyDirective(tree, d, f, newDecls);
      if (d.unsafe) {
        ReportEntry e;
        e.loc = d.loc;
        e.kind = dirKindName(d.kind);
        e.verdict = "unsafe-assumed";
        fr.report.push_back(e);
      } else {
        std::optional<Verdict> v;
        try {
          v = check_legal(f, tree, candidate, grid, opts.maxInstances);
        } catch (const Diag &diag) {
          if (diag.code() != ErrCode::InstanceCapExceeded)
            throw;
          // Too many instances to decide at these parameters; proceed, but
          // record that the oracle could not confirm this directive.
          ReportEntry e;
          e.loc = d.loc;
          e.kind = dirKindName(d.kind);
          e.verdict = "unverified-cap-exceeded";
          fr.report.push_back(e);
        }
        if (v && apply_policy(*v, d, opts.policy, fr.report) ==
                     PolicyAction::Skip)
          continue;
      }
      tree = candidate;
      for (ArrayDecl &ad : newDecls)
        packedDecls.push_back(std::move(ad));
      appliedDirectives.push_back(d);
      ++fr.applied;
    }

    if (fr.applied == 0) {
      result.output.functions.push_back(passThrough(f));
      fr.tree = tree;
      result.functions.push_back(std::move(fr));
      continue;
    }

    RuntimeCheck check = build_runtime_check(f, appliedDirectives);
    result.output.functions.push_back(
        generate(tree, f, check, packedDecls, opts.style));
    fr.tree = tree;
    result.functions.push_back(std::move(fr));
  }
  return result;
}

std::vector<VerifyResult> verify_equivalence(const Program &original,
                                             const Program &transformed,
                                             const PipelineOptions &opts) {
  std::vector<VerifyResult> failures;
  for (const Function &f : original.functions) {
    const Function *out = transformed.findFunction(f.name);
    if (!out)
      continue;
    for (const auto &binding : grid_bindings(f, opts.gridValues)) {
      EquivResult r = equivalent(f, *out, binding, opts.seed);
      if (!r.equal)
        failures.push_back({f.name, binding, r});
    }
  }
  return failures;
}

} // namespace loopforge
