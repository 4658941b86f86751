//===- loopforge.cpp - command-line driver ------------------------------------===//
//
// Part of the loopforge project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "loopforge/parse.hpp"
#include "loopforge/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace loopforge;

namespace {

int writeOutput(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream os(path);
  if (!os) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return 2;
  }
  os << text;
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"loopforge - source-to-source loop transformation"};
  app.get_formatter()->column_width(34);

  std::string inputPath;
  std::string outputPath;
  std::string emitMode = "c";
  std::string policyName = "error";
  std::string gridCsv;
  std::string reportPath;
  std::string styleName = "source";
  uint64_t seed = 0;
  size_t maxInstances = 1000000;
  bool verify = false;

  app.add_option("input", inputPath, "input source file")->required();
  app.add_option("--emit", emitMode, "output kind: c, tree, plan or report")
      ->check(CLI::IsMember({"c", "tree", "plan", "report"}));
  app.add_option("-o,--output", outputPath, "output path (default stdout)");
  app.add_option("--policy", policyName,
                 "forced-directive policy: error, warn or silent")
      ->check(CLI::IsMember({"error", "warn", "silent"}));
  app.add_option("--legality-grid", gridCsv,
                 "comma-separated parameter values for the legality grid");
  app.add_option("--seed", seed, "seed for interpreter array initialization");
  app.add_option("--report", reportPath, "write the legality report here");
  app.add_option("--max-instances", maxInstances,
                 "statement-instance cap per enumeration");
  app.add_option("--style", styleName,
                 "loop emission style: source or normalized")
      ->check(CLI::IsMember({"source", "normalized"}));
  app.add_flag("--verify", verify,
               "interpret input and output over the grid and compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::ifstream is(inputPath);
  if (!is) {
    std::cerr << "error: cannot read '" << inputPath << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << is.rdbuf();

  PipelineOptions opts;
  opts.seed = seed;
  opts.maxInstances = maxInstances;
  opts.style = styleName == "normalized" ? CodegenStyle::Normalized
                                         : CodegenStyle::Source;
  opts.policy = policyName == "error"  ? PolicyMode::ForcedError
                : policyName == "warn" ? PolicyMode::ForcedWarnSkip
                                       : PolicyMode::SilentSkip;
  if (!gridCsv.empty()) {
    opts.gridValues.clear();
    std::stringstream gs(gridCsv);
    std::string item;
    while (std::getline(gs, item, ',')) {
      try {
        opts.gridValues.push_back(std::stoll(item));
      } catch (...) {
        std::cerr << "error: bad --legality-grid value '" << item << "'\n";
        return 2;
      }
    }
  }

  Program program;
  try {
    program = parse_source(buf.str());
  } catch (const Diag &d) {
    std::cerr << inputPath << ":" << d.what() << "\n";
    return 2;
  }

  try {
    if (emitMode == "plan")
      return writeOutput(outputPath, dump_plan(program));

    PipelineResult result = run_pipeline(program, opts);

    for (const FunctionResult &fr : result.functions)
      for (const ReportEntry &e : fr.report)
        if (e.verdict == "skipped-warning")
          std::cerr << "warning: " << fr.name << ": " << e.line() << "\n";

    if (!reportPath.empty() || emitMode == "report") {
      std::string report;
      for (const FunctionResult &fr : result.functions)
        for (const ReportEntry &e : fr.report)
          report += e.line() + "\n";
      if (emitMode == "report")
        return writeOutput(outputPath, report);
      if (int rc = writeOutput(reportPath, report))
        return rc;
    }

    if (emitMode == "tree") {
      std::string text;
      for (const FunctionResult &fr : result.functions)
        text += fr.name + ":\n" + print_tree(fr.tree);
      return writeOutput(outputPath, text);
    }

    std::string code = emit_c(result.output);

    if (verify) {
      std::vector<VerifyResult> failures =
          verify_equivalence(program, result.output, opts);
      for (const Function &f : program.functions) {
        bool failed = false;
        for (const VerifyResult &v : failures)
          if (v.function == f.name) {
            failed = true;
            std::string b;
            for (const auto &[k, val] : v.binding)
              b += " " + k + "=" + std::to_string(val);
            std::cerr << "FAIL " << f.name << ":" << b << " "
                      << v.equiv.str() << "\n";
          }
        if (!failed)
          std::cerr << "PASS " << f.name << "\n";
      }
      if (!failures.empty())
        return 1;
    }

    return writeOutput(outputPath, code);
  } catch (const Diag &d) {
    std::cerr << inputPath << ":" << d.what() << "\n";
    return 1;
  }
}
