// Reference external solver for the file transport: reads LP text, solves it
// with HiGHS and writes the plain solution text.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "Highs.h"

int main(int argc, char** argv) {
  CLI::App app{"Solve an LP file and write name/value pairs"};
  double relGap = 1e-4;
  double absGap = 1e-2;
  double timeLimit = 36000.0;
  int threads = 1;
  unsigned long long seed = 0;
  bool numericFocus = false;
  std::string lpPath;
  std::string solutionPath;
  app.add_option("--rel-gap", relGap);
  app.add_option("--abs-gap", absGap);
  app.add_option("--time-limit", timeLimit);
  app.add_option("--threads", threads);
  app.add_option("--seed", seed);
  app.add_flag("--numeric-focus", numericFocus);
  app.add_option("lp", lpPath)->required()->check(CLI::ExistingFile);
  app.add_option("solution", solutionPath)->required();
  CLI11_PARSE(app, argc, argv);

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", threads);
  highs.setOptionValue("random_seed", static_cast<HighsInt>(seed % 2147483647ULL));
  highs.setOptionValue("mip_rel_gap", relGap);
  highs.setOptionValue("mip_abs_gap", absGap);
  highs.setOptionValue("time_limit", timeLimit);
  if (numericFocus) {
    highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
    highs.setOptionValue("dual_feasibility_tolerance", 1e-9);
    highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
  }
  if (highs.readModel(lpPath) == HighsStatus::kError) {
    std::cerr << "cannot read " << lpPath << '\n';
    return 1;
  }
  std::ofstream out(solutionPath);
  if (!out) {
    std::cerr << "cannot write " << solutionPath << '\n';
    return 1;
  }
  out.precision(17);
  if (highs.run() == HighsStatus::kError) {
    out << "#status: error\n";
    return 0;
  }
  const HighsModelStatus status = highs.getModelStatus();
  const HighsInfo& info = highs.getInfo();
  const bool hasSolution = info.primal_solution_status == kSolutionStatusFeasible;
  const bool isMip = highs.getLp().isMip();
  std::string name = "error";
  switch (status) {
    case HighsModelStatus::kOptimal: name = "optimal"; break;
    case HighsModelStatus::kInfeasible: name = "infeasible"; break;
    case HighsModelStatus::kTimeLimit: name = hasSolution ? "feasible" : "timeLimit"; break;
    default: name = hasSolution ? "feasible" : "error"; break;
  }
  out << "#status: " << name << '\n';
  if (hasSolution) {
    out << "#objective: " << info.objective_function_value << '\n';
    out << "#bound: " << (isMip ? info.mip_dual_bound : info.objective_function_value) << '\n';
    const HighsLp& lp = highs.getLp();
    const auto& values = highs.getSolution().col_value;
    for (HighsInt j = 0; j < lp.num_col_; ++j) out << lp.col_names_[j] << ' ' << values[j] << '\n';
  }
  return 0;
}
