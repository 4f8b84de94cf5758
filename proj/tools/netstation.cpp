// Command-line front end: validate, build-ranges, solve, report.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netstation/algorithm.hpp"
#include "netstation/compressor_ranges.hpp"
#include "netstation/errors.hpp"
#include "netstation/io.hpp"
#include "netstation/report.hpp"

namespace fs = std::filesystem;
using namespace netstation;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInvalid = 2, kAborted = 3, kBackend = 4 };

bool needsRanges(const StationSpec& spec) {
  for (int a : spec.arcsOfKind(ArcKind::CompressorStation)) {
    for (const auto& config : spec.arcs[a].station().configurations) {
      if (config.facets.empty()) return true;
    }
  }
  return false;
}

/// Facets given in the document win; otherwise the cache next to the
/// instance, otherwise a fresh build.
void prepareRanges(Instance& instance, const fs::path& path, std::size_t samples) {
  if (!needsRanges(instance.spec)) return;
  const fs::path cache = rangeCachePath(path);
  if (fs::exists(cache) && applyRanges(instance.spec, readJson(cache), samples).empty()) return;
  const auto problems = buildConfigurationRanges(instance.spec, {samples, std::nullopt});
  if (!problems.empty()) {
    std::string what;
    for (const auto& v : problems) what += "\n  " + v.entity + ": " + v.rule;
    throw SchemaError("configurations", "operating ranges could not be built:" + what);
  }
}

int runValidate(const fs::path& path) {
  const Instance instance = loadInstance(path);
  std::cout << "ok: " << instance.spec.name << ", " << instance.spec.nodes.size() << " nodes, "
            << instance.spec.arcs.size() << " arcs, " << instance.spec.modes.size()
            << " operation modes, " << instance.scenario.steps() << " steps\n";
  return kOk;
}

int runBuildRanges(const fs::path& path, std::size_t samples, const fs::path& output) {
  Instance instance = loadInstance(path);
  const auto problems = buildConfigurationRanges(instance.spec, {samples, std::nullopt});
  for (const auto& v : problems) std::cerr << v.entity << ": " << v.rule << '\n';
  const fs::path target = output.empty() ? rangeCachePath(path) : output;
  writeJson(rangesToJson(instance.spec, samples), target);
  std::cout << "wrote " << target.string() << '\n';
  return problems.empty() ? kOk : kInvalid;
}

struct SolveArgs {
  fs::path instance;
  int steps = 0;
  std::size_t horizon = 4;
  bool lowerBound = false;
  double lowerBoundTimeLimit = 36000.0;
  std::string exportLp;
  std::uint64_t seed = 0;
  std::string outputDir;
  std::string backend;
  std::size_t samples = kDefaultPowerSamples;
};

int runSolve(const SolveArgs& args) {
  Instance instance = loadInstance(args.instance);
  if (args.steps > 0) instance = retime(instance, timeGridTemplate(args.steps).grid());
  prepareRanges(instance, args.instance, args.samples);
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);

  std::unique_ptr<SolverBackend> backend;
  const fs::path out = args.outputDir.empty() ? fs::path(".") : fs::path(args.outputDir);
  fs::create_directories(out);
  if (args.backend.empty()) backend = makeDefaultBackend();
  else backend = std::make_unique<FileBackend>(args.backend, out / "solver-work");

  AlgorithmOptions options;
  options.horizon = args.horizon;
  options.seed = args.seed;
  if (!args.exportLp.empty()) options.exportDirectory = fs::path(args.exportLp);

  const std::string stem = instance.spec.name + "_" + std::to_string(problem.scenario().steps());
  RunReport report;
  report.instance = instance.spec.name;
  report.steps = problem.scenario().steps();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    StationSolver solver(problem, *backend, options);
    const ControlPlan plan = solver.solve();
    report = makeRunReport(instance.spec.name, problem, plan, elapsed());
    nlohmann::json planDoc = planToJson(problem, plan);
    if (args.lowerBound) {
      SolveSettings settings = defaultSettingsFor(Variant::Full);
      settings.timeLimit = args.lowerBoundTimeLimit;
      settings.seed = args.seed;
      const LowerBoundResult bound = netstation::lowerBound(problem, plan, *backend, settings);
      report.lowerBound = bound.result.bound;
      report.gap = bound.gap;
      planDoc["lowerBound"] = {{"status", statusName(bound.result.status)},
                               {"bound", bound.result.bound},
                               {"incumbent", bound.result.objective},
                               {"gap", bound.gap},
                               {"wallTime", bound.result.wallTime}};
    }
    writeJson(planDoc, out / (stem + ".plan.json"));
    std::ofstream csv(out / (stem + ".states.csv"));
    writeStatesCsv(csv, problem, plan.states);
    writeJson(toJson(report), out / (stem + ".run.json"));
    std::cout << "objective " << plan.objective << ", " << report.modeChanges
              << " mode changes, feasible " << (plan.check.ok() ? "yes" : "no");
    if (report.gap) std::cout << ", gap " << *report.gap;
    std::cout << "\nwrote " << (out / (stem + ".plan.json")).string() << '\n';
    return plan.check.ok() ? kOk : kBackend;
  } catch (const AbortWithoutSolution& e) {
    report.status = "abort";
    report.wallTime = elapsed();
    writeJson(toJson(report), out / (stem + ".run.json"));
    std::cerr << "aborted without solution: " << e.what() << '\n';
    return kAborted;
  } catch (const SmoothingError& e) {
    report.status = "abort";
    report.wallTime = elapsed();
    writeJson(toJson(report), out / (stem + ".run.json"));
    std::cerr << "smoothing failed: " << e.what() << '\n';
    return kAborted;
  } catch (const BackendError& e) {
    report.status = "error";
    report.wallTime = elapsed();
    writeJson(toJson(report), out / (stem + ".run.json"));
    std::cerr << "solver backend: " << e.what() << '\n';
    return kBackend;
  }
}

int runReport(const std::vector<std::string>& files, const std::string& output) {
  std::vector<RunReport> reports;
  for (const auto& f : files) reports.push_back(runReportFromJson(readJson(f)));
  const nlohmann::json summary = aggregate(reports);
  if (output.empty()) std::cout << summary.dump(2) << '\n';
  else writeJson(summary, output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operation planning for gas network stations"};
  app.require_subcommand(1);

  std::string validatePath;
  auto* validate = app.add_subcommand("validate", "Load and check an instance document");
  validate->add_option("instance", validatePath)->required();

  std::string rangesPath;
  std::string rangesOut;
  std::size_t rangeSamples = kDefaultPowerSamples;
  auto* ranges = app.add_subcommand("build-ranges", "Compute configuration operating ranges");
  ranges->add_option("instance", rangesPath)->required();
  ranges->add_option("--samples", rangeSamples, "Power fit samples per unit");
  ranges->add_option("--output", rangesOut, "Cache file (default <instance>.ranges.json)");

  SolveArgs solveArgs;
  auto* solve = app.add_subcommand("solve", "Plan operation modes and transient states");
  solve->set_help_flag("--help", "Print this help message and exit");
  solve->add_option("instance", solveArgs.instance)->required();
  solve->add_option("--steps", solveArgs.steps, "Resample onto the 12, 24, 48 or 96 step grid")
      ->check(CLI::IsMember({12, 24, 48, 96}));
  solve->add_option("--h", solveArgs.horizon, "Smoothing window in time positions")
      ->check(CLI::Range(2, 1 << 20));
  solve->add_flag("--lower-bound", solveArgs.lowerBound, "Also solve the full model for a bound");
  solve->add_option("--lower-bound-time-limit", solveArgs.lowerBoundTimeLimit, "Seconds");
  solve->add_option("--export-lp", solveArgs.exportLp, "Directory for LP files of every model");
  solve->add_option("--seed", solveArgs.seed, "Solver seed");
  solve->add_option("--output-dir", solveArgs.outputDir, "Where plan, CSV and run report go");
  solve->add_option("--backend", solveArgs.backend, "External solver command (file transport)");
  solve->add_option("--samples", solveArgs.samples, "Power fit samples per unit");

  std::vector<std::string> reportFiles;
  std::string reportOut;
  auto* report = app.add_subcommand("report", "Aggregate run reports");
  report->add_option("results", reportFiles)->required()->check(CLI::ExistingFile);
  report->add_option("--output", reportOut);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return runValidate(validatePath);
    if (*ranges) return runBuildRanges(rangesPath, rangeSamples, rangesOut);
    if (*solve) return runSolve(solveArgs);
    if (*report) return runReport(reportFiles, reportOut);
  } catch (const SchemaError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kInvalid;
  } catch (const BackendError& e) {
    std::cerr << "solver backend: " << e.what() << '\n';
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kUsage;
}
