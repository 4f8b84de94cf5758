#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "netstation/model.hpp"

// Uniform access to a MIP solver. Backends return checked results: every
// assignment they hand out has been replayed against the model rows.

namespace netstation {

struct SolveSettings {
  double relativeGap = 1e-4;
  double absoluteGap = 1e-2;
  double timeLimit = 36000.0;  // seconds
  bool emphasisNumericalStability = true;
  int threads = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const SolveSettings&, const SolveSettings&) = default;
};

void checkSettings(const SolveSettings& settings);  // throws std::invalid_argument

/// Gap and time limit per model variant. The full model shares the
/// stationary row; callers override its time limit.
SolveSettings defaultSettingsFor(Variant variant);

enum class SolveStatus { Optimal, Feasible, Infeasible, TimeLimit, Error };
std::string_view statusName(SolveStatus status);
SolveStatus parseStatus(std::string_view name);  // throws NetstationError

struct SolveResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  double bound = 0.0;
  std::vector<double> assignment;  // per model variable; empty without a solution
  double wallTime = 0.0;           // seconds
  std::string message;

  bool hasSolution() const { return !assignment.empty(); }
};

/// Largest scaled violation of rows, bounds and integrality. Row violations
/// are divided by max(1, |violated side|).
struct CheckReport {
  double worstViolation = 0.0;
  std::string worstEntity;
  bool ok(double tolerance = kFeasibilityTolerance) const { return worstViolation <= tolerance; }

  static constexpr double kFeasibilityTolerance = 1e-6;
};
CheckReport checkAssignment(const ModelInstance& model, const std::vector<double>& x);

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  /// Never throws for solver-side failures; those come back as status Error.
  virtual SolveResult solve(const ModelInstance& model, const SolveSettings& settings) const = 0;
};

/// In-process HiGHS.
class HighsBackend final : public SolverBackend {
 public:
  std::string name() const override { return "highs"; }
  SolveResult solve(const ModelInstance& model, const SolveSettings& settings) const override;
};

/// Writes the model as LP text, runs an external command and reads the
/// solution text back. The command is invoked as
///   <executable> --rel-gap R --abs-gap A --time-limit T --threads N --seed S [--numeric-focus] <lp> <solution>
class FileBackend final : public SolverBackend {
 public:
  FileBackend(std::string executable, std::filesystem::path workDirectory);
  std::string name() const override { return "file:" + executable_; }
  SolveResult solve(const ModelInstance& model, const SolveSettings& settings) const override;

 private:
  std::string executable_;
  std::filesystem::path workDirectory_;
};

std::unique_ptr<SolverBackend> makeDefaultBackend();

/// CPLEX LP text. Ranged rows are split into `<name>.lo` / `<name>.hi`,
/// integer columns keep their bounds through a General section. The output
/// depends only on the model, so repeated exports are byte-identical.
std::string writeLp(const ModelInstance& model);
void writeLpFile(const ModelInstance& model, const std::filesystem::path& path);

/// `#status: <name>` header, optional `#objective:` / `#bound:` lines,
/// then one `name value` pair per line.
void writeSolutionText(std::ostream& out, const SolveResult& result,
                       const std::vector<std::string>& names);
/// Reads the text back into `model`'s variable order. Variables missing from
/// the file make the result an error. Objective is recomputed from the model.
SolveResult readSolutionText(std::istream& in, const ModelInstance& model);

}  // namespace netstation
