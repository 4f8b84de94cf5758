#include "netstation/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "Highs.h"
#include "netstation/errors.hpp"

namespace netstation {

namespace {

constexpr double kTenHours = 36000.0;

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string formatNumber(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

void checkSettings(const SolveSettings& s) {
  if (!(s.relativeGap >= 0.0) || !(s.absoluteGap >= 0.0)) {
    throw std::invalid_argument("solver gaps must be non-negative");
  }
  if (!(s.timeLimit > 0.0)) throw std::invalid_argument("solver time limit must be positive");
  if (s.threads < 1) throw std::invalid_argument("solver needs at least one thread");
}

SolveSettings defaultSettingsFor(Variant variant) {
  SolveSettings s;
  switch (variant) {
    case Variant::Stationary:
    case Variant::StationaryFixed:
    case Variant::Full:
      s.relativeGap = 1e-4;
      s.absoluteGap = 1e-2;
      s.timeLimit = kTenHours;
      return s;
    case Variant::TransientFixed:
      s.relativeGap = 5e-3;
      s.absoluteGap = 1e-2;
      s.timeLimit = 60.0;
      return s;
  }
  throw std::invalid_argument("unknown model variant");
}

std::string_view statusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "timeLimit";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

SolveStatus parseStatus(std::string_view name) {
  for (SolveStatus s : {SolveStatus::Optimal, SolveStatus::Feasible, SolveStatus::Infeasible,
                        SolveStatus::TimeLimit, SolveStatus::Error}) {
    if (statusName(s) == name) return s;
  }
  throw NetstationError("unknown solve status '" + std::string(name) + "'");
}

CheckReport checkAssignment(const ModelInstance& model, const std::vector<double>& x) {
  CheckReport report;
  auto note = [&](double violation, const std::string& entity) {
    if (!(violation <= report.worstViolation)) {
      report.worstViolation = std::isnan(violation) ? std::numeric_limits<double>::infinity() : violation;
      report.worstEntity = entity;
    }
  };
  if (x.size() != model.variables.size()) {
    report.worstViolation = std::numeric_limits<double>::infinity();
    report.worstEntity = "assignment size";
    return report;
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const Variable& v = model.variables[j];
    note((v.lower - x[j]) / std::max(1.0, std::abs(v.lower)), "bound " + v.name);
    note((x[j] - v.upper) / std::max(1.0, std::abs(v.upper)), "bound " + v.name);
    if (v.type == VarType::Binary) note(std::abs(x[j] - std::round(x[j])), "integrality " + v.name);
  }
  for (const Row& row : model.rows) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * x[t.var];
    if (std::isfinite(row.lower)) {
      note((row.lower - activity) / std::max(1.0, std::abs(row.lower)), row.name);
    }
    if (std::isfinite(row.upper)) {
      note((activity - row.upper) / std::max(1.0, std::abs(row.upper)), row.name);
    }
  }
  return report;
}

namespace {

SolveResult finalize(const ModelInstance& model, SolveResult result) {
  if (!result.hasSolution()) return result;
  const CheckReport check = checkAssignment(model, result.assignment);
  if (!check.ok()) {
    result.status = SolveStatus::Error;
    result.message = "solution violates '" + check.worstEntity + "' by " +
                     formatNumber(check.worstViolation);
    result.assignment.clear();
    return result;
  }
  result.objective = model.objectiveValue(result.assignment);
  if (result.status == SolveStatus::Optimal && model.binaryCount() == 0) result.bound = result.objective;
  return result;
}

SolveResult knownInfeasible(const ModelInstance& model) {
  SolveResult r;
  r.status = SolveStatus::Infeasible;
  r.objective = r.bound = std::numeric_limits<double>::infinity();
  r.message = model.infeasibilityReason;
  return r;
}

}  // namespace

SolveResult HighsBackend::solve(const ModelInstance& model, const SolveSettings& settings) const {
  checkSettings(settings);
  const auto start = Clock::now();
  if (model.knownInfeasible) return knownInfeasible(model);

  const double inf = kHighsInf;
  const auto cols = static_cast<HighsInt>(model.variables.size());
  HighsLp lp;
  lp.model_name_ = model.name;
  lp.num_col_ = cols;
  lp.num_row_ = static_cast<HighsInt>(model.rows.size());
  lp.sense_ = ObjSense::kMinimize;
  lp.offset_ = model.objectiveConstant();
  lp.col_cost_ = model.objective;
  bool integer = false;
  for (const Variable& v : model.variables) {
    lp.col_lower_.push_back(v.lower);
    lp.col_upper_.push_back(v.upper);
    lp.integrality_.push_back(v.type == VarType::Binary ? HighsVarType::kInteger
                                                        : HighsVarType::kContinuous);
    integer = integer || v.type == VarType::Binary;
  }
  if (!integer) lp.integrality_.clear();
  lp.a_matrix_.format_ = MatrixFormat::kRowwise;
  lp.a_matrix_.num_col_ = cols;
  lp.a_matrix_.num_row_ = lp.num_row_;
  lp.a_matrix_.start_.assign(1, 0);
  for (const Row& row : model.rows) {
    lp.row_lower_.push_back(std::isfinite(row.lower) ? row.lower : -inf);
    lp.row_upper_.push_back(std::isfinite(row.upper) ? row.upper : inf);
    for (const Term& t : row.terms) {
      lp.a_matrix_.index_.push_back(t.var);
      lp.a_matrix_.value_.push_back(t.coef);
    }
    lp.a_matrix_.start_.push_back(static_cast<HighsInt>(lp.a_matrix_.index_.size()));
  }

  Highs highs;
  highs.setOptionValue("output_flag", false);
  highs.setOptionValue("threads", settings.threads);
  highs.setOptionValue("random_seed", static_cast<HighsInt>(settings.seed % 2147483647ULL));
  highs.setOptionValue("mip_rel_gap", settings.relativeGap);
  highs.setOptionValue("mip_abs_gap", settings.absoluteGap);
  highs.setOptionValue("time_limit", settings.timeLimit);
  if (settings.emphasisNumericalStability) {
    highs.setOptionValue("primal_feasibility_tolerance", 1e-9);
    highs.setOptionValue("dual_feasibility_tolerance", 1e-9);
    highs.setOptionValue("mip_feasibility_tolerance", 1e-9);
  }

  SolveResult result;
  if (highs.passModel(std::move(lp)) == HighsStatus::kError) {
    result.message = "HiGHS rejected the model";
    result.wallTime = secondsSince(start);
    return result;
  }
  if (model.warmStart && model.warmStart->size() == model.variables.size()) {
    HighsSolution warm;
    warm.col_value = *model.warmStart;
    warm.value_valid = true;
    highs.setSolution(warm);
  }
  if (highs.run() == HighsStatus::kError) {
    result.message = "HiGHS run failed";
    result.wallTime = secondsSince(start);
    return result;
  }

  const HighsInfo& info = highs.getInfo();
  const bool haveSolution = info.primal_solution_status == kSolutionStatusFeasible;
  switch (highs.getModelStatus()) {
    case HighsModelStatus::kOptimal: result.status = SolveStatus::Optimal; break;
    case HighsModelStatus::kInfeasible:
    case HighsModelStatus::kUnboundedOrInfeasible: result.status = SolveStatus::Infeasible; break;
    case HighsModelStatus::kTimeLimit: result.status = SolveStatus::TimeLimit; break;
    default:
      result.status = haveSolution ? SolveStatus::Feasible : SolveStatus::Error;
      result.message = highs.modelStatusToString(highs.getModelStatus());
      break;
  }
  if (haveSolution && result.status != SolveStatus::Infeasible) {
    result.assignment = highs.getSolution().col_value;
    for (std::size_t j = 0; j < result.assignment.size(); ++j) {
      if (model.variables[j].type == VarType::Binary) result.assignment[j] = std::round(result.assignment[j]);
    }
  }
  result.bound = integer ? info.mip_dual_bound : info.objective_function_value;
  if (result.status == SolveStatus::Infeasible) {
    result.objective = result.bound = std::numeric_limits<double>::infinity();
  }
  result = finalize(model, std::move(result));
  result.wallTime = secondsSince(start);
  return result;
}

FileBackend::FileBackend(std::string executable, std::filesystem::path workDirectory)
    : executable_(std::move(executable)), workDirectory_(std::move(workDirectory)) {}

SolveResult FileBackend::solve(const ModelInstance& model, const SolveSettings& settings) const {
  checkSettings(settings);
  const auto start = Clock::now();
  if (model.knownInfeasible) return knownInfeasible(model);
  std::filesystem::create_directories(workDirectory_);
  const auto lpPath = workDirectory_ / (model.name + ".lp");
  const auto solPath = workDirectory_ / (model.name + ".sol");
  std::filesystem::remove(solPath);
  writeLpFile(model, lpPath);

  std::ostringstream cmd;
  cmd << '"' << executable_ << '"' << " --rel-gap " << formatNumber(settings.relativeGap)
      << " --abs-gap " << formatNumber(settings.absoluteGap) << " --time-limit "
      << formatNumber(settings.timeLimit) << " --threads " << settings.threads << " --seed "
      << settings.seed << (settings.emphasisNumericalStability ? " --numeric-focus" : "") << " \""
      << lpPath.string() << "\" \"" << solPath.string() << '"';
  SolveResult result;
  if (std::system(cmd.str().c_str()) != 0) {
    result.message = "solver command failed: " + cmd.str();
    result.wallTime = secondsSince(start);
    return result;
  }
  std::ifstream in(solPath);
  if (!in) {
    result.message = "solver wrote no solution file";
    result.wallTime = secondsSince(start);
    return result;
  }
  SolveResult read = readSolutionText(in, model);
  // LP text carries no objective constant, so the external bound lacks it.
  if (std::isfinite(read.bound)) read.bound += model.objectiveConstant();
  result = finalize(model, std::move(read));
  result.wallTime = secondsSince(start);
  return result;
}

std::unique_ptr<SolverBackend> makeDefaultBackend() { return std::make_unique<HighsBackend>(); }

// --- LP text -----------------------------------------------------------------

namespace {

void writeTerms(std::ostream& out, const std::vector<Term>& terms, const ModelInstance& model) {
  if (terms.empty()) {
    out << " 0 " << model.variables.front().name;
    return;
  }
  int column = 0;
  for (const Term& t : terms) {
    out << (t.coef < 0.0 ? " - " : " + ") << formatNumber(std::abs(t.coef)) << ' '
        << model.variables[t.var].name;
    if (++column % 8 == 0) out << "\n ";
  }
}

}  // namespace

std::string writeLp(const ModelInstance& model) {
  std::ostringstream out;
  out << "\\ " << model.name << "\n";
  out << "\\ objective constant " << formatNumber(model.objectiveConstant()) << "\n";
  out << "Minimize\n obj:";
  std::vector<Term> objective;
  for (std::size_t j = 0; j < model.objective.size(); ++j) {
    if (model.objective[j] != 0.0) objective.push_back({static_cast<int>(j), model.objective[j]});
  }
  if (model.variables.empty()) {
    out << "\nSubject To\nEnd\n";
    return out.str();
  }
  writeTerms(out, objective, model);
  out << "\nSubject To\n";
  for (const Row& row : model.rows) {
    const bool lower = std::isfinite(row.lower);
    const bool upper = std::isfinite(row.upper);
    if (lower && upper && row.lower == row.upper) {
      out << ' ' << row.name << ':';
      writeTerms(out, row.terms, model);
      out << " = " << formatNumber(row.lower) << '\n';
      continue;
    }
    const bool split = lower && upper;
    if (lower) {
      out << ' ' << row.name << (split ? ".lo" : "") << ':';
      writeTerms(out, row.terms, model);
      out << " >= " << formatNumber(row.lower) << '\n';
    }
    if (upper) {
      out << ' ' << row.name << (split ? ".hi" : "") << ':';
      writeTerms(out, row.terms, model);
      out << " <= " << formatNumber(row.upper) << '\n';
    }
  }
  out << "Bounds\n";
  for (const Variable& v : model.variables) {
    if (v.lower == v.upper) {
      out << ' ' << v.name << " = " << formatNumber(v.lower) << '\n';
    } else {
      out << ' ' << formatNumber(v.lower) << " <= " << v.name << " <= " << formatNumber(v.upper) << '\n';
    }
  }
  bool header = false;
  for (const Variable& v : model.variables) {
    if (v.type != VarType::Binary) continue;
    if (!header) out << "General\n";
    header = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

void writeLpFile(const ModelInstance& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NetstationError("cannot write " + path.string());
  out << writeLp(model);
}

// --- solution text -------------------------------------------------------------

void writeSolutionText(std::ostream& out, const SolveResult& result,
                       const std::vector<std::string>& names) {
  out << "#status: " << statusName(result.status) << '\n';
  if (result.hasSolution()) {
    out << "#objective: " << formatNumber(result.objective) << '\n';
    out << "#bound: " << formatNumber(result.bound) << '\n';
    for (std::size_t j = 0; j < names.size() && j < result.assignment.size(); ++j) {
      out << names[j] << ' ' << formatNumber(result.assignment[j]) << '\n';
    }
  }
}

SolveResult readSolutionText(std::istream& in, const ModelInstance& model) {
  SolveResult result;
  std::unordered_map<std::string, double> values;
  bool sawStatus = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(1, colon - 1);
      std::string value = line.substr(colon + 1);
      value.erase(0, value.find_first_not_of(' '));
      if (key == "status") {
        result.status = parseStatus(value);
        sawStatus = true;
      } else if (key == "bound") {
        result.bound = std::stod(value);
      } else if (key == "objective") {
        result.objective = std::stod(value);
      }
      continue;
    }
    std::istringstream fields(line);
    std::string name;
    double value = 0.0;
    if (!(fields >> name >> value)) throw NetstationError("malformed solution line: " + line);
    values[name] = value;
  }
  if (!sawStatus) throw NetstationError("solution text lacks a #status header");
  if (values.empty()) return result;
  result.assignment.resize(model.variables.size());
  for (std::size_t j = 0; j < model.variables.size(); ++j) {
    const auto it = values.find(model.variables[j].name);
    if (it == values.end()) {
      result.status = SolveStatus::Error;
      result.message = "solution lacks variable " + model.variables[j].name;
      result.assignment.clear();
      return result;
    }
    result.assignment[j] = it->second;
  }
  return result;
}

}  // namespace netstation
