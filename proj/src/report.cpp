#include "netstation/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "netstation/errors.hpp"
#include "netstation/units.hpp"

namespace netstation {

namespace {

std::string_view regulatorName(RegulatorMode mode) {
  switch (mode) {
    case RegulatorMode::Closed: return "closed";
    case RegulatorMode::Bypass: return "bypass";
    case RegulatorMode::Active: return "active";
  }
  return "?";
}

std::string number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

nlohmann::json summary(const std::vector<double>& values) {
  if (values.empty()) return {{"count", 0}};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                      static_cast<double>(values.size());
  return {{"count", values.size()},
          {"mean", mean},
          {"min", quantile(values, 0.0)},
          {"p25", quantile(values, 0.25)},
          {"median", quantile(values, 0.5)},
          {"p75", quantile(values, 0.75)},
          {"max", quantile(values, 1.0)}};
}

}  // namespace

nlohmann::json planToJson(const StationProblem& problem, const ControlPlan& plan) {
  const StationSpec& spec = problem.spec();
  const Scenario& scen = problem.scenario();
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t t = 0; t < plan.sequence.size(); ++t) {
    nlohmann::json step;
    step["time"] = units::secondsToMinutes(scen.timeGrid[t]);
    step["mode"] = spec.modes.at(plan.sequence.modes[t]).id;
    const int f = plan.sequence.directions[t];
    step["direction"] = f >= 0 ? nlohmann::json(spec.directions.at(f).id) : nlohmann::json(nullptr);
    nlohmann::json regulators = nlohmann::json::object();
    for (int a : spec.arcsOfKind(ArcKind::Regulator)) {
      regulators[spec.arcs[a].id] = regulatorName(plan.states.at(t).regulatorModes.at(a));
    }
    step["regulators"] = regulators;
    steps.push_back(std::move(step));
  }
  nlohmann::json breakdown = nlohmann::json::object();
  for (std::size_t c = 0; c < kCostCategoryCount; ++c) {
    breakdown[std::string(categoryName(static_cast<CostCategory>(c)))] = plan.breakdown.byCategory[c];
  }
  const auto shares = plan.timings.shares();
  return {
      {"station", spec.name},
      {"steps", steps},
      {"objective", plan.objective},
      {"breakdown", breakdown},
      {"check", {{"worstViolation", plan.check.worstViolation},
                 {"worstEntity", plan.check.worstEntity},
                 {"feasible", plan.check.ok()}}},
      {"timings", {{"initial", plan.timings.initial},
                   {"improve", plan.timings.improve},
                   {"smooth", plan.timings.smooth},
                   {"shares", shares}}},
      {"counts", {{"stationary", plan.counts.stationary},
                  {"stationaryFixed", plan.counts.stationaryFixed},
                  {"stationaryFixedCached", plan.counts.stationaryFixedCached},
                  {"transientFixed", plan.counts.transientFixed},
                  {"smoothingRetries", plan.counts.smoothingRetries},
                  {"improvementSweeps", plan.counts.improvementSweeps}}},
      {"diagnostics", plan.diagnostics},
  };
}

void writeStatesCsv(std::ostream& out, const StationProblem& problem,
                    const std::vector<State>& states) {
  const StationSpec& spec = problem.spec();
  const double rho = spec.gas.normalDensity;
  out << "time";
  for (const Node& n : spec.nodes) out << ",p." << n.id;
  for (const Arc& a : spec.arcs) {
    if (a.kind() == ArcKind::Pipe) out << ",qin." << a.id << ",qout." << a.id;
    else out << ",q." << a.id;
  }
  out << '\n';
  for (std::size_t t = 0; t < states.size(); ++t) {
    const State& s = states[t];
    out << number(units::secondsToMinutes(problem.scenario().timeGrid.at(t)));
    for (double p : s.pressure) out << ',' << number(units::paToBar(p));
    for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
      out << ',' << number(units::massFlowToVolumetric(s.flowIn[a], rho));
      if (spec.arcs[a].kind() == ArcKind::Pipe) {
        out << ',' << number(units::massFlowToVolumetric(s.flowOut[a], rho));
      }
    }
    out << '\n';
  }
}

RunReport makeRunReport(const std::string& instance, const StationProblem& problem,
                        const ControlPlan& plan, double wallTime) {
  RunReport r;
  r.instance = instance;
  r.steps = problem.scenario().steps();
  r.status = "ok";
  r.wallTime = wallTime;
  r.objective = plan.objective;
  for (std::size_t c = 0; c < kCostCategoryCount; ++c) {
    r.breakdown.emplace_back(categoryName(static_cast<CostCategory>(c)), plan.breakdown.byCategory[c]);
  }
  std::sort(r.breakdown.begin(), r.breakdown.end());
  r.shares = plan.timings.shares();
  for (std::size_t t = 1; t < plan.sequence.size(); ++t) {
    if (plan.sequence.modes[t] != plan.sequence.modes[t - 1]) ++r.modeChanges;
  }
  return r;
}

nlohmann::json toJson(const RunReport& r) {
  nlohmann::json breakdown = nlohmann::json::object();
  for (const auto& [name, value] : r.breakdown) breakdown[name] = value;
  nlohmann::json doc = {{"instance", r.instance},   {"steps", r.steps},
                        {"status", r.status},       {"wallTime", r.wallTime},
                        {"objective", r.objective}, {"breakdown", breakdown},
                        {"shares", r.shares},       {"modeChanges", r.modeChanges}};
  if (r.lowerBound) doc["lowerBound"] = *r.lowerBound;
  if (r.gap) doc["gap"] = *r.gap;
  return doc;
}

RunReport runReportFromJson(const nlohmann::json& doc) {
  RunReport r;
  try {
    r.instance = doc.at("instance").get<std::string>();
    r.steps = doc.at("steps").get<std::size_t>();
    r.status = doc.at("status").get<std::string>();
    r.wallTime = doc.at("wallTime").get<double>();
    r.objective = doc.value("objective", 0.0);
    if (doc.contains("breakdown")) {
      for (const auto& [name, value] : doc.at("breakdown").items()) {
        r.breakdown.emplace_back(name, value.get<double>());
      }
      std::sort(r.breakdown.begin(), r.breakdown.end());
    }
    if (doc.contains("shares")) r.shares = doc.at("shares").get<std::array<double, 3>>();
    r.modeChanges = doc.value("modeChanges", std::size_t{0});
    if (doc.contains("lowerBound")) r.lowerBound = doc.at("lowerBound").get<double>();
    if (doc.contains("gap")) r.gap = doc.at("gap").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("report", e.what());
  }
  return r;
}

nlohmann::json aggregate(const std::vector<RunReport>& reports) {
  std::map<std::string, std::size_t> statuses;
  std::map<std::size_t, std::vector<double>> times;
  std::vector<double> gaps;
  std::array<double, 3> shares{};
  std::size_t solved = 0;
  for (const RunReport& r : reports) {
    ++statuses[r.status];
    if (r.status != "ok") continue;
    ++solved;
    times[r.steps].push_back(r.wallTime);
    if (r.gap) gaps.push_back(*r.gap);
    for (std::size_t k = 0; k < 3; ++k) shares[k] += r.shares[k];
  }
  if (solved > 0) {
    for (double& s : shares) s /= static_cast<double>(solved);
  }
  nlohmann::json byStatus = nlohmann::json::object();
  for (const auto& [status, count] : statuses) byStatus[status] = count;
  nlohmann::json bySteps = nlohmann::json::object();
  for (const auto& [steps, values] : times) bySteps[std::to_string(steps)] = summary(values);
  nlohmann::json gap = summary(gaps);
  if (!gaps.empty()) {
    const auto within = std::count_if(gaps.begin(), gaps.end(), [](double g) { return g <= 0.10; });
    gap["atMost10Percent"] = static_cast<double>(within) / static_cast<double>(gaps.size());
  }
  return {{"runs", reports.size()},
          {"status", byStatus},
          {"wallTimeBySteps", bySteps},
          {"gap", gap},
          {"meanShares", {{"initial", shares[0]}, {"improve", shares[1]}, {"smooth", shares[2]}}}};
}

}  // namespace netstation
