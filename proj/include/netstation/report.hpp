#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netstation/algorithm.hpp"

// Output documents: the plan, a CSV of node pressures and arc flows, and the
// per-run summary that `report` aggregates. File units as for instances.

namespace netstation {

nlohmann::json planToJson(const StationProblem& problem, const ControlPlan& plan);

/// One row per time position: minutes, then p.<node> in bar, then
/// q.<arc> in 1000 m^3/h (pipes get qin.<arc> and qout.<arc>).
void writeStatesCsv(std::ostream& out, const StationProblem& problem,
                    const std::vector<State>& states);

struct RunReport {
  std::string instance;
  std::size_t steps = 0;
  std::string status;  // ok | abort | error
  double wallTime = 0.0;
  double objective = 0.0;
  std::vector<std::pair<std::string, double>> breakdown;  // sorted by name
  std::optional<double> lowerBound;
  std::optional<double> gap;
  std::array<double, 3> shares{};  // initial, improve, smooth
  std::size_t modeChanges = 0;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport makeRunReport(const std::string& instance, const StationProblem& problem,
                        const ControlPlan& plan, double wallTime);
nlohmann::json toJson(const RunReport& report);
RunReport runReportFromJson(const nlohmann::json& document);  // throws SchemaError

/// Status counts, wall times per step count, gap distribution and mean
/// phase shares.
nlohmann::json aggregate(const std::vector<RunReport>& reports);

}  // namespace netstation
