#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "netstation/model_builder.hpp"
#include "netstation/network.hpp"

// Instance documents. Files carry bar, 1000 m^3/h (normal conditions),
// minutes and kW; everything is converted to SI when parsed.

namespace netstation {

struct Instance {
  StationSpec spec;
  Scenario scenario;
  ObjectiveWeights weights;

  friend bool operator==(const Instance&, const Instance&);
};

/// Parses and validates. Fixed valves are resolved: a valve open in every
/// mode has its inner endpoint contracted, one closed in every mode is
/// removed. Throws SchemaError with the offending path.
Instance parseInstance(const nlohmann::json& document);
Instance loadInstance(const std::filesystem::path& path);

/// Canonical form: entities in stored order, keys sorted, file units.
nlohmann::json instanceToJson(const Instance& instance);
void saveInstance(const Instance& instance, const std::filesystem::path& path);

/// Step-length runs partitioning the 12 h horizon.
struct TimeGridTemplate {
  std::string name;
  std::vector<std::pair<int, double>> runs;  // (count, minutes)

  std::size_t steps() const;
  std::vector<double> grid() const;  // seconds, starting at 0
};
TimeGridTemplate timeGridTemplate(int steps);  // 12, 24, 48 or 96

/// Piecewise-linear resampling of every time-dependent scenario series onto
/// `target` (seconds). Constant series stay constant.
Scenario interpolateScenario(const Scenario& raw, const std::vector<double>& target);

/// Same resampling for the spec's per-time bounds; returns the instance on
/// the new grid.
Instance retime(const Instance& instance, const std::vector<double>& target);

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double at);

/// Configuration facets keyed by station and input hash.
nlohmann::json rangesToJson(const StationSpec& spec, std::size_t samples);
/// Applies cached facets whose hash still matches; returns the ids of
/// stations that were not covered.
std::vector<std::string> applyRanges(StationSpec& spec, const nlohmann::json& cache,
                                     std::size_t samples);
std::filesystem::path rangeCachePath(const std::filesystem::path& instancePath);

nlohmann::json readJson(const std::filesystem::path& path);
void writeJson(const nlohmann::json& document, const std::filesystem::path& path);

}  // namespace netstation
