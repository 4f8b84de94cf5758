#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "netstation/physics.hpp"

// Station graph, operation modes and scenario data. All values SI: Pa, kg/s, s.
// Entities refer to each other by index into the owning StationSpec vectors.

namespace netstation {

/// One value per time position of the grid, or a single value broadcast to all.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(double constant) : values_{constant} {}
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {}

  double at(std::size_t t) const { return values_.size() == 1 ? values_.front() : values_.at(t); }
  bool isConstant() const { return values_.size() == 1; }
  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double min() const;
  double max() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

enum class NodeKind { Boundary, Inner };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Inner;
  TimeSeries pressureLB;
  TimeSeries pressureUB;
  std::optional<double> exitPressureUB;
};

struct PipeData {
  double length = 0.0;
  double diameter = 0.0;
  double roughness = 0.0;
  double slope = 0.0;  // height difference over length
};

struct ResistorData {
  double drag = 0.0;
  double diameter = 0.0;
};

struct ValveData {};
struct RegulatorData {};

/// One compressor machine. operatingRange2D rows (a0, a1, a2) read
/// a0 + a1 * Q + a2 * (p_out / p_in) <= 0 with Q the inlet volumetric flow in m^3/s.
struct CompressorUnit {
  std::string id;
  std::vector<std::array<double, 3>> operatingRange2D;
  double maxPressureIncrease = 0.0;  // Pa
  double maxPower = 0.0;             // W
  double efficiency = 1.0;
  double inletZ = 1.0;               // set from the initial state at load
};

/// Half-space w * p_in + x * p_out + y * q + z <= 0 of a configuration's
/// operating range, pressures in bar and q in kg/s.
struct ConfigurationFacet {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const ConfigurationFacet&, const ConfigurationFacet&) = default;
};

struct Configuration {
  std::string id;
  std::vector<std::vector<int>> stages;  // unit indices, series order
  std::vector<ConfigurationFacet> facets;
  std::vector<int> unitSet() const;      // sorted, unique
};

struct CompressorStationData {
  std::vector<CompressorUnit> units;
  std::vector<Configuration> configurations;
  int unitIndex(const std::string& id) const;  // -1 if absent
  int configurationIndex(const std::string& id) const;
};

enum class ArcKind { Pipe, Resistor, Valve, Regulator, CompressorStation };

std::string_view kindName(ArcKind kind);

struct Arc {
  std::string id;
  int from = -1;
  int to = -1;
  TimeSeries flowLB;
  TimeSeries flowUB;
  std::variant<PipeData, ResistorData, ValveData, RegulatorData, CompressorStationData> data;

  ArcKind kind() const { return static_cast<ArcKind>(data.index()); }
  const PipeData& pipe() const { return std::get<PipeData>(data); }
  const ResistorData& resistor() const { return std::get<ResistorData>(data); }
  const CompressorStationData& station() const { return std::get<CompressorStationData>(data); }
  CompressorStationData& station() { return std::get<CompressorStationData>(data); }
};

/// What an operation mode does with a valve (Open/Closed) or a compressor
/// station (Bypass/Closed/Active with a configuration index).
struct ModeToken {
  enum class Kind { Open, Closed, Bypass, Active };
  Kind kind = Kind::Closed;
  int configuration = -1;

  static ModeToken open() { return {Kind::Open, -1}; }
  static ModeToken closed() { return {Kind::Closed, -1}; }
  static ModeToken bypass() { return {Kind::Bypass, -1}; }
  static ModeToken active(int configuration) { return {Kind::Active, configuration}; }

  friend bool operator==(const ModeToken&, const ModeToken&) = default;
  friend auto operator<=>(const ModeToken&, const ModeToken&) = default;
};

struct OperationMode {
  std::string id;
  std::vector<std::optional<ModeToken>> assignment;  // indexed by arc
};

struct FlowDirection {
  std::string id;
  std::vector<int> inflowNodes;
  std::vector<int> outflowNodes;
  bool isInflow(int node) const;
  bool isOutflow(int node) const;
};

struct FenceGroup {
  std::string id;
  std::vector<int> nodes;
};

struct FlowCondition {
  int direction = -1;
  std::vector<int> firstNodes;
  std::vector<int> secondNodes;
};

struct UnitOutage {
  int arc = -1;
  int unit = -1;
  double start = 0.0;  // [start, end) in seconds on the scenario clock
  double end = 0.0;
};

enum class RegulatorMode { Closed, Bypass, Active };

/// Fixed valves removed at load. Contracted nodes map to their survivor.
struct ValveRewrite {
  std::vector<std::pair<std::string, std::string>> contractedNodes;  // removed -> kept
  std::vector<std::string> removedArcs;
  bool empty() const { return contractedNodes.empty() && removedArcs.empty(); }
};

struct StationSpec {
  std::string name;
  GasConstants gas;
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::vector<OperationMode> modes;
  std::vector<FlowDirection> directions;
  std::vector<std::pair<int, int>> validPairs;  // (mode, direction)
  std::vector<FenceGroup> fenceGroups;
  std::vector<FlowCondition> flowConditions;
  std::vector<std::vector<double>> transitionTimes;  // [from][to], seconds
  std::vector<UnitOutage> outages;
  ValveRewrite rewrite;

  int nodeIndex(const std::string& id) const;  // throws NetstationError
  int arcIndex(const std::string& id) const;
  int modeIndex(const std::string& id) const;
  int directionIndex(const std::string& id) const;
  int findNode(const std::string& id) const;    // -1 if absent
  int findArc(const std::string& id) const;

  std::vector<int> arcsOfKind(ArcKind kind) const;
  bool isValidPair(int mode, int direction) const;
  std::vector<int> directionsOf(int mode) const;
  double transitionTime(int from, int to) const;

  /// (arc, unit) pairs running in the given mode.
  std::vector<std::pair<int, int>> unitsInUse(int mode) const;
};

/// Snapshot of every state quantity at one time position.
struct State {
  int mode = -1;
  int direction = -1;                // -1 for the initial state
  std::vector<double> pressure;      // per node
  std::vector<double> inflow;        // per node, boundary nodes only (0 otherwise)
  std::vector<double> flowIn;        // per arc; for non-pipes flowIn == flowOut
  std::vector<double> flowOut;       // per arc
  std::vector<RegulatorMode> regulatorModes;  // per arc, meaningful for regulators
};

struct Scenario {
  std::vector<double> timeGrid;                    // seconds, starts at 0
  std::vector<TimeSeries> pressureDemand;          // per node; empty for inner nodes
  std::vector<TimeSeries> flowDemand;              // per fence group
  std::vector<TimeSeries> inflowLB;                // per node
  std::vector<TimeSeries> inflowUB;
  State initialState;

  std::size_t positions() const { return timeGrid.size(); }
  std::size_t steps() const { return timeGrid.empty() ? 0 : timeGrid.size() - 1; }
  double stepLength(std::size_t t) const { return timeGrid.at(t) - timeGrid.at(t - 1); }
};

/// Operation mode and flow direction per time position; position 0 is the
/// initial state, whose direction is left at -1.
struct ModeSequence {
  std::vector<int> modes;
  std::vector<int> directions;

  std::size_t size() const { return modes.size(); }
  friend bool operator==(const ModeSequence&, const ModeSequence&) = default;
};

struct Violation {
  std::string entity;
  std::string rule;
  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate(const StationSpec& spec, const Scenario& scenario);

/// False iff a unit of the mode's configurations is out during [delta_t, delta_t+1)
/// (at delta_t itself for the last position).
bool modeAvailable(const StationSpec& spec, const std::vector<double>& timeGrid, int mode,
                   std::size_t t);

ModeToken modeOf(const StationSpec& spec, int mode, int arc);

/// Token of the station in the mode, expanded into the binary pattern used by the model.
struct StationSetting {
  bool bypass = false;
  bool closed = false;
  int configuration = -1;
};
StationSetting stationSetting(const StationSpec& spec, int mode, int arc);

}  // namespace netstation
