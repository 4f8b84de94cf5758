#include "netstation/network.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include "netstation/errors.hpp"

namespace netstation {

double TimeSeries::min() const {
  if (values_.empty()) throw std::logic_error("empty time series");
  return *std::min_element(values_.begin(), values_.end());
}

double TimeSeries::max() const {
  if (values_.empty()) throw std::logic_error("empty time series");
  return *std::max_element(values_.begin(), values_.end());
}

std::vector<int> Configuration::unitSet() const {
  std::vector<int> units;
  for (const auto& stage : stages) units.insert(units.end(), stage.begin(), stage.end());
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  return units;
}

int CompressorStationData::unitIndex(const std::string& id) const {
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (units[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int CompressorStationData::configurationIndex(const std::string& id) const {
  for (std::size_t i = 0; i < configurations.size(); ++i) {
    if (configurations[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string_view kindName(ArcKind kind) {
  switch (kind) {
    case ArcKind::Pipe: return "pipe";
    case ArcKind::Resistor: return "resistor";
    case ArcKind::Valve: return "valve";
    case ArcKind::Regulator: return "regulator";
    case ArcKind::CompressorStation: return "compressor station";
  }
  return "?";
}

bool FlowDirection::isInflow(int node) const {
  return std::find(inflowNodes.begin(), inflowNodes.end(), node) != inflowNodes.end();
}

bool FlowDirection::isOutflow(int node) const {
  return std::find(outflowNodes.begin(), outflowNodes.end(), node) != outflowNodes.end();
}

namespace {

template <typename T>
int findById(const std::vector<T>& items, const std::string& id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

template <typename T>
int requireById(const std::vector<T>& items, const std::string& id, const char* what) {
  const int index = findById(items, id);
  if (index < 0) throw NetstationError(std::string("unknown ") + what + " '" + id + "'");
  return index;
}

}  // namespace

int StationSpec::nodeIndex(const std::string& id) const { return requireById(nodes, id, "node"); }
int StationSpec::arcIndex(const std::string& id) const { return requireById(arcs, id, "arc"); }
int StationSpec::modeIndex(const std::string& id) const {
  return requireById(modes, id, "operation mode");
}
int StationSpec::directionIndex(const std::string& id) const {
  return requireById(directions, id, "flow direction");
}
int StationSpec::findNode(const std::string& id) const { return findById(nodes, id); }
int StationSpec::findArc(const std::string& id) const { return findById(arcs, id); }

std::vector<int> StationSpec::arcsOfKind(ArcKind kind) const {
  std::vector<int> out;
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (arcs[a].kind() == kind) out.push_back(static_cast<int>(a));
  }
  return out;
}

bool StationSpec::isValidPair(int mode, int direction) const {
  return std::find(validPairs.begin(), validPairs.end(), std::pair{mode, direction}) !=
         validPairs.end();
}

std::vector<int> StationSpec::directionsOf(int mode) const {
  std::vector<int> out;
  for (const auto& [o, f] : validPairs) {
    if (o == mode) out.push_back(f);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double StationSpec::transitionTime(int from, int to) const {
  if (from == to) return 0.0;
  if (from < 0 || to < 0 || static_cast<std::size_t>(from) >= transitionTimes.size() ||
      static_cast<std::size_t>(to) >= transitionTimes[from].size()) {
    throw NetstationError("missing transition time entry");
  }
  return transitionTimes[from][to];
}

std::vector<std::pair<int, int>> StationSpec::unitsInUse(int mode) const {
  std::vector<std::pair<int, int>> used;
  for (int a : arcsOfKind(ArcKind::CompressorStation)) {
    const ModeToken token = modeOf(*this, mode, a);
    if (token.kind != ModeToken::Kind::Active) continue;
    for (int u : arcs[a].station().configurations.at(token.configuration).unitSet()) {
      used.emplace_back(a, u);
    }
  }
  return used;
}

ModeToken modeOf(const StationSpec& spec, int mode, int arc) {
  if (mode < 0 || static_cast<std::size_t>(mode) >= spec.modes.size()) {
    throw NetstationError("unknown operation mode index");
  }
  const ArcKind kind = spec.arcs.at(arc).kind();
  if (kind != ArcKind::Valve && kind != ArcKind::CompressorStation) {
    throw NetstationError("arc '" + spec.arcs[arc].id + "' is a " + std::string(kindName(kind)) +
                          ", modes only assign valves and compressor stations");
  }
  const auto& token = spec.modes[mode].assignment.at(arc);
  if (!token) {
    throw NetstationError("mode '" + spec.modes[mode].id + "' leaves arc '" + spec.arcs[arc].id +
                          "' unassigned");
  }
  return *token;
}

StationSetting stationSetting(const StationSpec& spec, int mode, int arc) {
  const ModeToken token = modeOf(spec, mode, arc);
  StationSetting setting;
  setting.bypass = token.kind == ModeToken::Kind::Bypass;
  setting.closed = token.kind == ModeToken::Kind::Closed;
  if (token.kind == ModeToken::Kind::Active) setting.configuration = token.configuration;
  return setting;
}

bool modeAvailable(const StationSpec& spec, const std::vector<double>& timeGrid, int mode,
                   std::size_t t) {
  if (t >= timeGrid.size()) throw std::out_of_range("time position outside the grid");
  const bool last = t + 1 == timeGrid.size();
  const double begin = timeGrid[t];
  const double end = last ? begin : timeGrid[t + 1];
  for (const auto& [arc, unit] : spec.unitsInUse(mode)) {
    for (const UnitOutage& outage : spec.outages) {
      if (outage.arc != arc || outage.unit != unit) continue;
      const bool hit = last ? (outage.start <= begin && begin < outage.end)
                            : (outage.start < end && begin < outage.end);
      if (hit) return false;
    }
  }
  return true;
}

namespace {

class ViolationList {
 public:
  void add(std::string entity, std::string rule) {
    items_.push_back({std::move(entity), std::move(rule)});
  }
  std::vector<Violation> take() { return std::move(items_); }

 private:
  std::vector<Violation> items_;
};

bool validId(const std::string& id) {
  static const std::regex pattern("[A-Za-z0-9_]+");
  return std::regex_match(id, pattern);
}

template <typename T>
void checkIds(const std::vector<T>& items, const std::string& what, ViolationList& out) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!validId(item.id)) out.add(what + " '" + item.id + "'", "id must match [A-Za-z0-9_]+");
    if (!seen.insert(item.id).second) out.add(what + " '" + item.id + "'", "duplicate id");
  }
}

bool seriesFits(const TimeSeries& series, std::size_t positions) {
  return series.size() == 1 || series.size() == positions;
}

void checkNodes(const StationSpec& spec, std::size_t positions, ViolationList& out) {
  checkIds(spec.nodes, "node", out);
  for (const Node& node : spec.nodes) {
    const std::string entity = "node '" + node.id + "'";
    if (!seriesFits(node.pressureLB, positions) || !seriesFits(node.pressureUB, positions)) {
      out.add(entity, "pressure bounds need one value or one per time position");
      continue;
    }
    for (std::size_t t = 0; t < positions; ++t) {
      if (!(node.pressureLB.at(t) > 0.0)) {
        out.add(entity, "pressure lower bound must be positive");
        break;
      }
      if (node.pressureLB.at(t) > node.pressureUB.at(t)) {
        out.add(entity, "pressure lower bound exceeds upper bound");
        break;
      }
    }
    if (node.exitPressureUB) {
      if (node.kind != NodeKind::Boundary) {
        out.add(entity, "exit pressure bound on a non-boundary node");
      } else if (*node.exitPressureUB > node.pressureUB.min()) {
        out.add(entity, "exit pressure bound exceeds pressure upper bound");
      }
    }
  }
}

void checkStation(const std::string& entity, const CompressorStationData& station,
                  ViolationList& out) {
  checkIds(station.units, entity + " unit", out);
  checkIds(station.configurations, entity + " configuration", out);
  for (const CompressorUnit& unit : station.units) {
    const std::string name = entity + " unit '" + unit.id + "'";
    if (unit.operatingRange2D.empty()) out.add(name, "operating range facets missing");
    if (!(unit.maxPower > 0.0)) out.add(name, "maximal power must be positive");
    if (!(unit.maxPressureIncrease > 0.0)) out.add(name, "maximal pressure increase must be positive");
    if (!(unit.efficiency > 0.0 && unit.efficiency <= 1.0)) {
      out.add(name, "adiabatic efficiency must lie in (0, 1]");
    }
  }
  for (const Configuration& config : station.configurations) {
    const std::string name = entity + " configuration '" + config.id + "'";
    if (config.stages.empty()) out.add(name, "needs at least one stage");
    std::set<int> seen;
    for (const auto& stage : config.stages) {
      if (stage.empty()) out.add(name, "empty stage");
      for (int u : stage) {
        if (u < 0 || static_cast<std::size_t>(u) >= station.units.size()) {
          out.add(name, "references a unit outside the station");
        } else if (!seen.insert(u).second) {
          out.add(name, "uses unit '" + station.units[u].id + "' twice");
        }
      }
    }
  }
}

void checkArcs(const StationSpec& spec, std::size_t positions, ViolationList& out) {
  checkIds(spec.arcs, "arc", out);
  const auto nodeCount = static_cast<int>(spec.nodes.size());
  for (const Arc& arc : spec.arcs) {
    const std::string entity = "arc '" + arc.id + "'";
    if (arc.from < 0 || arc.from >= nodeCount || arc.to < 0 || arc.to >= nodeCount) {
      out.add(entity, "endpoint is not a node");
    } else if (arc.from == arc.to) {
      out.add(entity, "loop arc");
    }
    if (arc.kind() != ArcKind::Pipe && arc.kind() != ArcKind::Resistor) {
      if (!seriesFits(arc.flowLB, positions) || !seriesFits(arc.flowUB, positions)) {
        out.add(entity, "flow bounds need one value or one per time position");
      } else {
        for (std::size_t t = 0; t < positions; ++t) {
          if (arc.flowLB.at(t) > arc.flowUB.at(t)) {
            out.add(entity, "flow lower bound exceeds upper bound");
            break;
          }
        }
      }
    }
    switch (arc.kind()) {
      case ArcKind::Pipe: {
        const PipeData& pipe = arc.pipe();
        if (!(pipe.length > 0.0)) out.add(entity, "pipe length must be positive");
        if (!(pipe.diameter > 0.0)) out.add(entity, "pipe diameter must be positive");
        if (!(pipe.roughness > 0.0) || pipe.roughness >= pipe.diameter) {
          out.add(entity, "pipe roughness must be positive and below the diameter");
        }
        if (!(std::abs(pipe.slope) <= 1.0)) out.add(entity, "pipe slope must lie in [-1, 1]");
        break;
      }
      case ArcKind::Resistor:
        if (!(arc.resistor().drag >= 0.0)) out.add(entity, "drag factor must be non-negative");
        if (!(arc.resistor().diameter > 0.0)) out.add(entity, "resistor diameter must be positive");
        break;
      case ArcKind::Regulator:
        if (!arc.flowLB.empty() && arc.flowLB.min() != 0.0) {
          out.add(entity, "regulator flow lower bound must be 0");
        }
        break;
      case ArcKind::CompressorStation:
        checkStation(entity, arc.station(), out);
        if (!arc.flowLB.empty() && arc.flowUB.max() < 0.0) {
          out.add(entity, "compressor station flow upper bound is negative");
        }
        break;
      case ArcKind::Valve:
        break;
    }
  }
}

void checkModes(const StationSpec& spec, ViolationList& out) {
  checkIds(spec.modes, "operation mode", out);
  for (const OperationMode& mode : spec.modes) {
    const std::string entity = "operation mode '" + mode.id + "'";
    if (mode.assignment.size() != spec.arcs.size()) {
      out.add(entity, "assignment table does not match the arc list");
      continue;
    }
    for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
      const Arc& arc = spec.arcs[a];
      const auto& token = mode.assignment[a];
      const bool switchable =
          arc.kind() == ArcKind::Valve || arc.kind() == ArcKind::CompressorStation;
      if (!switchable) {
        if (token) out.add(entity, "assigns non-switchable arc '" + arc.id + "'");
        continue;
      }
      if (!token) {
        out.add(entity, "misses an assignment for " + std::string(kindName(arc.kind())) + " '" +
                            arc.id + "'");
        continue;
      }
      using Kind = ModeToken::Kind;
      if (arc.kind() == ArcKind::Valve) {
        if (token->kind != Kind::Open && token->kind != Kind::Closed) {
          out.add(entity, "valve '" + arc.id + "' must be open or closed");
        }
      } else if (token->kind == Kind::Open) {
        out.add(entity, "station '" + arc.id + "' needs bypass, closed or a configuration");
      } else if (token->kind == Kind::Active &&
                 (token->configuration < 0 ||
                  static_cast<std::size_t>(token->configuration) >=
                      arc.station().configurations.size())) {
        out.add(entity, "station '" + arc.id + "' uses an unknown configuration");
      }
    }
  }
}

bool isBoundary(const StationSpec& spec, int node) {
  return node >= 0 && static_cast<std::size_t>(node) < spec.nodes.size() &&
         spec.nodes[node].kind == NodeKind::Boundary;
}

void checkDirections(const StationSpec& spec, ViolationList& out) {
  checkIds(spec.directions, "flow direction", out);
  for (const FlowDirection& direction : spec.directions) {
    const std::string entity = "flow direction '" + direction.id + "'";
    for (int v : direction.inflowNodes) {
      if (!isBoundary(spec, v)) out.add(entity, "inflow member is not a boundary node");
      if (direction.isOutflow(v)) out.add(entity, "node is both inflow and outflow");
    }
    for (int v : direction.outflowNodes) {
      if (!isBoundary(spec, v)) out.add(entity, "outflow member is not a boundary node");
    }
  }
  if (spec.validPairs.empty()) out.add("valid pairs", "no valid (mode, direction) pair");
  for (const auto& [o, f] : spec.validPairs) {
    if (o < 0 || static_cast<std::size_t>(o) >= spec.modes.size() || f < 0 ||
        static_cast<std::size_t>(f) >= spec.directions.size()) {
      out.add("valid pairs", "pair references an unknown mode or direction");
    }
  }
  std::set<int> grouped;
  for (const FenceGroup& group : spec.fenceGroups) {
    if (group.nodes.empty()) out.add("fence group '" + group.id + "'", "has no members");
    for (int v : group.nodes) {
      if (!isBoundary(spec, v)) {
        out.add("fence group '" + group.id + "'", "member is not a boundary node");
      } else if (!grouped.insert(v).second) {
        out.add("fence group '" + group.id + "'",
                "node '" + spec.nodes[v].id + "' already belongs to another group");
      }
    }
  }
  for (std::size_t i = 0; i < spec.flowConditions.size(); ++i) {
    const FlowCondition& condition = spec.flowConditions[i];
    const std::string entity = "flow condition " + std::to_string(i);
    if (condition.direction < 0 ||
        static_cast<std::size_t>(condition.direction) >= spec.directions.size()) {
      out.add(entity, "unknown flow direction");
      continue;
    }
    const FlowDirection& direction = spec.directions[condition.direction];
    for (const auto* set : {&condition.firstNodes, &condition.secondNodes}) {
      const bool allIn = std::all_of(set->begin(), set->end(),
                                     [&](int v) { return direction.isInflow(v); });
      const bool allOut = std::all_of(set->begin(), set->end(),
                                      [&](int v) { return direction.isOutflow(v); });
      if (set->empty() || !(allIn || allOut)) {
        out.add(entity, "node set must lie entirely in the inflow or the outflow set");
      }
    }
  }
}

void checkTransitions(const StationSpec& spec, ViolationList& out) {
  const std::size_t n = spec.modes.size();
  bool shapeOk = spec.transitionTimes.size() == n;
  for (const auto& row : spec.transitionTimes) shapeOk = shapeOk && row.size() == n;
  if (!shapeOk) {
    out.add("transition times", "table must cover every pair of modes");
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(spec.transitionTimes[i][j] >= 0.0)) {
        out.add("transition times", "negative entry for '" + spec.modes[i].id + "' -> '" +
                                        spec.modes[j].id + "'");
      }
    }
  }
}

void checkOutages(const StationSpec& spec, ViolationList& out) {
  for (const UnitOutage& outage : spec.outages) {
    const bool arcOk = outage.arc >= 0 && static_cast<std::size_t>(outage.arc) < spec.arcs.size() &&
                       spec.arcs[outage.arc].kind() == ArcKind::CompressorStation;
    if (!arcOk || outage.unit < 0 ||
        static_cast<std::size_t>(outage.unit) >= spec.arcs[outage.arc].station().units.size()) {
      out.add("unavailability", "window references an unknown compressor unit");
    } else if (!(outage.start < outage.end)) {
      out.add("unavailability", "window for unit '" +
                                    spec.arcs[outage.arc].station().units[outage.unit].id +
                                    "' must end after it starts");
    }
  }
}

void checkScenario(const StationSpec& spec, const Scenario& scenario, ViolationList& out) {
  const auto& grid = scenario.timeGrid;
  if (grid.size() < 2) out.add("scenario", "time grid needs at least two positions");
  if (!grid.empty() && grid.front() != 0.0) out.add("scenario", "time grid must start at 0");
  for (std::size_t t = 1; t < grid.size(); ++t) {
    if (!(grid[t] > grid[t - 1])) {
      out.add("scenario", "time grid must be strictly increasing");
      break;
    }
  }
  const std::size_t positions = grid.size();
  const std::size_t nodeCount = spec.nodes.size();
  if (scenario.pressureDemand.size() != nodeCount || scenario.inflowLB.size() != nodeCount ||
      scenario.inflowUB.size() != nodeCount) {
    out.add("scenario", "node tables do not match the node list");
  } else {
    for (std::size_t v = 0; v < nodeCount; ++v) {
      const std::string entity = "scenario node '" + spec.nodes[v].id + "'";
      const bool boundary = spec.nodes[v].kind == NodeKind::Boundary;
      if (!scenario.pressureDemand[v].empty()) {
        if (!boundary) out.add(entity, "pressure demand on a non-boundary node");
        else if (!seriesFits(scenario.pressureDemand[v], positions))
          out.add(entity, "pressure demand length does not match the grid");
      }
      if (boundary) {
        const auto& lb = scenario.inflowLB[v];
        const auto& ub = scenario.inflowUB[v];
        if (lb.empty() || ub.empty() || !seriesFits(lb, positions) || !seriesFits(ub, positions)) {
          out.add(entity, "inflow bounds missing or of wrong length");
        } else {
          for (std::size_t t = 0; t < positions; ++t) {
            if (lb.at(t) > ub.at(t)) {
              out.add(entity, "inflow lower bound exceeds upper bound");
              break;
            }
          }
        }
      }
    }
  }
  if (scenario.flowDemand.size() != spec.fenceGroups.size()) {
    out.add("scenario", "flow demands do not match the fence groups");
  } else {
    for (std::size_t g = 0; g < spec.fenceGroups.size(); ++g) {
      if (scenario.flowDemand[g].empty() || !seriesFits(scenario.flowDemand[g], positions)) {
        out.add("scenario fence group '" + spec.fenceGroups[g].id + "'",
                "flow demand length does not match the grid");
      }
    }
  }
  const State& init = scenario.initialState;
  if (init.mode < 0 || static_cast<std::size_t>(init.mode) >= spec.modes.size()) {
    out.add("initial state", "operation mode is unknown");
  }
  if (init.pressure.size() != nodeCount || init.inflow.size() != nodeCount) {
    out.add("initial state", "does not cover every node");
  } else {
    for (std::size_t v = 0; v < nodeCount; ++v) {
      if (!(init.pressure[v] > 0.0)) {
        out.add("initial state", "pressure at node '" + spec.nodes[v].id + "' must be positive");
      }
    }
  }
  if (init.flowIn.size() != spec.arcs.size() || init.flowOut.size() != spec.arcs.size() ||
      init.regulatorModes.size() != spec.arcs.size()) {
    out.add("initial state", "does not cover every arc");
  }
}

}  // namespace

std::vector<Violation> validate(const StationSpec& spec, const Scenario& scenario) {
  ViolationList out;
  const std::size_t positions = std::max<std::size_t>(scenario.timeGrid.size(), 1);
  try {
    checkGasConstants(spec.gas);
  } catch (const std::invalid_argument& e) {
    out.add("gas", e.what());
  }
  checkNodes(spec, positions, out);
  checkArcs(spec, positions, out);
  checkModes(spec, out);
  checkDirections(spec, out);
  checkTransitions(spec, out);
  checkOutages(spec, out);
  checkScenario(spec, scenario, out);
  return out.take();
}

}  // namespace netstation
