#include "netstation/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "netstation/compressor_ranges.hpp"
#include "netstation/errors.hpp"
#include "netstation/units.hpp"

namespace netstation {

using nlohmann::json;

namespace {

// --- reading -------------------------------------------------------------------

/// Cursor into the document that remembers where it is for diagnostics.
class Field {
 public:
  Field(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& raw() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

  bool has(const char* key) const { return value_.is_object() && value_.contains(key); }

  Field operator[](const char* key) const {
    if (!value_.is_object()) fail("expected an object");
    if (!value_.contains(key)) throw SchemaError(path_ + "." + key, "missing field");
    return Field(value_.at(key), path_ + "." + key);
  }
  Field at(std::size_t i) const { return Field(value_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  std::size_t size() const { return value_.size(); }

  const json& array() const {
    if (!value_.is_array()) fail("expected an array");
    return value_;
  }
  const json& object() const {
    if (!value_.is_object()) fail("expected an object");
    return value_;
  }
  std::vector<Field> items() const {
    array();
    std::vector<Field> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(at(i));
    return out;
  }
  std::vector<std::pair<std::string, Field>> entries() const {
    object();
    std::vector<std::pair<std::string, Field>> out;
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      out.emplace_back(it.key(), Field(it.value(), path_ + "." + it.key()));
    }
    return out;
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    const double v = value_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  std::string string() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const Field& f : items()) out.push_back(f.string());
    return out;
  }
  /// A number broadcast over the grid, or one number per grid position.
  TimeSeries series(double scale) const {
    if (value_.is_number()) return TimeSeries(number() * scale);
    std::vector<double> values;
    for (const Field& f : items()) values.push_back(f.number() * scale);
    if (values.empty()) fail("empty series");
    return TimeSeries(std::move(values));
  }

 private:
  const json& value_;
  std::string path_;
};

double optionalNumber(const Field& f, const char* key, double fallback) {
  return f.has(key) ? f[key].number() : fallback;
}

int lookup(const StationSpec& spec, const std::string& id, const Field& where, bool node) {
  const int index = node ? spec.findNode(id) : spec.findArc(id);
  if (index < 0) where.fail(std::string("unknown ") + (node ? "node" : "arc") + " '" + id + "'");
  return index;
}

template <typename T>
int lookupId(const std::vector<T>& items, const std::string& id, const Field& where, const char* what) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return static_cast<int>(i);
  }
  where.fail(std::string("unknown ") + what + " '" + id + "'");
}

std::vector<int> nodeList(const StationSpec& spec, const Field& f) {
  std::vector<int> out;
  for (const Field& item : f.items()) out.push_back(lookup(spec, item.string(), item, true));
  return out;
}

ArcKind parseArcKind(const Field& f) {
  const std::string kind = f.string();
  if (kind == "pipe") return ArcKind::Pipe;
  if (kind == "resistor") return ArcKind::Resistor;
  if (kind == "valve") return ArcKind::Valve;
  if (kind == "regulator") return ArcKind::Regulator;
  if (kind == "compressorStation") return ArcKind::CompressorStation;
  f.fail("unknown arc kind '" + kind + "'");
}

std::string arcKindKey(ArcKind kind) {
  switch (kind) {
    case ArcKind::Pipe: return "pipe";
    case ArcKind::Resistor: return "resistor";
    case ArcKind::Valve: return "valve";
    case ArcKind::Regulator: return "regulator";
    case ArcKind::CompressorStation: return "compressorStation";
  }
  return "?";
}

RegulatorMode parseRegulatorMode(const Field& f) {
  const std::string m = f.string();
  if (m == "closed") return RegulatorMode::Closed;
  if (m == "bypass") return RegulatorMode::Bypass;
  if (m == "active") return RegulatorMode::Active;
  f.fail("unknown regulator mode '" + m + "'");
}

std::string regulatorModeKey(RegulatorMode m) {
  switch (m) {
    case RegulatorMode::Closed: return "closed";
    case RegulatorMode::Bypass: return "bypass";
    case RegulatorMode::Active: return "active";
  }
  return "?";
}

struct WeightField {
  const char* key;
  double ObjectiveWeights::*member;
};
constexpr WeightField kWeightFields[] = {
    {"pressureSlack", &ObjectiveWeights::pressureSlack},
    {"flowSlack", &ObjectiveWeights::flowSlack},
    {"modeChange", &ObjectiveWeights::modeChange},
    {"unitStart", &ObjectiveWeights::unitStart},
    {"regulatorModeChange", &ObjectiveWeights::regulatorModeChange},
    {"regulatorInlet", &ObjectiveWeights::regulatorInlet},
    {"regulatorOutlet", &ObjectiveWeights::regulatorOutlet},
    {"regulatorFlow", &ObjectiveWeights::regulatorFlow},
    {"stationInlet", &ObjectiveWeights::stationInlet},
    {"stationOutlet", &ObjectiveWeights::stationOutlet},
    {"stationFlow", &ObjectiveWeights::stationFlow},
};

// --- fixed valves ----------------------------------------------------------------

json mergeBound(const json& a, const json& b, bool lower) {
  auto pick = [lower](double x, double y) { return lower ? std::max(x, y) : std::min(x, y); };
  if (a.is_number() && b.is_number()) return pick(a.get<double>(), b.get<double>());
  const std::size_t n = std::max(a.is_array() ? a.size() : 1, b.is_array() ? b.size() : 1);
  json out = json::array();
  for (std::size_t t = 0; t < n; ++t) {
    const double x = a.is_array() ? a.at(t).get<double>() : a.get<double>();
    const double y = b.is_array() ? b.at(t).get<double>() : b.get<double>();
    out.push_back(pick(x, y));
  }
  return out;
}

/// Works on the raw document so every node and arc reference is rewritten
/// before indices exist.
ValveRewrite resolveFixedValves(json& doc) {
  ValveRewrite rewrite;
  if (!doc.contains("arcs") || !doc.contains("operationModes") || !doc["operationModes"].is_array() ||
      doc["operationModes"].empty()) {
    return rewrite;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    json& arcs = doc["arcs"];
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      json& arc = arcs[i];
      if (arc.value("kind", "") != "valve" || !arc.contains("id")) continue;
      const std::string id = arc["id"].get<std::string>();
      std::set<std::string> tokens;
      for (json& mode : doc["operationModes"]) {
        if (!mode.contains("assignment") || !mode["assignment"].contains(id)) {
          tokens.insert("?");
        } else {
          tokens.insert(mode["assignment"][id].get<std::string>());
        }
      }
      if (tokens.size() != 1 || (*tokens.begin() != "open" && *tokens.begin() != "closed")) continue;
      const std::string from = arc.value("from", "");
      const std::string to = arc.value("to", "");
      auto nodeOf = [&](const std::string& nid) -> json* {
        for (json& node : doc["nodes"]) {
          if (node.value("id", "") == nid) return &node;
        }
        return nullptr;
      };
      if (*tokens.begin() == "open") {
        json* a = nodeOf(from);
        json* b = nodeOf(to);
        if (!a || !b) continue;
        std::string removed, kept;
        if (b->value("kind", "inner") == "inner") {
          removed = to;
          kept = from;
        } else if (a->value("kind", "inner") == "inner") {
          removed = from;
          kept = to;
        } else {
          continue;  // both boundary: the valve stays in the model
        }
        json& keep = *nodeOf(kept);
        const json& gone = *nodeOf(removed);
        keep["pressureLB"] = mergeBound(keep["pressureLB"], gone["pressureLB"], true);
        keep["pressureUB"] = mergeBound(keep["pressureUB"], gone["pressureUB"], false);
        json nodes = json::array();
        for (json& node : doc["nodes"]) {
          if (node.value("id", "") != removed) nodes.push_back(node);
        }
        doc["nodes"] = nodes;
        for (json& other : doc["arcs"]) {
          if (other.value("from", "") == removed) other["from"] = kept;
          if (other.value("to", "") == removed) other["to"] = kept;
        }
        if (doc.contains("scenario") && doc["scenario"].contains("initialState")) {
          json& init = doc["scenario"]["initialState"];
          if (init.contains("pressure")) init["pressure"].erase(removed);
          if (init.contains("inflow")) init["inflow"].erase(removed);
        }
        rewrite.contractedNodes.emplace_back(removed, kept);
      }
      arcs.erase(arcs.begin() + static_cast<std::ptrdiff_t>(i));
      for (json& mode : doc["operationModes"]) mode["assignment"].erase(id);
      if (doc.contains("scenario") && doc["scenario"].contains("initialState") &&
          doc["scenario"]["initialState"].contains("flow")) {
        doc["scenario"]["initialState"]["flow"].erase(id);
      }
      rewrite.removedArcs.push_back(id);
      changed = true;
      break;
    }
  }
  return rewrite;
}

// --- entity parsing ----------------------------------------------------------------

GasConstants parseGas(const Field& f) {
  GasConstants gas;
  gas.specificGasConstant = f["specificGasConstant"].number();
  gas.temperature = f["temperature"].number();
  gas.pseudoCriticalPressureBar = f["pseudoCriticalPressure"].number();
  gas.pseudoCriticalTemperature = f["pseudoCriticalTemperature"].number();
  gas.normalDensity = f["normalDensity"].number();
  gas.isentropicExponent = optionalNumber(f, "isentropicExponent", gas.isentropicExponent);
  gas.gravity = optionalNumber(f, "gravity", gas.gravity);
  return gas;
}

void parseNodes(StationSpec& spec, const Field& f) {
  for (const Field& item : f.items()) {
    Node node;
    node.id = item["id"].string();
    const std::string kind = item["kind"].string();
    if (kind == "boundary") node.kind = NodeKind::Boundary;
    else if (kind == "inner") node.kind = NodeKind::Inner;
    else item["kind"].fail("node kind must be boundary or inner");
    node.pressureLB = item["pressureLB"].series(units::kPaPerBar);
    node.pressureUB = item["pressureUB"].series(units::kPaPerBar);
    if (item.has("exitPressureUB")) node.exitPressureUB = units::barToPa(item["exitPressureUB"].number());
    spec.nodes.push_back(std::move(node));
  }
}

void parseArcs(StationSpec& spec, const Field& f) {
  const double rho = spec.gas.normalDensity;
  const double flowScale = units::volumetricToMassFlow(1.0, rho);
  for (const Field& item : f.items()) {
    Arc arc;
    arc.id = item["id"].string();
    arc.from = lookup(spec, item["from"].string(), item["from"], true);
    arc.to = lookup(spec, item["to"].string(), item["to"], true);
    if (item.has("flowLB")) arc.flowLB = item["flowLB"].series(flowScale);
    if (item.has("flowUB")) arc.flowUB = item["flowUB"].series(flowScale);
    switch (parseArcKind(item["kind"])) {
      case ArcKind::Pipe: {
        PipeData pipe;
        pipe.length = item["length"].number();
        pipe.diameter = item["diameter"].number();
        pipe.roughness = item["roughness"].number();
        pipe.slope = optionalNumber(item, "slope", 0.0);
        arc.data = pipe;
        break;
      }
      case ArcKind::Resistor:
        arc.data = ResistorData{item["drag"].number(), item["diameter"].number()};
        break;
      case ArcKind::Valve: arc.data = ValveData{}; break;
      case ArcKind::Regulator: arc.data = RegulatorData{}; break;
      case ArcKind::CompressorStation: arc.data = CompressorStationData{}; break;
    }
    spec.arcs.push_back(std::move(arc));
  }
}

CompressorStationData& stationRef(StationSpec& spec, const Field& f) {
  const int a = lookup(spec, f.string(), f, false);
  if (spec.arcs[a].kind() != ArcKind::CompressorStation) f.fail("'" + f.string() + "' is not a compressor station");
  return spec.arcs[a].station();
}

void parseUnits(StationSpec& spec, const Field& f) {
  for (const Field& item : f.items()) {
    CompressorUnit unit;
    unit.id = item["id"].string();
    for (const Field& row : item["operatingRange"].items()) {
      if (row.size() != 3) row.fail("operating range rows have three coefficients");
      unit.operatingRange2D.push_back({row.at(0).number(), row.at(1).number(), row.at(2).number()});
    }
    unit.maxPressureIncrease = units::barToPa(item["maxPressureIncrease"].number());
    unit.maxPower = item["maxPower"].number() * 1000.0;
    unit.efficiency = item["efficiency"].number();
    stationRef(spec, item["station"]).units.push_back(std::move(unit));
  }
}

void parseConfigurations(StationSpec& spec, const Field& f) {
  for (const Field& item : f.items()) {
    CompressorStationData& station = stationRef(spec, item["station"]);
    Configuration config;
    config.id = item["id"].string();
    if (config.id == "open" || config.id == "closed" || config.id == "bypass") {
      item["id"].fail("configuration id collides with a mode keyword");
    }
    for (const Field& stage : item["stages"].items()) {
      std::vector<int> members;
      for (const Field& u : stage.items()) members.push_back(lookupId(station.units, u.string(), u, "unit"));
      config.stages.push_back(std::move(members));
    }
    if (item.has("facets")) {
      for (const Field& row : item["facets"].items()) {
        if (row.size() != 4) row.fail("facets have four coefficients (w, x, y, z)");
        config.facets.push_back({row.at(0).number(), row.at(1).number(), row.at(2).number(), row.at(3).number()});
      }
    }
    station.configurations.push_back(std::move(config));
  }
}

void parseModes(StationSpec& spec, const Field& f) {
  for (const Field& item : f.items()) {
    OperationMode mode;
    mode.id = item["id"].string();
    mode.assignment.assign(spec.arcs.size(), std::nullopt);
    for (const auto& [arcId, value] : item["assignment"].entries()) {
      const int a = lookup(spec, arcId, value, false);
      const std::string token = value.string();
      if (token == "open") mode.assignment[a] = ModeToken::open();
      else if (token == "closed") mode.assignment[a] = ModeToken::closed();
      else if (token == "bypass") mode.assignment[a] = ModeToken::bypass();
      else if (spec.arcs[a].kind() == ArcKind::CompressorStation) {
        mode.assignment[a] = ModeToken::active(
            lookupId(spec.arcs[a].station().configurations, token, value, "configuration"));
      } else {
        value.fail("unknown token '" + token + "'");
      }
    }
    spec.modes.push_back(std::move(mode));
  }
}

void parseDirections(StationSpec& spec, const Field& doc) {
  for (const Field& item : doc["flowDirections"].items()) {
    FlowDirection dir;
    dir.id = item["id"].string();
    dir.inflowNodes = nodeList(spec, item["inflow"]);
    dir.outflowNodes = nodeList(spec, item["outflow"]);
    spec.directions.push_back(std::move(dir));
  }
  for (const Field& pair : doc["validPairs"].items()) {
    if (pair.size() != 2) pair.fail("valid pairs are [mode, direction]");
    spec.validPairs.emplace_back(lookupId(spec.modes, pair.at(0).string(), pair.at(0), "operation mode"),
                                 lookupId(spec.directions, pair.at(1).string(), pair.at(1), "flow direction"));
  }
  for (const Field& item : doc["fenceGroups"].items()) {
    spec.fenceGroups.push_back({item["id"].string(), nodeList(spec, item["nodes"])});
  }
  if (doc.has("flowConditions")) {
    for (const Field& item : doc["flowConditions"].items()) {
      FlowCondition condition;
      condition.direction = lookupId(spec.directions, item["direction"].string(), item["direction"],
                                     "flow direction");
      condition.firstNodes = nodeList(spec, item["first"]);
      condition.secondNodes = nodeList(spec, item["second"]);
      spec.flowConditions.push_back(std::move(condition));
    }
  }
}

void parseTransitions(StationSpec& spec, const Field& f) {
  const std::size_t n = spec.modes.size();
  spec.transitionTimes.assign(n, std::vector<double>(n, 0.0));
  f.object();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& from = spec.modes[i].id;
    if (!f.has(from.c_str())) {
      throw SchemaError(f.path() + "." + from, "missing transition times for mode '" + from + "'");
    }
    const Field row = f[from.c_str()];
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& to = spec.modes[j].id;
      if (row.has(to.c_str())) {
        spec.transitionTimes[i][j] = units::minutesToSeconds(row[to.c_str()].number());
      } else if (i != j) {
        throw SchemaError(row.path() + "." + to, "missing transition time");
      }
    }
  }
}

void parseOutages(StationSpec& spec, const Field& f) {
  for (const Field& item : f.items()) {
    UnitOutage outage;
    outage.arc = lookup(spec, item["station"].string(), item["station"], false);
    if (spec.arcs[outage.arc].kind() != ArcKind::CompressorStation) item["station"].fail("not a compressor station");
    outage.unit = lookupId(spec.arcs[outage.arc].station().units, item["unit"].string(), item["unit"], "unit");
    outage.start = units::minutesToSeconds(item["start"].number());
    outage.end = units::minutesToSeconds(item["end"].number());
    spec.outages.push_back(outage);
  }
}

Scenario parseScenario(const StationSpec& spec, const Field& f) {
  const double flowScale = units::volumetricToMassFlow(1.0, spec.gas.normalDensity);
  Scenario scen;
  for (const Field& t : f["timeGrid"].items()) scen.timeGrid.push_back(units::minutesToSeconds(t.number()));
  const std::size_t nodes = spec.nodes.size();
  scen.pressureDemand.resize(nodes);
  scen.inflowLB.assign(nodes, TimeSeries(0.0));
  scen.inflowUB.assign(nodes, TimeSeries(0.0));
  if (f.has("pressureDemand")) {
    for (const auto& [id, value] : f["pressureDemand"].entries()) {
      scen.pressureDemand[lookup(spec, id, value, true)] = value.series(units::kPaPerBar);
    }
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    if (spec.nodes[v].kind == NodeKind::Boundary) scen.inflowLB[v] = scen.inflowUB[v] = TimeSeries();
  }
  for (const auto& [id, value] : f["inflowBounds"].entries()) {
    const int v = lookup(spec, id, value, true);
    scen.inflowLB[v] = value["lower"].series(flowScale);
    scen.inflowUB[v] = value["upper"].series(flowScale);
  }
  scen.flowDemand.resize(spec.fenceGroups.size());
  for (const auto& [id, value] : f["flowDemand"].entries()) {
    scen.flowDemand[lookupId(spec.fenceGroups, id, value, "fence group")] = value.series(flowScale);
  }

  const Field init = f["initialState"];
  State& s = scen.initialState;
  s.mode = lookupId(spec.modes, init["mode"].string(), init["mode"], "operation mode");
  s.pressure.assign(nodes, 0.0);
  s.inflow.assign(nodes, 0.0);
  for (const auto& [id, value] : init["pressure"].entries()) {
    s.pressure[lookup(spec, id, value, true)] = units::barToPa(value.number());
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    if (s.pressure[v] == 0.0) throw SchemaError(init.path() + ".pressure." + spec.nodes[v].id, "missing field");
  }
  if (init.has("inflow")) {
    for (const auto& [id, value] : init["inflow"].entries()) {
      s.inflow[lookup(spec, id, value, true)] = value.number() * flowScale;
    }
  }
  s.flowIn.assign(spec.arcs.size(), 0.0);
  s.flowOut.assign(spec.arcs.size(), 0.0);
  s.regulatorModes.assign(spec.arcs.size(), RegulatorMode::Closed);
  if (init.has("flow")) {
    for (const auto& [id, value] : init["flow"].entries()) {
      const int a = lookup(spec, id, value, false);
      if (value.raw().is_object()) {
        s.flowIn[a] = value["in"].number() * flowScale;
        s.flowOut[a] = value["out"].number() * flowScale;
      } else {
        s.flowIn[a] = s.flowOut[a] = value.number() * flowScale;
      }
    }
  }
  if (init.has("regulatorModes")) {
    for (const auto& [id, value] : init["regulatorModes"].entries()) {
      s.regulatorModes[lookup(spec, id, value, false)] = parseRegulatorMode(value);
    }
  }
  return scen;
}

ObjectiveWeights parseWeights(const Field& f) {
  ObjectiveWeights w;
  for (const auto& [key, value] : f.entries()) {
    bool known = false;
    for (const WeightField& field : kWeightFields) {
      if (key == field.key) {
        w.*field.member = value.number();
        known = true;
      }
    }
    if (!known) value.fail("unknown weight");
  }
  return w;
}

// --- writing -------------------------------------------------------------------

json seriesJson(const TimeSeries& s, double scale) {
  if (s.isConstant()) return s.at(0) / scale;
  json out = json::array();
  for (double v : s.values()) out.push_back(v / scale);
  return out;
}

}  // namespace

Instance parseInstance(const json& input) {
  json doc = input;
  ValveRewrite rewrite = resolveFixedValves(doc);
  const Field root(doc, "$");
  Instance instance;
  StationSpec& spec = instance.spec;
  spec.name = root["name"].string();
  spec.gas = parseGas(root["gas"]);
  if (!(spec.gas.normalDensity > 0.0)) root["gas"]["normalDensity"].fail("must be positive");
  parseNodes(spec, root["nodes"]);
  parseArcs(spec, root["arcs"]);
  if (root.has("units")) parseUnits(spec, root["units"]);
  if (root.has("configurations")) parseConfigurations(spec, root["configurations"]);
  parseModes(spec, root["operationModes"]);
  parseDirections(spec, root);
  parseTransitions(spec, root["transitionTimes"]);
  if (root.has("unavailability")) parseOutages(spec, root["unavailability"]);
  instance.scenario = parseScenario(spec, root["scenario"]);
  if (root.has("weights")) instance.weights = parseWeights(root["weights"]);

  if (root.has("rewrite")) {
    const Field r = root["rewrite"];
    ValveRewrite earlier;
    for (const Field& pair : r["contractedNodes"].items()) {
      earlier.contractedNodes.emplace_back(pair.at(0).string(), pair.at(1).string());
    }
    earlier.removedArcs = r["removedArcs"].strings();
    earlier.contractedNodes.insert(earlier.contractedNodes.end(), rewrite.contractedNodes.begin(),
                                   rewrite.contractedNodes.end());
    earlier.removedArcs.insert(earlier.removedArcs.end(), rewrite.removedArcs.begin(),
                               rewrite.removedArcs.end());
    rewrite = std::move(earlier);
  }
  spec.rewrite = std::move(rewrite);

  std::vector<Violation> problems = validate(spec, instance.scenario);
  for (const Violation& v : checkWeights(instance.weights)) problems.push_back(v);
  if (!problems.empty()) {
    std::ostringstream text;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      text << (i ? "; " : "") << problems[i].entity << ": " << problems[i].rule;
    }
    throw SchemaError(problems.front().entity, text.str());
  }

  for (int a : spec.arcsOfKind(ArcKind::CompressorStation)) {
    const double inlet = instance.scenario.initialState.pressure[spec.arcs[a].from];
    for (CompressorUnit& unit : spec.arcs[a].station().units) {
      unit.inletZ = papayZ(units::paToBar(inlet), spec.gas).z;
    }
  }
  return instance;
}

Instance loadInstance(const std::filesystem::path& path) { return parseInstance(readJson(path)); }

json instanceToJson(const Instance& instance) {
  const StationSpec& spec = instance.spec;
  const Scenario& scen = instance.scenario;
  const double flowScale = units::volumetricToMassFlow(1.0, spec.gas.normalDensity);
  const double pa = units::kPaPerBar;
  json doc;
  doc["name"] = spec.name;
  doc["gas"] = {{"specificGasConstant", spec.gas.specificGasConstant},
                {"temperature", spec.gas.temperature},
                {"pseudoCriticalPressure", spec.gas.pseudoCriticalPressureBar},
                {"pseudoCriticalTemperature", spec.gas.pseudoCriticalTemperature},
                {"normalDensity", spec.gas.normalDensity},
                {"isentropicExponent", spec.gas.isentropicExponent},
                {"gravity", spec.gas.gravity}};
  json nodes = json::array();
  for (const Node& node : spec.nodes) {
    json n = {{"id", node.id},
              {"kind", node.kind == NodeKind::Boundary ? "boundary" : "inner"},
              {"pressureLB", seriesJson(node.pressureLB, pa)},
              {"pressureUB", seriesJson(node.pressureUB, pa)}};
    if (node.exitPressureUB) n["exitPressureUB"] = *node.exitPressureUB / pa;
    nodes.push_back(std::move(n));
  }
  doc["nodes"] = std::move(nodes);

  json arcs = json::array();
  json unitsDoc = json::array();
  json configs = json::array();
  for (const Arc& arc : spec.arcs) {
    json a = {{"id", arc.id},
              {"kind", arcKindKey(arc.kind())},
              {"from", spec.nodes[arc.from].id},
              {"to", spec.nodes[arc.to].id}};
    if (!arc.flowLB.empty()) a["flowLB"] = seriesJson(arc.flowLB, flowScale);
    if (!arc.flowUB.empty()) a["flowUB"] = seriesJson(arc.flowUB, flowScale);
    switch (arc.kind()) {
      case ArcKind::Pipe:
        a["length"] = arc.pipe().length;
        a["diameter"] = arc.pipe().diameter;
        a["roughness"] = arc.pipe().roughness;
        a["slope"] = arc.pipe().slope;
        break;
      case ArcKind::Resistor:
        a["drag"] = arc.resistor().drag;
        a["diameter"] = arc.resistor().diameter;
        break;
      case ArcKind::CompressorStation:
        for (const CompressorUnit& unit : arc.station().units) {
          json rows = json::array();
          for (const auto& r : unit.operatingRange2D) rows.push_back({r[0], r[1], r[2]});
          unitsDoc.push_back({{"id", unit.id},
                              {"station", arc.id},
                              {"operatingRange", rows},
                              {"maxPressureIncrease", unit.maxPressureIncrease / pa},
                              {"maxPower", unit.maxPower / 1000.0},
                              {"efficiency", unit.efficiency}});
        }
        for (const Configuration& config : arc.station().configurations) {
          json stages = json::array();
          for (const auto& stage : config.stages) {
            json members = json::array();
            for (int u : stage) members.push_back(arc.station().units[u].id);
            stages.push_back(members);
          }
          json c = {{"id", config.id}, {"station", arc.id}, {"stages", stages}};
          if (!config.facets.empty()) {
            json facets = json::array();
            for (const auto& h : config.facets) facets.push_back({h.w, h.x, h.y, h.z});
            c["facets"] = facets;
          }
          configs.push_back(std::move(c));
        }
        break;
      default:
        break;
    }
    arcs.push_back(std::move(a));
  }
  doc["arcs"] = std::move(arcs);
  doc["units"] = std::move(unitsDoc);
  doc["configurations"] = std::move(configs);

  json modes = json::array();
  for (const OperationMode& mode : spec.modes) {
    json assignment = json::object();
    for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
      const auto& token = mode.assignment[a];
      if (!token) continue;
      switch (token->kind) {
        case ModeToken::Kind::Open: assignment[spec.arcs[a].id] = "open"; break;
        case ModeToken::Kind::Closed: assignment[spec.arcs[a].id] = "closed"; break;
        case ModeToken::Kind::Bypass: assignment[spec.arcs[a].id] = "bypass"; break;
        case ModeToken::Kind::Active:
          assignment[spec.arcs[a].id] = spec.arcs[a].station().configurations[token->configuration].id;
          break;
      }
    }
    modes.push_back({{"id", mode.id}, {"assignment", assignment}});
  }
  doc["operationModes"] = std::move(modes);

  auto ids = [&](const std::vector<int>& nodesIdx) {
    json out = json::array();
    for (int v : nodesIdx) out.push_back(spec.nodes[v].id);
    return out;
  };
  json directions = json::array();
  for (const FlowDirection& dir : spec.directions) {
    directions.push_back({{"id", dir.id}, {"inflow", ids(dir.inflowNodes)}, {"outflow", ids(dir.outflowNodes)}});
  }
  doc["flowDirections"] = std::move(directions);
  json pairs = json::array();
  for (const auto& [o, f] : spec.validPairs) pairs.push_back({spec.modes[o].id, spec.directions[f].id});
  doc["validPairs"] = std::move(pairs);
  json groups = json::array();
  for (const FenceGroup& g : spec.fenceGroups) groups.push_back({{"id", g.id}, {"nodes", ids(g.nodes)}});
  doc["fenceGroups"] = std::move(groups);
  json conditions = json::array();
  for (const FlowCondition& c : spec.flowConditions) {
    conditions.push_back({{"direction", spec.directions[c.direction].id},
                          {"first", ids(c.firstNodes)},
                          {"second", ids(c.secondNodes)}});
  }
  doc["flowConditions"] = std::move(conditions);
  json theta = json::object();
  for (std::size_t i = 0; i < spec.modes.size(); ++i) {
    json row = json::object();
    for (std::size_t j = 0; j < spec.modes.size(); ++j) {
      row[spec.modes[j].id] = units::secondsToMinutes(spec.transitionTimes[i][j]);
    }
    theta[spec.modes[i].id] = row;
  }
  doc["transitionTimes"] = std::move(theta);
  json outages = json::array();
  for (const UnitOutage& o : spec.outages) {
    outages.push_back({{"station", spec.arcs[o.arc].id},
                       {"unit", spec.arcs[o.arc].station().units[o.unit].id},
                       {"start", units::secondsToMinutes(o.start)},
                       {"end", units::secondsToMinutes(o.end)}});
  }
  doc["unavailability"] = std::move(outages);
  if (!spec.rewrite.empty()) {
    json contracted = json::array();
    for (const auto& [gone, kept] : spec.rewrite.contractedNodes) contracted.push_back({gone, kept});
    doc["rewrite"] = {{"contractedNodes", contracted}, {"removedArcs", spec.rewrite.removedArcs}};
  }

  json s;
  json grid = json::array();
  for (double t : scen.timeGrid) grid.push_back(units::secondsToMinutes(t));
  s["timeGrid"] = grid;
  json pressure = json::object();
  json bounds = json::object();
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    if (!scen.pressureDemand[v].empty()) pressure[spec.nodes[v].id] = seriesJson(scen.pressureDemand[v], pa);
    if (spec.nodes[v].kind == NodeKind::Boundary) {
      bounds[spec.nodes[v].id] = {{"lower", seriesJson(scen.inflowLB[v], flowScale)},
                                  {"upper", seriesJson(scen.inflowUB[v], flowScale)}};
    }
  }
  s["pressureDemand"] = pressure;
  s["inflowBounds"] = bounds;
  json flow = json::object();
  for (std::size_t g = 0; g < spec.fenceGroups.size(); ++g) {
    flow[spec.fenceGroups[g].id] = seriesJson(scen.flowDemand[g], flowScale);
  }
  s["flowDemand"] = flow;
  const State& init = scen.initialState;
  json initDoc;
  initDoc["mode"] = spec.modes[init.mode].id;
  json ip = json::object(), id = json::object(), fl = json::object(), rg = json::object();
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    ip[spec.nodes[v].id] = init.pressure[v] / pa;
    if (spec.nodes[v].kind == NodeKind::Boundary) id[spec.nodes[v].id] = init.inflow[v] / flowScale;
  }
  for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
    if (init.flowIn[a] == init.flowOut[a]) {
      fl[spec.arcs[a].id] = init.flowIn[a] / flowScale;
    } else {
      fl[spec.arcs[a].id] = {{"in", init.flowIn[a] / flowScale}, {"out", init.flowOut[a] / flowScale}};
    }
    if (spec.arcs[a].kind() == ArcKind::Regulator) rg[spec.arcs[a].id] = regulatorModeKey(init.regulatorModes[a]);
  }
  initDoc["pressure"] = ip;
  initDoc["inflow"] = id;
  initDoc["flow"] = fl;
  initDoc["regulatorModes"] = rg;
  s["initialState"] = initDoc;
  doc["scenario"] = std::move(s);

  json weights = json::object();
  for (const WeightField& field : kWeightFields) weights[field.key] = instance.weights.*field.member;
  doc["weights"] = std::move(weights);
  return doc;
}

bool operator==(const Instance& a, const Instance& b) { return instanceToJson(a) == instanceToJson(b); }

void saveInstance(const Instance& instance, const std::filesystem::path& path) {
  writeJson(instanceToJson(instance), path);
}

// --- time grids ----------------------------------------------------------------

std::size_t TimeGridTemplate::steps() const {
  std::size_t n = 0;
  for (const auto& [count, minutes] : runs) n += static_cast<std::size_t>(count);
  return n;
}

std::vector<double> TimeGridTemplate::grid() const {
  std::vector<double> out{0.0};
  double minutes = 0.0;
  for (const auto& [count, length] : runs) {
    for (int i = 0; i < count; ++i) {
      minutes += length;
      out.push_back(units::minutesToSeconds(minutes));
    }
  }
  return out;
}

TimeGridTemplate timeGridTemplate(int steps) {
  switch (steps) {
    case 12: return {"12", {{4, 15.0}, {5, 60.0}, {3, 120.0}}};
    case 24: return {"24", {{4, 15.0}, {18, 30.0}, {2, 60.0}}};
    case 48: return {"48", {{48, 15.0}}};
    case 96: return {"96", {{96, 7.5}}};
    default: break;
  }
  throw std::invalid_argument("no time grid template with " + std::to_string(steps) + " steps");
}

double interpolate(const std::vector<double>& grid, const std::vector<double>& values, double at) {
  if (grid.size() != values.size() || grid.empty()) {
    throw std::invalid_argument("interpolation needs one value per grid point");
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(grid.back()));
  if (at < grid.front() - slack || at > grid.back() + slack) {
    throw std::out_of_range("instant outside the source grid");
  }
  const auto upper = std::lower_bound(grid.begin(), grid.end(), at);
  if (upper == grid.begin()) return values.front();
  if (upper == grid.end()) return values.back();
  const std::size_t j = static_cast<std::size_t>(upper - grid.begin());
  if (*upper == at) return values[j];
  const double w = (at - grid[j - 1]) / (grid[j] - grid[j - 1]);
  return values[j - 1] + w * (values[j] - values[j - 1]);
}

namespace {

TimeSeries resample(const TimeSeries& s, const std::vector<double>& source,
                    const std::vector<double>& target) {
  if (s.empty() || s.isConstant()) return s;
  std::vector<double> out;
  out.reserve(target.size());
  for (double t : target) out.push_back(interpolate(source, s.values(), t));
  return TimeSeries(std::move(out));
}

}  // namespace

Scenario interpolateScenario(const Scenario& raw, const std::vector<double>& target) {
  if (target.empty() || target.front() != 0.0) throw std::invalid_argument("target grid must start at 0");
  Scenario out = raw;
  out.timeGrid = target;
  auto apply = [&](std::vector<TimeSeries>& list) {
    for (TimeSeries& s : list) s = resample(s, raw.timeGrid, target);
  };
  apply(out.pressureDemand);
  apply(out.flowDemand);
  apply(out.inflowLB);
  apply(out.inflowUB);
  return out;
}

Instance retime(const Instance& instance, const std::vector<double>& target) {
  Instance out = instance;
  const auto& source = instance.scenario.timeGrid;
  out.scenario = interpolateScenario(instance.scenario, target);
  for (Node& node : out.spec.nodes) {
    node.pressureLB = resample(node.pressureLB, source, target);
    node.pressureUB = resample(node.pressureUB, source, target);
  }
  for (Arc& arc : out.spec.arcs) {
    arc.flowLB = resample(arc.flowLB, source, target);
    arc.flowUB = resample(arc.flowUB, source, target);
  }
  return out;
}

// --- range cache ----------------------------------------------------------------

json rangesToJson(const StationSpec& spec, std::size_t samples) {
  json stations = json::object();
  for (int a : spec.arcsOfKind(ArcKind::CompressorStation)) {
    json configs = json::object();
    for (const Configuration& config : spec.arcs[a].station().configurations) {
      json facets = json::array();
      for (const auto& h : config.facets) facets.push_back({h.w, h.x, h.y, h.z});
      configs[config.id] = facets;
    }
    stations[spec.arcs[a].id] = {{"hash", rangeInputHash(spec, a, samples)}, {"configurations", configs}};
  }
  return {{"samples", samples}, {"stations", stations}};
}

std::vector<std::string> applyRanges(StationSpec& spec, const json& cache, std::size_t samples) {
  std::vector<std::string> missing;
  const bool sameSamples = cache.value("samples", std::size_t{0}) == samples;
  const json stations = cache.value("stations", json::object());
  for (int a : spec.arcsOfKind(ArcKind::CompressorStation)) {
    Arc& arc = spec.arcs[a];
    const auto it = stations.find(arc.id);
    if (!sameSamples || it == stations.end() ||
        it->value("hash", std::string()) != rangeInputHash(spec, a, samples)) {
      missing.push_back(arc.id);
      continue;
    }
    const json& configs = (*it)["configurations"];
    for (Configuration& config : arc.station().configurations) {
      config.facets.clear();
      if (!configs.contains(config.id)) continue;
      for (const json& row : configs[config.id]) {
        config.facets.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                                 row[3].get<double>()});
      }
    }
  }
  return missing;
}

std::filesystem::path rangeCachePath(const std::filesystem::path& instancePath) {
  std::filesystem::path out = instancePath;
  out.replace_extension(".ranges.json");
  return out;
}

json readJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string(), e.what());
  }
}

void writeJson(const json& document, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NetstationError("cannot write " + path.string());
  out << document.dump(2) << '\n';
}

}  // namespace netstation
