#include "netstation/model_builder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netstation/errors.hpp"
#include "netstation/units.hpp"

namespace netstation {

namespace {

constexpr double kPa = units::kPaPerBar;

Quantity zero() { return Quantity::constant(0.0); }
Quantity flag(bool on) { return Quantity::constant(on ? 1.0 : 0.0); }

bool allConstant(const std::vector<Quantity>& values) {
  return std::none_of(values.begin(), values.end(), [](Quantity q) { return q.isVariable(); });
}

}  // namespace

std::vector<Violation> checkWeights(const ObjectiveWeights& w) {
  std::vector<Violation> out;
  const std::pair<const char*, double> entries[] = {
      {"pressureSlack", w.pressureSlack},   {"flowSlack", w.flowSlack},
      {"modeChange", w.modeChange},         {"unitStart", w.unitStart},
      {"regulatorModeChange", w.regulatorModeChange},
      {"regulatorInlet", w.regulatorInlet}, {"regulatorOutlet", w.regulatorOutlet},
      {"regulatorFlow", w.regulatorFlow},   {"stationInlet", w.stationInlet},
      {"stationOutlet", w.stationOutlet},   {"stationFlow", w.stationFlow},
  };
  for (const auto& [name, value] : entries) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      out.push_back({std::string("weight ") + name, "must be positive"});
    }
  }
  return out;
}

ModelWeights toModelUnits(const ObjectiveWeights& w, double normalDensity) {
  const double perKgPerSecond = units::massFlowToVolumetric(1.0, normalDensity);
  ModelWeights m{};
  m.pressureSlack = w.pressureSlack / units::kSecondsPerHour;
  m.flowSlack = w.flowSlack / (1000.0 * normalDensity);
  m.modeChange = w.modeChange;
  m.unitStart = w.unitStart;
  m.regulatorModeChange = w.regulatorModeChange;
  m.regulatorInlet = w.regulatorInlet;
  m.regulatorOutlet = w.regulatorOutlet;
  m.regulatorFlow = w.regulatorFlow * perKgPerSecond;
  m.stationInlet = w.stationInlet;
  m.stationOutlet = w.stationOutlet;
  m.stationFlow = w.stationFlow * perKgPerSecond;
  return m;
}

std::vector<ArcLinearization> linearizationConstants(const StationSpec& spec, const State& initial) {
  std::vector<ArcLinearization> out(spec.arcs.size());
  for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
    const Arc& arc = spec.arcs[a];
    const double pl = initial.pressure.at(arc.from);
    const double pr = initial.pressure.at(arc.to);
    ArcLinearization& lin = out[a];
    if (arc.kind() == ArcKind::Pipe) {
      const PipeData& pipe = arc.pipe();
      lin.z = pipeZ(pl, pr, spec.gas);
      lin.friction = nikuradseFriction(pipe.diameter, pipe.roughness);
      lin.area = crossSectionArea(pipe.diameter);
      lin.velocityIn = pipeVelocityConstant(pl, initial.flowIn.at(a), lin.area, lin.z, spec.gas);
      lin.velocityOut = pipeVelocityConstant(pr, initial.flowOut.at(a), lin.area, lin.z, spec.gas);
    } else if (arc.kind() == ArcKind::Resistor) {
      lin.z = pipeZ(pl, pr, spec.gas);
      lin.area = crossSectionArea(arc.resistor().diameter);
      lin.velocity =
          resistorVelocityConstant(pl, pr, initial.flowIn.at(a), lin.area, lin.z, spec.gas);
    }
  }
  return out;
}

StationProblem::StationProblem(StationSpec spec, Scenario scenario, ObjectiveWeights weights)
    : spec_(std::move(spec)), scenario_(std::move(scenario)), weights_(weights) {
  modelWeights_ = toModelUnits(weights_, spec_.gas.normalDensity);
  linearization_ = linearizationConstants(spec_, scenario_.initialState);
  available_.resize(scenario_.positions());
  for (std::size_t t = 0; t < scenario_.positions(); ++t) {
    for (std::size_t o = 0; o < spec_.modes.size(); ++o) {
      available_[t].push_back(modeAvailable(spec_, scenario_.timeGrid, static_cast<int>(o), t));
    }
  }
}

StationProblem StationProblem::withSlackScale(double factor) const {
  StationProblem copy = *this;
  copy.weights_.pressureSlack *= factor;
  copy.weights_.flowSlack *= factor;
  copy.modelWeights_ = toModelUnits(copy.weights_, spec_.gas.normalDensity);
  return copy;
}

// ---------------------------------------------------------------------------

ModelAssembler::ModelAssembler(const StationProblem& problem, Variant variant, std::string name)
    : problem_(problem), variant_(variant), builder_(variant, std::move(name)) {
  double total = 0.0;
  const auto& scen = problem_.scenario();
  for (std::size_t v = 0; v < problem_.spec().nodes.size(); ++v) {
    if (problem_.spec().nodes[v].kind != NodeKind::Boundary) continue;
    double peak = 0.0;
    for (double x : scen.inflowLB[v].values()) peak = std::max(peak, std::abs(x));
    for (double x : scen.inflowUB[v].values()) peak = std::max(peak, std::abs(x));
    total += peak;
  }
  flowCap_ = 2.0 * total + 1.0;
}

Quantity ModelAssembler::variable(std::string name, double lower, double upper, VarType type,
                                  VariableRole role, CostCategory category) {
  const Quantity q = builder_.addVariable(std::move(name), lower, upper, type, category);
  builder_.setRole(q, role);
  return q;
}

std::string ModelAssembler::tag(std::string_view family, std::string_view entity,
                                std::size_t time) const {
  std::string out(family);
  if (!entity.empty()) {
    out += '.';
    out += entity;
  }
  out += '.';
  out += std::to_string(time);
  return out;
}

double ModelAssembler::pressureLB(int node, std::size_t t) const {
  return problem_.spec().nodes[node].pressureLB.at(t) / kPa;
}
double ModelAssembler::pressureUB(int node, std::size_t t) const {
  return problem_.spec().nodes[node].pressureUB.at(t) / kPa;
}

double ModelAssembler::flowLB(int arc, std::size_t t) const {
  const Arc& a = problem_.spec().arcs[arc];
  return a.flowLB.empty() ? -flowCap_ : a.flowLB.at(t);
}
double ModelAssembler::flowUB(int arc, std::size_t t) const {
  const Arc& a = problem_.spec().arcs[arc];
  return a.flowUB.empty() ? flowCap_ : a.flowUB.at(t);
}

double ModelAssembler::stepLength(std::size_t t) const {
  return problem_.scenario().stepLength(t);
}

namespace {

// Station copies and valve/CS switches implied by one fixed mode.
void applyModeSwitches(const StationSpec& spec, int mode, TimeSlice& slice) {
  for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
    const Arc& arc = spec.arcs[a];
    if (arc.kind() == ArcKind::Valve) {
      slice.valveOpen[a] = flag(modeOf(spec, mode, static_cast<int>(a)).kind == ModeToken::Kind::Open);
    } else if (arc.kind() == ArcKind::CompressorStation) {
      const StationSetting s = stationSetting(spec, mode, static_cast<int>(a));
      StationCopies& copies = slice.stations[a];
      copies.bypass = flag(s.bypass);
      copies.closed = flag(s.closed);
      const auto n = arc.station().configurations.size();
      copies.config.assign(n, zero());
      copies.configInlet.assign(n, zero());
      copies.configOutlet.assign(n, zero());
      copies.configFlow.assign(n, zero());
      if (s.configuration >= 0) copies.config[s.configuration] = flag(true);
    }
  }
}

TimeSlice emptySlice(const StationSpec& spec, std::size_t time) {
  TimeSlice slice;
  slice.time = time;
  slice.pressure.assign(spec.nodes.size(), zero());
  slice.inflow.assign(spec.nodes.size(), zero());
  slice.flowIn.assign(spec.arcs.size(), zero());
  slice.flowOut.assign(spec.arcs.size(), zero());
  slice.stations.resize(spec.arcs.size());
  slice.valveOpen.assign(spec.arcs.size(), zero());
  slice.regulators.resize(spec.arcs.size());
  slice.mode.assign(spec.modes.size(), zero());
  slice.direction.assign(spec.directions.size(), zero());
  return slice;
}

}  // namespace

const TimeSlice& ModelAssembler::addModeSlice(int mode, std::size_t time) {
  const StationSpec& spec = problem_.spec();
  TimeSlice slice = emptySlice(spec, time);
  slice.fixed = true;
  slice.mode[mode] = flag(true);
  applyModeSwitches(spec, mode, slice);
  slices_.push_back(std::move(slice));
  return slices_.back();
}

const TimeSlice& ModelAssembler::addFixedSlice(const State& state, std::size_t time) {
  const StationSpec& spec = problem_.spec();
  TimeSlice slice = emptySlice(spec, time);
  slice.fixed = true;
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
    slice.pressure[v] = Quantity::constant(state.pressure.at(v) / kPa);
    slice.inflow[v] = Quantity::constant(state.inflow.at(v));
  }
  for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
    slice.flowIn[a] = Quantity::constant(state.flowIn.at(a));
    slice.flowOut[a] = Quantity::constant(spec.arcs[a].kind() == ArcKind::Pipe ? state.flowOut.at(a)
                                                                              : state.flowIn.at(a));
    if (spec.arcs[a].kind() == ArcKind::Regulator) {
      const RegulatorMode m = state.regulatorModes.at(a);
      slice.regulators[a] = {flag(m == RegulatorMode::Closed), flag(m == RegulatorMode::Bypass),
                             flag(m == RegulatorMode::Active)};
    }
  }
  slice.mode[state.mode] = flag(true);
  if (state.direction >= 0) slice.direction[state.direction] = flag(true);
  applyModeSwitches(spec, state.mode, slice);
  slices_.push_back(std::move(slice));
  return slices_.back();
}

const TimeSlice& ModelAssembler::addVariableSlice(std::size_t t, const SliceModes& modes,
                                                  bool stationary) {
  const StationSpec& spec = problem_.spec();
  const Scenario& scen = problem_.scenario();
  TimeSlice slice = emptySlice(spec, t);
  using R = RoleKind;
  using VT = VarType;

  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const int v = static_cast<int>(i);
    const Node& node = spec.nodes[i];
    slice.pressure[i] = variable(tag("p", node.id, t), pressureLB(v, t), pressureUB(v, t),
                                 VT::Continuous, {R::Pressure, v, -1, static_cast<int>(t)});
    if (node.kind == NodeKind::Boundary) {
      slice.inflow[i] = variable(tag("d", node.id, t), std::min(0.0, scen.inflowLB[i].at(t)),
                                 std::max(0.0, scen.inflowUB[i].at(t)), VT::Continuous,
                                 {R::Inflow, v, -1, static_cast<int>(t)});
    }
  }

  // Operation mode and flow direction selection.
  bool anySelectable = false;
  for (std::size_t o = 0; o < spec.modes.size(); ++o) {
    const int mode = static_cast<int>(o);
    const bool candidate =
        std::find(modes.candidates.begin(), modes.candidates.end(), mode) != modes.candidates.end();
    if (!candidate || !problem_.available(mode, t)) {
      if (modes.pinned) {
        slice.mode[o] = variable(tag("om", spec.modes[o].id, t), 0.0, 0.0, VT::Binary,
                                 {R::Mode, mode, -1, static_cast<int>(t)});
      }
      continue;
    }
    anySelectable = true;
    if (modes.fixed) {
      slice.mode[o] = flag(true);
    } else {
      const double lower = modes.pinned ? 1.0 : 0.0;
      slice.mode[o] = variable(tag("om", spec.modes[o].id, t), lower, 1.0, VT::Binary,
                               {R::Mode, mode, -1, static_cast<int>(t)});
    }
  }
  if (!anySelectable) builder_.markInfeasible("no operation mode available at t=" + std::to_string(t));
  for (std::size_t f = 0; f < spec.directions.size(); ++f) {
    const int dir = static_cast<int>(f);
    if (modes.direction >= 0 && !modes.pinned) {
      slice.direction[f] = flag(dir == modes.direction);
    } else {
      const double fixedValue = dir == modes.direction ? 1.0 : 0.0;
      const bool pin = modes.pinned && modes.direction >= 0;
      slice.direction[f] = variable(tag("fd", spec.directions[f].id, t), pin ? fixedValue : 0.0,
                                    pin ? fixedValue : 1.0, VT::Binary,
                                    {R::Direction, dir, -1, static_cast<int>(t)});
    }
  }

  const bool switchesFixed = allConstant(slice.mode);
  if (switchesFixed && anySelectable) {
    int active = -1;
    for (std::size_t o = 0; o < spec.modes.size(); ++o) {
      if (slice.mode[o].value == 1.0) active = static_cast<int>(o);
    }
    applyModeSwitches(spec, active, slice);
  }

  for (std::size_t i = 0; i < spec.arcs.size(); ++i) {
    const int a = static_cast<int>(i);
    const Arc& arc = spec.arcs[i];
    const int ti = static_cast<int>(t);
    const double lb = flowLB(a, t);
    const double ub = flowUB(a, t);
    switch (arc.kind()) {
      case ArcKind::Pipe:
        if (stationary) {
          slice.flowIn[i] = slice.flowOut[i] =
              variable(tag("q", arc.id, t), lb, ub, VT::Continuous, {R::FlowIn, a, -1, ti});
        } else {
          slice.flowIn[i] =
              variable(tag("ql", arc.id, t), lb, ub, VT::Continuous, {R::FlowIn, a, -1, ti});
          slice.flowOut[i] =
              variable(tag("qr", arc.id, t), lb, ub, VT::Continuous, {R::FlowOut, a, -1, ti});
        }
        break;
      case ArcKind::Resistor:
        slice.flowIn[i] = slice.flowOut[i] =
            variable(tag("q", arc.id, t), lb, ub, VT::Continuous, {R::FlowIn, a, -1, ti});
        break;
      case ArcKind::Valve:
        slice.flowIn[i] = slice.flowOut[i] = variable(
            tag("q", arc.id, t), std::min(0.0, lb), std::max(0.0, ub), VT::Continuous,
            {R::FlowIn, a, -1, ti});
        if (!switchesFixed) {
          slice.valveOpen[i] = variable(tag("op", arc.id, t), 0.0, 1.0, VT::Binary,
                                        {R::ValveOpen, a, -1, ti});
        }
        break;
      case ArcKind::Regulator: {
        slice.flowIn[i] = slice.flowOut[i] = variable(
            tag("q", arc.id, t), 0.0, std::max(0.0, ub), VT::Continuous, {R::FlowIn, a, -1, ti});
        RegulatorSwitch& sw = slice.regulators[i];
        sw.closed = variable(tag("rcl", arc.id, t), 0.0, 1.0, VT::Binary,
                             {R::RegulatorClosed, a, -1, ti});
        sw.bypass = variable(tag("rby", arc.id, t), 0.0, 1.0, VT::Binary,
                             {R::RegulatorBypass, a, -1, ti});
        sw.active = variable(tag("rac", arc.id, t), 0.0, 1.0, VT::Binary,
                             {R::RegulatorActive, a, -1, ti});
        break;
      }
      case ArcKind::CompressorStation: {
        slice.flowIn[i] = slice.flowOut[i] = variable(
            tag("q", arc.id, t), std::min(0.0, lb), std::max(0.0, ub), VT::Continuous,
            {R::FlowIn, a, -1, ti});
        if (switchesFixed) break;
        StationCopies& c = slice.stations[i];
        const auto& configs = arc.station().configurations;
        const double plLB = pressureLB(arc.from, t);
        const double plUB = pressureUB(arc.from, t);
        const double prLB = pressureLB(arc.to, t);
        const double prUB = pressureUB(arc.to, t);
        auto widened = [&](std::string name, double lo, double hi, VariableRole role) {
          return variable(std::move(name), std::min(0.0, lo), std::max(0.0, hi), VT::Continuous,
                          role);
        };
        c.bypass = variable(tag("by", arc.id, t), 0.0, 1.0, VT::Binary, {R::StationBypass, a, -1, ti});
        c.closed = variable(tag("cl", arc.id, t), 0.0, 1.0, VT::Binary, {R::StationClosed, a, -1, ti});
        c.bypassPressure = widened(tag("pby", arc.id, t), std::max(plLB, prLB),
                                   std::max(std::min(plUB, prUB), std::max(plLB, prLB)),
                                   {R::BypassPressure, a, -1, ti});
        c.bypassFlow = widened(tag("qby", arc.id, t), lb, ub, {R::BypassFlow, a, -1, ti});
        c.closedInlet = widened(tag("pcll", arc.id, t), plLB, plUB, {R::ClosedInletPressure, a, -1, ti});
        c.closedOutlet = widened(tag("pclr", arc.id, t), prLB, prUB, {R::ClosedOutletPressure, a, -1, ti});
        for (std::size_t k = 0; k < configs.size(); ++k) {
          const int ck = static_cast<int>(k);
          const std::string id = arc.id + "." + configs[k].id;
          c.config.push_back(variable(tag("cfg", id, t), 0.0, 1.0, VT::Binary,
                                      {R::StationConfig, a, ck, ti}));
          c.configInlet.push_back(
              widened(tag("pcfgl", id, t), plLB, plUB, {R::ConfigInletPressure, a, ck, ti}));
          c.configOutlet.push_back(
              widened(tag("pcfgr", id, t), prLB, prUB, {R::ConfigOutletPressure, a, ck, ti}));
          c.configFlow.push_back(widened(tag("qcfg", id, t), std::max(0.0, lb), std::max(0.0, ub),
                                         {R::ConfigFlow, a, ck, ti}));
        }
        break;
      }
    }
  }
  slices_.push_back(std::move(slice));
  return slices_.back();
}

void ModelAssembler::emitCompressorStation(int a, const TimeSlice& s) {
  const Arc& arc = problem_.spec().arcs[a];
  for (const auto& config : arc.station().configurations) {
    if (config.facets.empty()) {
      throw NetstationError("configuration '" + config.id + "' of station '" + arc.id +
                            "' has no operating range facets");
    }
  }
  const StationCopies& c = s.stations[a];
  if (!c.bypass.isVariable()) {
    emitStationDirect(a, s);
    return;
  }
  const std::size_t t = s.time;
  const auto& configs = arc.station().configurations;
  const Quantity pl = s.pressure[arc.from];
  const Quantity pr = s.pressure[arc.to];
  const Quantity q = s.flowIn[a];

  LinExpr selection = LinExpr(c.bypass) + LinExpr(c.closed);
  LinExpr inlet(pl), outlet(pr), flow(q);
  inlet.add(c.bypassPressure, -1.0).add(c.closedInlet, -1.0);
  outlet.add(c.bypassPressure, -1.0).add(c.closedOutlet, -1.0);
  flow.add(c.bypassFlow, -1.0);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    selection.add(c.config[k], 1.0);
    inlet.add(c.configInlet[k], -1.0);
    outlet.add(c.configOutlet[k], -1.0);
    flow.add(c.configFlow[k], -1.0);
  }
  builder_.addEquality(tag("cs_select", arc.id, t), selection, 1.0);
  builder_.addEquality(tag("cs_inlet", arc.id, t), inlet);
  builder_.addEquality(tag("cs_outlet", arc.id, t), outlet);
  builder_.addEquality(tag("cs_flow", arc.id, t), flow);

  auto bounded = [&](const std::string& name, Quantity copy, Quantity binary, double lo, double hi) {
    builder_.addGreaterEqual(name + "_lb", LinExpr(copy).add(binary, -lo));
    builder_.addLessEqual(name + "_ub", LinExpr(copy).add(binary, -hi));
  };
  const double plLB = pressureLB(arc.from, t), plUB = pressureUB(arc.from, t);
  const double prLB = pressureLB(arc.to, t), prUB = pressureUB(arc.to, t);
  const double lb = flowLB(a, t), ub = flowUB(a, t);
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const std::string id = arc.id + "." + configs[k].id;
    bounded(tag("cfg_pl", id, t), c.configInlet[k], c.config[k], plLB, plUB);
    bounded(tag("cfg_pr", id, t), c.configOutlet[k], c.config[k], prLB, prUB);
    bounded(tag("cfg_q", id, t), c.configFlow[k], c.config[k], std::max(0.0, lb), ub);
  }
  bounded(tag("by_p", arc.id, t), c.bypassPressure, c.bypass, std::max(plLB, prLB),
          std::min(plUB, prUB));
  bounded(tag("by_q", arc.id, t), c.bypassFlow, c.bypass, lb, ub);
  bounded(tag("cl_pl", arc.id, t), c.closedInlet, c.closed, plLB, plUB);
  bounded(tag("cl_pr", arc.id, t), c.closedOutlet, c.closed, prLB, prUB);

  for (std::size_t k = 0; k < configs.size(); ++k) {
    const std::string id = arc.id + "." + configs[k].id;
    const auto& facets = configs[k].facets;
    for (std::size_t f = 0; f < facets.size(); ++f) {
      const auto& h = facets[f];
      LinExpr row;
      row.add(c.configInlet[k], h.w).add(c.configOutlet[k], h.x).add(c.configFlow[k], h.y);
      row.add(c.config[k], h.z);
      builder_.addLessEqual(tag("cfg_facet" + std::to_string(f), id, t), row);
    }
  }
}

void ModelAssembler::emitStationDirect(int a, const TimeSlice& s) {
  const Arc& arc = problem_.spec().arcs[a];
  const StationCopies& c = s.stations[a];
  const std::size_t t = s.time;
  const Quantity pl = s.pressure[arc.from];
  const Quantity pr = s.pressure[arc.to];
  const Quantity q = s.flowIn[a];
  const double lb = flowLB(a, t), ub = flowUB(a, t);
  if (c.bypass.value == 1.0) {
    builder_.addEquality(tag("by_p", arc.id, t), LinExpr(pl).add(pr, -1.0));
    builder_.addRow(tag("by_q", arc.id, t), LinExpr(q), lb, ub);
    return;
  }
  if (c.closed.value == 1.0) {
    builder_.addEquality(tag("cl_q", arc.id, t), LinExpr(q));
    return;
  }
  const auto& configs = arc.station().configurations;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    if (c.config[k].value != 1.0) continue;
    const std::string id = arc.id + "." + configs[k].id;
    builder_.addRow(tag("cfg_q", id, t), LinExpr(q), std::max(0.0, lb), ub);
    for (std::size_t f = 0; f < configs[k].facets.size(); ++f) {
      const auto& h = configs[k].facets[f];
      LinExpr row;
      row.add(pl, h.w).add(pr, h.x).add(q, h.y).add(h.z);
      builder_.addLessEqual(tag("cfg_facet" + std::to_string(f), id, t), row);
    }
  }
}

void ModelAssembler::emitPipe(int a, const TimeSlice& previous, const TimeSlice& current,
                              bool transient) {
  const StationSpec& spec = problem_.spec();
  const Arc& arc = spec.arcs[a];
  const PipeData& pipe = arc.pipe();
  const ArcLinearization& lin = problem_.linearization(a);
  const std::size_t t = current.time;
  const double rtz = spec.gas.rtz(lin.z);
  const double friction = lin.friction * pipe.length / (4.0 * pipe.diameter * lin.area) / kPa;
  const double gravity = spec.gas.gravity * pipe.slope * pipe.length / (2.0 * rtz);

  const Quantity pl = current.pressure[arc.from];
  const Quantity pr = current.pressure[arc.to];
  LinExpr momentum(pr);
  momentum.add(pl, -1.0)
      .add(current.flowIn[a], friction * lin.velocityIn)
      .add(current.flowOut[a], friction * lin.velocityOut)
      .add(pl, gravity)
      .add(pr, gravity);
  builder_.addEquality(tag("pipe_momentum", arc.id, t), momentum);
  if (!transient) return;

  if (previous.time >= current.time) throw std::invalid_argument("pipe rows need t0 < t1");
  const double dt = problem_.scenario().timeGrid[current.time] - problem_.scenario().timeGrid[previous.time];
  const double storage = 2.0 * rtz * dt / (pipe.length * lin.area) / kPa;
  LinExpr continuity(pl);
  continuity.add(pr, 1.0)
      .add(previous.pressure[arc.from], -1.0)
      .add(previous.pressure[arc.to], -1.0)
      .add(current.flowOut[a], storage)
      .add(current.flowIn[a], -storage);
  builder_.addEquality(tag("pipe_continuity", arc.id, t), continuity);
}

void ModelAssembler::emitResistor(int a, const TimeSlice& s) {
  const Arc& arc = problem_.spec().arcs[a];
  const ArcLinearization& lin = problem_.linearization(a);
  const double coef = arc.resistor().drag * lin.velocity / (2.0 * lin.area) / kPa;
  LinExpr row(s.pressure[arc.from]);
  row.add(s.pressure[arc.to], -1.0).add(s.flowIn[a], -coef);
  builder_.addEquality(tag("resistor", arc.id, s.time), row);
}

void ModelAssembler::emitValve(int a, const TimeSlice& s) {
  const Arc& arc = problem_.spec().arcs[a];
  const std::size_t t = s.time;
  const Quantity op = s.valveOpen[a];
  const Quantity q = s.flowIn[a];
  const Quantity pl = s.pressure[arc.from];
  const Quantity pr = s.pressure[arc.to];
  const bool closedForSure = !op.isVariable() && op.value == 0.0;
  if (!closedForSure) {
    const double upper = pressureUB(arc.from, t) - pressureLB(arc.to, t);
    const double lower = pressureLB(arc.from, t) - pressureUB(arc.to, t);
    builder_.addLessEqual(tag("valve_dp_ub", arc.id, t), LinExpr(pl).add(pr, -1.0).add(op, upper), upper);
    builder_.addGreaterEqual(tag("valve_dp_lb", arc.id, t), LinExpr(pl).add(pr, -1.0).add(op, lower), lower);
  }
  builder_.addLessEqual(tag("valve_q_ub", arc.id, t), LinExpr(q).add(op, -flowUB(a, t)));
  builder_.addGreaterEqual(tag("valve_q_lb", arc.id, t), LinExpr(q).add(op, -flowLB(a, t)));
}

void ModelAssembler::emitRegulator(int a, const TimeSlice& s) {
  const Arc& arc = problem_.spec().arcs[a];
  const std::size_t t = s.time;
  const RegulatorSwitch& sw = s.regulators[a];
  const Quantity q = s.flowIn[a];
  const Quantity pl = s.pressure[arc.from];
  const Quantity pr = s.pressure[arc.to];
  builder_.addEquality(tag("rg_select", arc.id, t),
                       LinExpr(sw.closed).add(sw.bypass, 1.0).add(sw.active, 1.0), 1.0);
  const double upper = pressureUB(arc.from, t) - pressureLB(arc.to, t);
  const double lower = pressureLB(arc.from, t) - pressureUB(arc.to, t);
  builder_.addLessEqual(tag("rg_dp_ub", arc.id, t), LinExpr(pl).add(pr, -1.0).add(sw.bypass, upper),
                        upper);
  builder_.addGreaterEqual(tag("rg_dp_lb", arc.id, t),
                           LinExpr(pl).add(pr, -1.0).add(sw.bypass, lower).add(sw.active, lower),
                           lower);
  const double ub = flowUB(a, t);
  builder_.addLessEqual(tag("rg_q_ub", arc.id, t), LinExpr(q).add(sw.closed, ub), ub);
  builder_.addGreaterEqual(tag("rg_q_lb", arc.id, t), LinExpr(q));
}

void ModelAssembler::emitNodeBalance(int v, const TimeSlice& s) {
  const StationSpec& spec = problem_.spec();
  LinExpr balance;
  for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
    if (spec.arcs[a].to == v) balance.add(s.flowOut[a], 1.0);
    if (spec.arcs[a].from == v) balance.add(s.flowIn[a], -1.0);
  }
  if (spec.nodes[v].kind == NodeKind::Boundary) balance.add(s.inflow[v], 1.0);
  builder_.addEquality(tag("balance", spec.nodes[v].id, s.time), balance);
}

void ModelAssembler::emitSwitchCoupling(const TimeSlice& s) {
  const StationSpec& spec = problem_.spec();
  const std::size_t t = s.time;
  for (std::size_t i = 0; i < spec.arcs.size(); ++i) {
    const int a = static_cast<int>(i);
    const Arc& arc = spec.arcs[i];
    if (arc.kind() == ArcKind::Valve && s.valveOpen[i].isVariable()) {
      LinExpr row(s.valveOpen[i]);
      for (std::size_t o = 0; o < spec.modes.size(); ++o) {
        if (modeOf(spec, static_cast<int>(o), a).kind == ModeToken::Kind::Open) row.add(s.mode[o], -1.0);
      }
      builder_.addEquality(tag("om_valve", arc.id, t), row);
    } else if (arc.kind() == ArcKind::CompressorStation && s.stations[i].bypass.isVariable()) {
      const StationCopies& c = s.stations[i];
      // The closed-mode coupling follows from the others and the selection row.
      LinExpr bypass(c.bypass);
      std::vector<LinExpr> configs;
      for (const Quantity& cfg : c.config) configs.emplace_back(cfg);
      for (std::size_t o = 0; o < spec.modes.size(); ++o) {
        const ModeToken token = modeOf(spec, static_cast<int>(o), a);
        if (token.kind == ModeToken::Kind::Bypass) bypass.add(s.mode[o], -1.0);
        if (token.kind == ModeToken::Kind::Active) configs[token.configuration].add(s.mode[o], -1.0);
      }
      builder_.addEquality(tag("om_bypass", arc.id, t), bypass);
      const auto& cfgs = arc.station().configurations;
      for (std::size_t k = 0; k < cfgs.size(); ++k) {
        builder_.addEquality(tag("om_cfg", arc.id + "." + cfgs[k].id, t), configs[k]);
      }
    }
  }
}

void ModelAssembler::emitStationLogic(const TimeSlice& s) {
  const StationSpec& spec = problem_.spec();
  const Scenario& scen = problem_.scenario();
  const std::size_t t = s.time;

  LinExpr modes;
  for (const Quantity& om : s.mode) modes.add(om, 1.0);
  builder_.addEquality(tag("om_select", "", t), modes, 1.0);
  emitSwitchCoupling(s);

  LinExpr directions;
  for (const Quantity& fd : s.direction) directions.add(fd, 1.0);
  builder_.addEquality(tag("fd_select", "", t), directions, 1.0);
  for (std::size_t o = 0; o < spec.modes.size(); ++o) {
    LinExpr row(s.mode[o]);
    for (int f : spec.directionsOf(static_cast<int>(o))) row.add(s.direction[f], -1.0);
    builder_.addLessEqual(tag("om_fd", spec.modes[o].id, t), row);
  }

  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const int v = static_cast<int>(i);
    const Node& node = spec.nodes[i];
    if (node.kind != NodeKind::Boundary) continue;
    const double lb = scen.inflowLB[i].at(t);
    const double ub = scen.inflowUB[i].at(t);
    LinExpr lower(s.inflow[i]);
    LinExpr upper(s.inflow[i]);
    LinExpr exiting;
    for (std::size_t f = 0; f < spec.directions.size(); ++f) {
      const FlowDirection& dir = spec.directions[f];
      if (!dir.isOutflow(v)) lower.add(s.direction[f], lb);
      if (!dir.isInflow(v)) upper.add(s.direction[f], ub);
      if (dir.isOutflow(v)) exiting.add(s.direction[f], 1.0);
    }
    builder_.addGreaterEqual(tag("fd_d_lb", node.id, t), lower, lb);
    builder_.addLessEqual(tag("fd_d_ub", node.id, t), upper, ub);
    if (node.exitPressureUB) {
      const double exitUB = *node.exitPressureUB / kPa;
      const double range = pressureUB(v, t) - exitUB;
      LinExpr row(s.pressure[i]);
      row += range * exiting;
      builder_.addLessEqual(tag("exit_p", node.id, t), row, pressureUB(v, t));
    }
  }

  for (std::size_t k = 0; k < spec.flowConditions.size(); ++k) {
    const FlowCondition& w = spec.flowConditions[k];
    const Quantity fd = s.direction[w.direction];
    if (!fd.isVariable() && fd.value == 0.0) continue;
    const FlowDirection& dir = spec.directions[w.direction];
    auto sign = [&](int v) { return dir.isInflow(v) ? 1.0 : -1.0; };
    double bigM = 0.0;
    LinExpr row;
    for (int v : w.firstNodes) {
      row.add(s.inflow[v], sign(v));
      if (dir.isInflow(v)) bigM += std::max(0.0, scen.inflowUB[v].at(t));
      else bigM -= std::min(0.0, scen.inflowLB[v].at(t));
    }
    for (int v : w.secondNodes) {
      row.add(s.inflow[v], -sign(v));
      if (dir.isInflow(v)) bigM -= std::max(0.0, scen.inflowLB[v].at(t));
      else bigM += std::min(0.0, scen.inflowUB[v].at(t));
    }
    row.add(fd, bigM);
    builder_.addLessEqual(tag("fd_condition", std::to_string(k), t), row, bigM);
  }
}

void ModelAssembler::emitSlacks(const TimeSlice& s) {
  const StationSpec& spec = problem_.spec();
  const Scenario& scen = problem_.scenario();
  const ModelWeights& w = problem_.modelWeights();
  const std::size_t t = s.time;
  const int ti = static_cast<int>(t);
  const double dt = stepLength(t);
  using R = RoleKind;

  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const Node& node = spec.nodes[i];
    if (node.kind != NodeKind::Boundary || scen.pressureDemand[i].empty()) continue;
    const int v = static_cast<int>(i);
    const double demand = scen.pressureDemand[i].at(t) / kPa;
    const double cap = std::max(std::abs(pressureUB(v, t) - demand), std::abs(demand - pressureLB(v, t)));
    const Quantity up = variable(tag("spp", node.id, t), 0.0, cap, VarType::Continuous,
                                 {R::PressureSlackUp, v, -1, ti}, CostCategory::PressureSlack);
    const Quantity down = variable(tag("spn", node.id, t), 0.0, cap, VarType::Continuous,
                                   {R::PressureSlackDown, v, -1, ti}, CostCategory::PressureSlack);
    builder_.addEquality(tag("slack_p", node.id, t),
                         LinExpr(s.pressure[i]).add(up, -1.0).add(down, 1.0), demand);
    const double weight = dt * w.pressureSlack * slackScale_;
    builder_.addCost(up, weight, CostCategory::PressureSlack);
    builder_.addCost(down, weight, CostCategory::PressureSlack);
  }

  for (std::size_t g = 0; g < spec.fenceGroups.size(); ++g) {
    const FenceGroup& group = spec.fenceGroups[g];
    const double demand = scen.flowDemand[g].at(t);
    double cap = std::abs(demand);
    for (int v : group.nodes) {
      cap += std::max(std::abs(scen.inflowLB[v].at(t)), std::abs(scen.inflowUB[v].at(t)));
    }
    LinExpr row;
    for (int v : group.nodes) {
      const std::string& id = spec.nodes[v].id;
      const Quantity up = variable(tag("sdp", id, t), 0.0, cap, VarType::Continuous,
                                   {R::FlowSlackUp, v, static_cast<int>(g), ti}, CostCategory::FlowSlack);
      const Quantity down = variable(tag("sdn", id, t), 0.0, cap, VarType::Continuous,
                                     {R::FlowSlackDown, v, static_cast<int>(g), ti},
                                     CostCategory::FlowSlack);
      row.add(s.inflow[v], 1.0).add(up, -1.0).add(down, 1.0);
      const double weight = dt * w.flowSlack * slackScale_;
      builder_.addCost(up, weight, CostCategory::FlowSlack);
      builder_.addCost(down, weight, CostCategory::FlowSlack);
    }
    builder_.addEquality(tag("slack_d", group.id, t), row, demand);
  }
}

void ModelAssembler::emitChangeTracking(const TimeSlice& prev, const TimeSlice& cur,
                                        bool operatingPoints) {
  const StationSpec& spec = problem_.spec();
  const ModelWeights& w = problem_.modelWeights();
  const std::size_t t = cur.time;
  const int ti = static_cast<int>(t);
  using R = RoleKind;

  // Discrete change indicator over pairs of binaries (now, before).
  auto indicator = [&](const std::vector<std::pair<Quantity, Quantity>>& pairs, const std::string& name,
                       VariableRole role, CostCategory category, double weight) {
    bool constant = true;
    bool changed = false;
    for (const auto& [now, before] : pairs) {
      constant = constant && !now.isVariable() && !before.isVariable();
      if (constant && now.value != before.value) changed = true;
    }
    Quantity delta;
    if (constant) {
      delta = flag(changed);
    } else {
      delta = variable(name, 0.0, 1.0, VarType::Binary, role, category);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& [now, before] = pairs[k];
        builder_.addGreaterEqual(name + "_lb" + std::to_string(k),
                                 LinExpr(delta).add(now, -1.0).add(before, 1.0));
        builder_.addLessEqual(name + "_ub" + std::to_string(k),
                              LinExpr(delta).add(now, 1.0).add(before, 1.0), 2.0);
      }
    }
    builder_.addCost(delta, weight, category);
    return delta;
  };

  std::vector<std::pair<Quantity, Quantity>> modePairs;
  for (std::size_t o = 0; o < spec.modes.size(); ++o) modePairs.emplace_back(cur.mode[o], prev.mode[o]);
  const Quantity modeChange = indicator(modePairs, tag("dom", "", t), {R::ModeChange, -1, -1, ti},
                                        CostCategory::ModeChange, w.modeChange);

  auto tracker = [&](const std::string& name, Quantity now, Quantity before, double ubNow,
                     double lbNow, double ubBefore, double lbBefore, const LinExpr& waiver,
                     VariableRole role, CostCategory category, double weight) {
    if (waiver.isConstant() && waiver.constant() >= 1.0) return;
    const double upRange = ubNow - lbBefore;
    const double downRange = ubBefore - lbNow;
    const double cap = std::max({upRange, downRange, 0.0});
    const Quantity delta = variable(name, 0.0, cap, VarType::Continuous, role, category);
    LinExpr up = LinExpr(now).add(before, -1.0).add(delta, -1.0);
    up -= upRange * waiver;
    builder_.addLessEqual(name + "_up", up);
    LinExpr down = LinExpr(before).add(now, -1.0).add(delta, -1.0);
    down -= downRange * waiver;
    builder_.addLessEqual(name + "_down", down);
    builder_.addCost(delta, weight, category);
  };

  for (std::size_t i = 0; i < spec.arcs.size(); ++i) {
    const int a = static_cast<int>(i);
    const Arc& arc = spec.arcs[i];
    if (arc.kind() == ArcKind::CompressorStation) {
      const auto& station = arc.station();
      for (std::size_t u = 0; u < station.units.size(); ++u) {
        LinExpr now, before;
        bool constant = true;
        for (std::size_t k = 0; k < station.configurations.size(); ++k) {
          const auto units = station.configurations[k].unitSet();
          if (!std::binary_search(units.begin(), units.end(), static_cast<int>(u))) continue;
          now.add(cur.stations[i].config[k], 1.0);
          before.add(prev.stations[i].config[k], 1.0);
          constant = constant && !cur.stations[i].config[k].isVariable() &&
                     !prev.stations[i].config[k].isVariable();
        }
        const std::string name = tag("dus", arc.id + "." + station.units[u].id, t);
        Quantity start;
        if (constant) {
          start = Quantity::constant(std::max(0.0, now.constant() - before.constant()));
        } else {
          start = variable(name, 0.0, 1.0, VarType::Binary, {R::UnitStart, a, static_cast<int>(u), ti},
                           CostCategory::UnitStart);
          LinExpr row(start);
          row -= now;
          row += before;
          builder_.addGreaterEqual(name, row);
        }
        builder_.addCost(start, w.unitStart, CostCategory::UnitStart);
      }
    }
    if (!operatingPoints) continue;

    const std::size_t tp = prev.time;
    if (arc.kind() == ArcKind::Regulator) {
      const RegulatorSwitch& sw = cur.regulators[i];
      const RegulatorSwitch& old = prev.regulators[i];
      const Quantity change = indicator(
          {{sw.closed, old.closed}, {sw.bypass, old.bypass}, {sw.active, old.active}},
          tag("drg", arc.id, t), {R::RegulatorChange, a, -1, ti}, CostCategory::RegulatorModeChange,
          w.regulatorModeChange);
      const LinExpr waiver = LinExpr(sw.bypass).add(sw.closed, 1.0).add(change, 1.0);
      tracker(tag("drgpl", arc.id, t), cur.pressure[arc.from], prev.pressure[arc.from],
              pressureUB(arc.from, t), pressureLB(arc.from, t), pressureUB(arc.from, tp),
              pressureLB(arc.from, tp), waiver, {R::RegulatorInletChange, a, -1, ti},
              CostCategory::RegulatorInletChange, w.regulatorInlet);
      tracker(tag("drgpr", arc.id, t), cur.pressure[arc.to], prev.pressure[arc.to],
              pressureUB(arc.to, t), pressureLB(arc.to, t), pressureUB(arc.to, tp),
              pressureLB(arc.to, tp), waiver, {R::RegulatorOutletChange, a, -1, ti},
              CostCategory::RegulatorOutletChange, w.regulatorOutlet);
      tracker(tag("drgq", arc.id, t), cur.flowIn[i], prev.flowIn[i], std::max(0.0, flowUB(a, t)), 0.0,
              std::max(0.0, flowUB(a, tp)), 0.0, waiver, {R::RegulatorFlowChange, a, -1, ti},
              CostCategory::RegulatorFlowChange, w.regulatorFlow);
    } else if (arc.kind() == ArcKind::CompressorStation) {
      const StationCopies& c = cur.stations[i];
      const LinExpr waiver = LinExpr(c.bypass).add(c.closed, 1.0).add(modeChange, 1.0);
      tracker(tag("dcspl", arc.id, t), cur.pressure[arc.from], prev.pressure[arc.from],
              pressureUB(arc.from, t), pressureLB(arc.from, t), pressureUB(arc.from, tp),
              pressureLB(arc.from, tp), waiver, {R::StationInletChange, a, -1, ti},
              CostCategory::StationInletChange, w.stationInlet);
      tracker(tag("dcspr", arc.id, t), cur.pressure[arc.to], prev.pressure[arc.to],
              pressureUB(arc.to, t), pressureLB(arc.to, t), pressureUB(arc.to, tp),
              pressureLB(arc.to, tp), waiver, {R::StationOutletChange, a, -1, ti},
              CostCategory::StationOutletChange, w.stationOutlet);
      tracker(tag("dcsq", arc.id, t), cur.flowIn[i], prev.flowIn[i], std::max(0.0, flowUB(a, t)),
              std::min(0.0, flowLB(a, t)), std::max(0.0, flowUB(a, tp)), std::min(0.0, flowLB(a, tp)),
              waiver, {R::StationFlowChange, a, -1, ti}, CostCategory::StationFlowChange,
              w.stationFlow);
    }
  }
}

void ModelAssembler::emitStep(const TimeSlice& previous, const TimeSlice& current, bool transient) {
  const StationSpec& spec = problem_.spec();
  for (std::size_t i = 0; i < spec.arcs.size(); ++i) {
    const int a = static_cast<int>(i);
    switch (spec.arcs[i].kind()) {
      case ArcKind::Pipe: emitPipe(a, previous, current, transient); break;
      case ArcKind::Resistor: emitResistor(a, current); break;
      case ArcKind::Valve: emitValve(a, current); break;
      case ArcKind::Regulator: emitRegulator(a, current); break;
      case ArcKind::CompressorStation: emitCompressorStation(a, current); break;
    }
  }
  for (std::size_t v = 0; v < spec.nodes.size(); ++v) emitNodeBalance(static_cast<int>(v), current);
  emitStationLogic(current);
  emitSlacks(current);
}

ModelInstance ModelAssembler::finish() && {
  ModelInstance model = std::move(builder_).finish();
  model.catalog.slices.assign(slices_.begin(), slices_.end());
  return model;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> allModes(const StationSpec& spec) {
  std::vector<int> out(spec.modes.size());
  for (std::size_t o = 0; o < out.size(); ++o) out[o] = static_cast<int>(o);
  return out;
}

void requireTime(const StationProblem& problem, std::size_t time) {
  if (time == 0 || time >= problem.positions()) {
    throw std::out_of_range("model time must be a future position of the grid");
  }
}

void requireMode(const StationProblem& problem, int mode) {
  if (mode < 0 || static_cast<std::size_t>(mode) >= problem.spec().modes.size()) {
    throw NetstationError("unknown operation mode index " + std::to_string(mode));
  }
}

}  // namespace

ModelInstance buildFullModel(const StationProblem& problem, const FullModelOptions& options) {
  const StationSpec& spec = problem.spec();
  const std::size_t positions = problem.positions();
  if (options.fixedSequence && options.fixedSequence->size() != positions) {
    throw std::invalid_argument("fixed sequence length does not match the time grid");
  }
  ModelAssembler assembler(problem, Variant::Full, spec.name + "_P");
  const TimeSlice* previous = &assembler.addFixedSlice(problem.scenario().initialState, 0);
  for (std::size_t t = 1; t < positions; ++t) {
    SliceModes modes;
    if (options.fixedSequence) {
      modes.candidates = {options.fixedSequence->modes[t]};
      modes.direction = options.fixedSequence->directions[t];
      modes.pinned = true;
    } else {
      modes.candidates = allModes(spec);
    }
    const TimeSlice& current = assembler.addVariableSlice(t, modes, false);
    assembler.emitStep(*previous, current, true);
    assembler.emitChangeTracking(*previous, current, true);
    previous = &current;
  }
  return std::move(assembler).finish();
}

ModelInstance buildStationaryModel(const StationProblem& problem, std::size_t time,
                                   const std::vector<int>& validModes, int previousMode) {
  requireTime(problem, time);
  requireMode(problem, previousMode);
  for (int o : validModes) requireMode(problem, o);
  ModelAssembler assembler(problem, Variant::Stationary,
                           problem.spec().name + "_Ps_" + std::to_string(time));
  const TimeSlice& previous = assembler.addModeSlice(previousMode, time - 1);
  SliceModes modes;
  modes.candidates = validModes;
  const TimeSlice& current = assembler.addVariableSlice(time, modes, true);
  assembler.emitStep(previous, current, false);
  assembler.emitChangeTracking(previous, current, false);
  return std::move(assembler).finish();
}

ModelInstance buildStationaryFixedModel(const StationProblem& problem, std::size_t time, int mode,
                                        int previousMode) {
  requireTime(problem, time);
  requireMode(problem, mode);
  requireMode(problem, previousMode);
  if (!problem.available(mode, time)) {
    throw std::invalid_argument("operation mode '" + problem.spec().modes[mode].id +
                                "' is unavailable at t=" + std::to_string(time));
  }
  ModelAssembler assembler(problem, Variant::StationaryFixed,
                           problem.spec().name + "_Psf_" + std::to_string(time));
  const TimeSlice& previous = assembler.addModeSlice(previousMode, time - 1);
  SliceModes modes;
  modes.candidates = {mode};
  modes.fixed = true;
  const TimeSlice& current = assembler.addVariableSlice(time, modes, true);
  assembler.emitStep(previous, current, false);
  assembler.emitChangeTracking(previous, current, false);
  return std::move(assembler).finish();
}

ModelInstance buildTransientFixedModel(const StationProblem& problem, const WindowModes& window) {
  if (window.modes.empty() || window.modes.size() != window.directions.size()) {
    throw std::invalid_argument("window needs one mode and one direction per future step");
  }
  if (window.start + window.modes.size() >= problem.positions()) {
    throw std::invalid_argument("window runs past the time grid");
  }
  ModelAssembler assembler(problem, Variant::TransientFixed,
                           problem.spec().name + "_Pf_" + std::to_string(window.start));
  assembler.scaleSlacks(window.slackScale);
  const TimeSlice* previous = &assembler.addFixedSlice(window.startState, window.start);
  for (std::size_t k = 0; k < window.modes.size(); ++k) {
    const std::size_t t = window.start + 1 + k;
    const int mode = window.modes[k];
    requireMode(problem, mode);
    if (!problem.available(mode, t)) {
      throw std::invalid_argument("operation mode '" + problem.spec().modes[mode].id +
                                  "' is unavailable at t=" + std::to_string(t));
    }
    SliceModes modes;
    modes.candidates = {mode};
    modes.fixed = true;
    modes.direction = window.directions[k];
    const TimeSlice& current = assembler.addVariableSlice(t, modes, false);
    assembler.emitStep(*previous, current, true);
    assembler.emitChangeTracking(*previous, current, true);
    previous = &current;
  }
  return std::move(assembler).finish();
}

// ---------------------------------------------------------------------------

std::vector<State> extractStates(const StationProblem& problem, const ModelInstance& model,
                                 const std::vector<double>& x) {
  const StationSpec& spec = problem.spec();
  const VariableCatalog& catalog = model.catalog;
  std::vector<State> out;
  for (std::size_t k = 1; k < catalog.slices.size(); ++k) {
    const TimeSlice& s = catalog.slices[k];
    State state;
    for (std::size_t v = 0; v < spec.nodes.size(); ++v) {
      state.pressure.push_back(catalog.value(s.pressure[v], x) * kPa);
      state.inflow.push_back(catalog.value(s.inflow[v], x));
    }
    state.regulatorModes.assign(spec.arcs.size(), RegulatorMode::Closed);
    for (std::size_t a = 0; a < spec.arcs.size(); ++a) {
      state.flowIn.push_back(catalog.value(s.flowIn[a], x));
      state.flowOut.push_back(catalog.value(s.flowOut[a], x));
      if (spec.arcs[a].kind() == ArcKind::Regulator) {
        const RegulatorSwitch& sw = s.regulators[a];
        if (catalog.value(sw.active, x) > 0.5) state.regulatorModes[a] = RegulatorMode::Active;
        else if (catalog.value(sw.bypass, x) > 0.5) state.regulatorModes[a] = RegulatorMode::Bypass;
      }
    }
    for (std::size_t o = 0; o < spec.modes.size(); ++o) {
      if (catalog.value(s.mode[o], x) > 0.5) state.mode = static_cast<int>(o);
    }
    for (std::size_t f = 0; f < spec.directions.size(); ++f) {
      if (catalog.value(s.direction[f], x) > 0.5) state.direction = static_cast<int>(f);
    }
    out.push_back(std::move(state));
  }
  return out;
}

std::vector<double> assignmentFromPlan(const StationProblem& problem, const ModelInstance& model,
                                       const std::vector<State>& states,
                                       const ModeSequence& sequence) {
  const StationSpec& spec = problem.spec();
  const Scenario& scen = problem.scenario();
  if (states.size() != problem.positions() || sequence.size() != problem.positions()) {
    throw std::invalid_argument("plan does not cover the time grid");
  }
  auto token = [&](int a, int t) { return modeOf(spec, sequence.modes[t], a); };
  auto regulator = [&](int a, int t) { return states[t].regulatorModes.at(a); };
  auto uses = [&](int a, int u, int t) {
    const ModeToken tk = token(a, t);
    if (tk.kind != ModeToken::Kind::Active) return false;
    const auto units = spec.arcs[a].station().configurations[tk.configuration].unitSet();
    return std::binary_search(units.begin(), units.end(), u);
  };
  auto bar = [](double pa) { return pa / kPa; };

  std::vector<double> x(model.variables.size(), 0.0);
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    const VariableRole& r = model.roles[i];
    const int t = r.time;
    const State& now = states.at(t);
    double value = 0.0;
    using K = RoleKind;
    using TK = ModeToken::Kind;
    switch (r.kind) {
      case K::Pressure: value = bar(now.pressure[r.entity]); break;
      case K::Inflow: value = now.inflow[r.entity]; break;
      case K::FlowIn: value = now.flowIn[r.entity]; break;
      case K::FlowOut: value = now.flowOut[r.entity]; break;
      case K::StationBypass: value = token(r.entity, t).kind == TK::Bypass; break;
      case K::StationClosed: value = token(r.entity, t).kind == TK::Closed; break;
      case K::StationConfig: {
        const ModeToken tk = token(r.entity, t);
        value = tk.kind == TK::Active && tk.configuration == r.sub;
        break;
      }
      case K::BypassPressure:
        value = token(r.entity, t).kind == TK::Bypass ? bar(now.pressure[spec.arcs[r.entity].from]) : 0.0;
        break;
      case K::BypassFlow:
        value = token(r.entity, t).kind == TK::Bypass ? now.flowIn[r.entity] : 0.0;
        break;
      case K::ClosedInletPressure:
        value = token(r.entity, t).kind == TK::Closed ? bar(now.pressure[spec.arcs[r.entity].from]) : 0.0;
        break;
      case K::ClosedOutletPressure:
        value = token(r.entity, t).kind == TK::Closed ? bar(now.pressure[spec.arcs[r.entity].to]) : 0.0;
        break;
      case K::ConfigInletPressure:
      case K::ConfigOutletPressure:
      case K::ConfigFlow: {
        const ModeToken tk = token(r.entity, t);
        if (tk.kind == TK::Active && tk.configuration == r.sub) {
          const Arc& arc = spec.arcs[r.entity];
          value = r.kind == K::ConfigInletPressure    ? bar(now.pressure[arc.from])
                  : r.kind == K::ConfigOutletPressure ? bar(now.pressure[arc.to])
                                                      : now.flowIn[r.entity];
        }
        break;
      }
      case K::ValveOpen: value = token(r.entity, t).kind == TK::Open; break;
      case K::RegulatorClosed: value = regulator(r.entity, t) == RegulatorMode::Closed; break;
      case K::RegulatorBypass: value = regulator(r.entity, t) == RegulatorMode::Bypass; break;
      case K::RegulatorActive: value = regulator(r.entity, t) == RegulatorMode::Active; break;
      case K::Mode: value = sequence.modes[t] == r.entity; break;
      case K::Direction: value = sequence.directions[t] == r.entity; break;
      case K::PressureSlackUp:
      case K::PressureSlackDown: {
        const double diff = bar(now.pressure[r.entity]) - bar(scen.pressureDemand[r.entity].at(t));
        value = std::max(0.0, r.kind == K::PressureSlackUp ? diff : -diff);
        break;
      }
      case K::FlowSlackUp:
      case K::FlowSlackDown: {
        const FenceGroup& group = spec.fenceGroups[r.sub];
        if (group.nodes.front() != r.entity) break;
        double diff = -scen.flowDemand[r.sub].at(t);
        for (int v : group.nodes) diff += now.inflow[v];
        value = std::max(0.0, r.kind == K::FlowSlackUp ? diff : -diff);
        break;
      }
      case K::ModeChange: value = sequence.modes[t] != sequence.modes[t - 1]; break;
      case K::RegulatorChange: value = regulator(r.entity, t) != regulator(r.entity, t - 1); break;
      case K::UnitStart: value = uses(r.entity, r.sub, t) && !uses(r.entity, r.sub, t - 1); break;
      case K::RegulatorInletChange:
      case K::RegulatorOutletChange:
      case K::RegulatorFlowChange: {
        const RegulatorMode m = regulator(r.entity, t);
        if (m != RegulatorMode::Active || m != regulator(r.entity, t - 1)) break;
        const Arc& arc = spec.arcs[r.entity];
        const State& before = states[t - 1];
        value = r.kind == K::RegulatorInletChange ? bar(std::abs(now.pressure[arc.from] - before.pressure[arc.from]))
                : r.kind == K::RegulatorOutletChange ? bar(std::abs(now.pressure[arc.to] - before.pressure[arc.to]))
                                                     : std::abs(now.flowIn[r.entity] - before.flowIn[r.entity]);
        break;
      }
      case K::StationInletChange:
      case K::StationOutletChange:
      case K::StationFlowChange: {
        if (token(r.entity, t).kind != TK::Active || sequence.modes[t] != sequence.modes[t - 1]) break;
        const Arc& arc = spec.arcs[r.entity];
        const State& before = states[t - 1];
        value = r.kind == K::StationInletChange ? bar(std::abs(now.pressure[arc.from] - before.pressure[arc.from]))
                : r.kind == K::StationOutletChange ? bar(std::abs(now.pressure[arc.to] - before.pressure[arc.to]))
                                                   : std::abs(now.flowIn[r.entity] - before.flowIn[r.entity]);
        break;
      }
    }
    x[i] = value;
  }
  return x;
}

}  // namespace netstation
