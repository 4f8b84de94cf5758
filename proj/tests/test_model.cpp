#include <cmath>
#include <regex>

#include <doctest.h>

#include "netstation/model_builder.hpp"
#include "netstation/solver.hpp"
#include "netstation/units.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

const Instance& mini() {
  static const Instance instance = testing::loadWithRanges("mini_station.json", 5000);
  return instance;
}

const Row& rowNamed(const ModelInstance& model, const std::string& name) {
  for (const auto& row : model.rows)
    if (row.name == name) return row;
  FAIL("no row " << name);
  throw std::logic_error("unreachable");
}

bool hasRow(const ModelInstance& model, const std::string& name) {
  for (const auto& row : model.rows)
    if (row.name == name) return true;
  return false;
}

double coefficient(const ModelInstance& model, const Row& row, const std::string& var) {
  double sum = 0.0;
  for (const auto& t : row.terms)
    if (model.variables[t.var].name == var) sum += t.coef;
  return sum;
}

double valueOf(const ModelInstance& model, const std::vector<double>& x, const std::string& var) {
  const int index = model.findVariable(var);
  REQUIRE(index >= 0);
  return x[index];
}

SolveResult solveOptimal(const ModelInstance& model) {
  const SolveResult result = HighsBackend().solve(model, defaultSettingsFor(model.variant));
  REQUIRE(result.status == SolveStatus::Optimal);
  return result;
}

nlohmann::json withSecondRegulator() {
  auto document = testing::fixtureJson("mini_station.json");
  document["arcs"].push_back(
      {{"id", "rg2"}, {"kind", "regulator"}, {"from", "n2"}, {"to", "n3"}, {"flowLB", 0}, {"flowUB", 300}});
  document["scenario"]["initialState"]["flow"]["rg1"] = 50;
  document["scenario"]["initialState"]["flow"]["rg2"] = 50;
  document["scenario"]["initialState"]["regulatorModes"]["rg2"] = "bypass";
  return document;
}

}  // namespace

TEST_CASE("expression arithmetic") {
  LinExpr e = LinExpr(Quantity::variable(0)) + 2.0 * LinExpr(Quantity::variable(1));
  e += 3.0;
  e -= LinExpr(Quantity::constant(1.0));
  CHECK(e.constant() == 2.0);
  CHECK(e.terms().size() == 2);
  ModelBuilder builder(Variant::Stationary, "tiny");
  const Quantity x = builder.addVariable("x", 0, 1, VarType::Continuous);
  CHECK_THROWS(builder.addVariable("x", 0, 1, VarType::Continuous));
  builder.addRow("constant_ok", LinExpr(1.0), 0.0, 2.0);
  CHECK(builder.rowCount() == 0);
  builder.addLessEqual("x_cap", LinExpr(x), 0.5);
  CHECK(builder.rowCount() == 1);
  builder.addRow("constant_bad", LinExpr(3.0), 0.0, 2.0);
  CHECK(std::move(builder).finish().knownInfeasible);
}

TEST_CASE("compressor station row count") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  const ModelInstance full = buildFullModel(problem);
  const std::size_t facets =
      mini().spec.arcs[mini().spec.arcIndex("cs1")].station().configurations[0].facets.size();
  const std::regex stationRow(
      R"(^(cs_select|cs_flow|cs_inlet|cs_outlet|by_p|by_q|cl_pl|cl_pr|cfg_pl|cfg_pr|cfg_q|cfg_facet\d+)\.cs1\.(c1\.)?1(_lb|_ub)?$)");
  std::size_t count = 0;
  for (const auto& row : full.rows) count += std::regex_match(row.name, stationRow) ? 1 : 0;
  // selection, three copy sums, seven two-sided bound pairs, the facets
  CHECK(count == 1 + 3 + 2 * 7 + facets);

  // Copies of the bypass and closed parts have zero lower bounds.
  for (const std::string name : {"pby.cs1.1", "qby.cs1.1", "pcll.cs1.1", "pclr.cs1.1"}) {
    CHECK(full.variables[full.findVariable(name)].lower == 0.0);
  }
  CHECK(full.findVariable("qcl.cs1.1") == -1);
}

TEST_CASE("pipe momentum") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  const int pipe = mini().spec.arcIndex("p1");
  const ArcLinearization& lin = problem.linearization(pipe);
  const PipeData& data = mini().spec.arcs[pipe].pipe();
  const ModelInstance stationary = buildStationaryFixedModel(problem, 1, 0, 0);
  const Row& row = rowNamed(stationary, "pipe_momentum.p1.1");
  const double expected = data.length * lin.friction / (4.0 * data.diameter * lin.area) *
                          (lin.velocityIn + lin.velocityOut) / units::kPaPerBar;
  CHECK(coefficient(stationary, row, "p.n1.1") == 1.0);
  CHECK(coefficient(stationary, row, "p.S.1") == -1.0);
  CHECK(coefficient(stationary, row, "q.p1.1") == doctest::Approx(expected).epsilon(1e-12));
  CHECK(lin.velocityIn ==
        doctest::Approx(pipeVelocityConstant(units::barToPa(50.0), 100.0 * 0.785 / 3.6, lin.area,
                                             lin.z, mini().spec.gas)));

  // Zero initial flow leaves only the gravity term.
  Instance still = mini();
  still.scenario.initialState.flowIn.assign(still.spec.arcs.size(), 0.0);
  still.scenario.initialState.flowOut.assign(still.spec.arcs.size(), 0.0);
  auto& pipeData = std::get<PipeData>(still.spec.arcs[pipe].data);
  pipeData.slope = 0.01;
  const StationProblem stillProblem(still.spec, still.scenario, still.weights);
  const ModelInstance flat = buildStationaryFixedModel(stillProblem, 1, 0, 0);
  const Row& gravity = rowNamed(flat, "pipe_momentum.p1.1");
  CHECK(coefficient(flat, gravity, "q.p1.1") == 0.0);
  CHECK(coefficient(flat, gravity, "p.S.1") != 0.0);
  CHECK(coefficient(flat, gravity, "p.S.1") != -1.0);  // slope couples into the pressures
}

TEST_CASE("transient pipe continuity") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  WindowModes window;
  window.start = 0;
  window.startState = mini().scenario.initialState;
  window.modes = {1};
  window.directions = {0};
  const ModelInstance model = buildTransientFixedModel(problem, window);
  const Row& row = rowNamed(model, "pipe_continuity.p1.1");
  // Pressures held at their previous values leave c (q_r - q_l) = 0.
  const double pl = coefficient(model, row, "p.S.1") * 50.0;
  const double pr = coefficient(model, row, "p.n1.1") * 50.0;
  CHECK(row.lower == row.upper);
  CHECK(pl + pr == doctest::Approx(row.lower));
  CHECK(coefficient(model, row, "ql.p1.1") == doctest::Approx(-coefficient(model, row, "qr.p1.1")));
  CHECK(coefficient(model, row, "qr.p1.1") > 0.0);
}

TEST_CASE("valves and regulators") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  const int valveMode = mini().spec.modeIndex("oValve");
  const int compressorMode = mini().spec.modeIndex("oComp");

  const ModelInstance open = buildStationaryFixedModel(problem, 1, valveMode, valveMode);
  const SolveResult openResult = solveOptimal(open);
  CHECK(valueOf(open, openResult.assignment, "p.n1.1") ==
        doctest::Approx(valueOf(open, openResult.assignment, "p.n2.1")).epsilon(1e-9));
  CHECK(valueOf(open, openResult.assignment, "q.cs1.1") == doctest::Approx(0.0));

  const ModelInstance closed = buildStationaryFixedModel(problem, 1, compressorMode, valveMode);
  const SolveResult closedResult = solveOptimal(closed);
  CHECK(valueOf(closed, closedResult.assignment, "q.v1.1") == doctest::Approx(0.0));
  CHECK(valueOf(closed, closedResult.assignment, "q.cs1.1") > 0.0);

  // Regulator bypass: equal pressures, forward flow.
  const ModelInstance bypass = buildStationaryFixedModel(problem, 1, valveMode, valveMode);
  auto pinned = bypass;
  pinned.variables[pinned.findVariable("rby.rg1.1")].lower = 1.0;
  const SolveResult bypassResult = solveOptimal(pinned);
  CHECK(valueOf(pinned, bypassResult.assignment, "p.n2.1") ==
        doctest::Approx(valueOf(pinned, bypassResult.assignment, "p.n3.1")).epsilon(1e-9));
  CHECK(valueOf(pinned, bypassResult.assignment, "q.rg1.1") >= -1e-9);

  auto shut = bypass;
  shut.variables[shut.findVariable("rcl.rg1.1")].lower = 1.0;
  const SolveResult shutResult = HighsBackend().solve(shut, defaultSettingsFor(shut.variant));
  if (shutResult.hasSolution())
    CHECK(valueOf(shut, shutResult.assignment, "q.rg1.1") == doctest::Approx(0.0));
}

TEST_CASE("node balances") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  const ModelInstance model = buildStationaryFixedModel(problem, 1, 0, 0);
  const Row& star = rowNamed(model, "balance.n1.1");
  CHECK(coefficient(model, star, "q.p1.1") == 1.0);
  CHECK(coefficient(model, star, "q.v1.1") == -1.0);
  CHECK(coefficient(model, star, "q.cs1.1") == -1.0);
  CHECK(star.terms.size() == 3);
  const Row& source = rowNamed(model, "balance.S.1");
  CHECK(coefficient(model, source, "d.S.1") == 1.0);
  CHECK(coefficient(model, source, "q.p1.1") == -1.0);
}

TEST_CASE("mode and direction coupling") {
  const Instance single = parseInstance(testing::twoNodeDocument());
  const StationProblem problem(single.spec, single.scenario, single.weights);
  const ModelInstance full = buildFullModel(problem);
  const SolveResult result = solveOptimal(full);
  CHECK(valueOf(full, result.assignment, "om.o.1") == doctest::Approx(1.0));
  CHECK(valueOf(full, result.assignment, "fd.f.1") == doctest::Approx(1.0));

  // A boundary node outside both sets of the chosen direction gets no inflow.
  auto document = testing::fixtureJson("mini_station.json");
  document["nodes"].push_back({{"id", "Y"}, {"kind", "boundary"}, {"pressureLB", 40}, {"pressureUB", 70}});
  document["arcs"].push_back({{"id", "r2"}, {"kind", "resistor"}, {"from", "n3"}, {"to", "Y"},
                              {"drag", 2.0}, {"diameter", 0.8}});
  document["fenceGroups"].push_back({{"id", "gY"}, {"nodes", {"Y"}}});
  document["scenario"]["flowDemand"]["gY"] = -20;
  document["scenario"]["inflowBounds"]["Y"] = {{"lower", -100}, {"upper", 0}};
  document["scenario"]["initialState"]["pressure"]["Y"] = 50;
  document["scenario"]["initialState"]["inflow"]["Y"] = 0;
  document["scenario"]["initialState"]["flow"]["r2"] = 0;
  const Instance extra = testing::withRanges(parseInstance(document), 2000);
  const StationProblem extraProblem(extra.spec, extra.scenario, extra.weights);
  const ModelInstance model = buildStationaryFixedModel(extraProblem, 1, 0, 0);
  const SolveResult extraResult = solveOptimal(model);
  CHECK(valueOf(model, extraResult.assignment, "d.Y.1") == doctest::Approx(0.0).epsilon(1e-9));
  // Demand of -20 at Y is then pure slack.
  CHECK(valueOf(model, extraResult.assignment, "sdp.Y.1") +
            valueOf(model, extraResult.assignment, "sdn.Y.1") ==
        doctest::Approx(units::volumetricToMassFlow(20.0, 0.785)));
}

TEST_CASE("slacks and change indicators") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);

  // Demands set to a feasible operating point: nothing to pay.
  const ModelInstance probe = buildStationaryFixedModel(problem, 1, 0, 0);
  const SolveResult probeResult = solveOptimal(probe);
  Instance calm = mini();
  for (const std::string node : {"S", "X"}) {
    calm.scenario.pressureDemand[calm.spec.nodeIndex(node)] =
        TimeSeries(units::barToPa(valueOf(probe, probeResult.assignment, "p." + node + ".1")));
  }
  const StationProblem calmProblem(calm.spec, calm.scenario, calm.weights);
  const ModelInstance stay = buildStationaryFixedModel(calmProblem, 1, 0, 0);
  const SolveResult stayResult = solveOptimal(stay);
  const ObjectiveBreakdown calmCost = stay.breakdown(stayResult.assignment);
  CHECK(calmCost[CostCategory::PressureSlack] == doctest::Approx(0.0));
  CHECK(calmCost[CostCategory::FlowSlack] == doctest::Approx(0.0));
  CHECK(calmCost[CostCategory::ModeChange] == 0.0);

  const ModelInstance change = buildFullModel(problem, {ModeSequence{{0, 1, 1, 1, 1}, {-1, 0, 0, 0, 0}}});
  const SolveResult changeResult = solveOptimal(change);
  CHECK(valueOf(change, changeResult.assignment, "dom.1") == doctest::Approx(1.0));
  for (const std::string name : {"dom.2", "dom.3", "dom.4"})
    CHECK(valueOf(change, changeResult.assignment, name) == doctest::Approx(0.0));
  CHECK(valueOf(change, changeResult.assignment, "dus.cs1.u1.1") == doctest::Approx(1.0));
  CHECK(valueOf(change, changeResult.assignment, "dus.cs1.u1.2") == doctest::Approx(0.0));
  const ObjectiveBreakdown cost = change.breakdown(changeResult.assignment);
  CHECK(cost[CostCategory::ModeChange] == doctest::Approx(1000.0));
  CHECK(cost[CostCategory::UnitStart] == doctest::Approx(1200.0));
  CHECK(cost.total() == doctest::Approx(changeResult.objective).epsilon(1e-9));
}

TEST_CASE("variant structure") {
  const Instance two = testing::withRanges(parseInstance(withSecondRegulator()), 2000);
  const StationProblem problem(two.spec, two.scenario, two.weights);
  WindowModes window;
  window.start = 0;
  window.startState = two.scenario.initialState;
  window.modes = {1};
  window.directions = {0};
  const ModelInstance transient = buildTransientFixedModel(problem, window);
  // closed / bypass / active per regulator plus one change indicator each
  CHECK(transient.binaryCount() == 2 * 3 * 1 + 2);

  const StationProblem miniProblem(mini().spec, mini().scenario, mini().weights);
  for (int mode = 0; mode < 2; ++mode) {
    const SolveResult restricted = solveOptimal(buildStationaryModel(miniProblem, 2, {mode}, 0));
    const SolveResult fixed = solveOptimal(buildStationaryFixedModel(miniProblem, 2, mode, 0));
    CHECK(restricted.objective == doctest::Approx(fixed.objective).epsilon(1e-6));
  }

  const ModelInstance full = buildFullModel(miniProblem);
  CHECK(full.variant == Variant::Full);
  const SolveResult result = solveOptimal(full);
  CHECK(checkAssignment(full, result.assignment).ok());
  CHECK(hasRow(full, "dom.4_lb0"));
  CHECK_FALSE(hasRow(buildStationaryFixedModel(miniProblem, 1, 0, 0), "drg.rg1.1_lb0"));
}

TEST_CASE("states round-trip through a model") {
  const StationProblem problem(mini().spec, mini().scenario, mini().weights);
  const ModeSequence sequence{{0, 1, 1, 1, 1}, {-1, 0, 0, 0, 0}};
  const ModelInstance full = buildFullModel(problem, {sequence});
  const SolveResult result = solveOptimal(full);
  const auto states = extractStates(problem, full, result.assignment);
  REQUIRE(states.size() == 4);
  std::vector<State> all{mini().scenario.initialState};
  all.insert(all.end(), states.begin(), states.end());
  const auto replay = assignmentFromPlan(problem, full, all, sequence);
  CHECK(checkAssignment(full, replay).ok());
  CHECK(full.objectiveValue(replay) == doctest::Approx(result.objective).epsilon(1e-6));
}
