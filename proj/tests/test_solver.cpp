#include <filesystem>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "netstation/errors.hpp"
#include "netstation/model_builder.hpp"
#include "netstation/solver.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

ModelInstance boundedBelow(double bound) {
  ModelBuilder builder(Variant::Stationary, "one_var");
  const Quantity x = builder.addVariable("x", -100, 100, VarType::Continuous);
  builder.addCost(x, 1.0, CostCategory::PressureSlack);
  builder.addGreaterEqual("x_lb", LinExpr(x), bound);
  return std::move(builder).finish();
}

ModelInstance contradiction() {
  ModelBuilder builder(Variant::Stationary, "clash");
  const Quantity x = builder.addVariable("x", -10, 10, VarType::Continuous);
  builder.addCost(x, 1.0, CostCategory::PressureSlack);
  builder.addLessEqual("x_ub", LinExpr(x), 0.0);
  builder.addGreaterEqual("x_lb", LinExpr(x), 1.0);
  return std::move(builder).finish();
}

ModelInstance knapsack() {
  ModelBuilder builder(Variant::Stationary, "knap");
  const Quantity a = builder.addBinary("a", CostCategory::ModeChange);
  const Quantity b = builder.addBinary("b", CostCategory::ModeChange);
  const Quantity c = builder.addBinary("c", CostCategory::ModeChange);
  builder.addCost(a, -5.0, CostCategory::ModeChange);
  builder.addCost(b, -4.0, CostCategory::ModeChange);
  builder.addCost(c, -3.0, CostCategory::ModeChange);
  builder.addLessEqual("weight", 2.0 * LinExpr(a) + 3.0 * LinExpr(b) + 1.0 * LinExpr(c), 4.0);
  builder.addRow("range", LinExpr(a) + LinExpr(b), 0.0, 2.0);
  return std::move(builder).finish();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("netstation_test_solver_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("settings per variant") {
  const SolveSettings stationary = defaultSettingsFor(Variant::Stationary);
  CHECK(stationary.relativeGap == 1e-4);
  CHECK(stationary.absoluteGap == 1e-2);
  CHECK(stationary.timeLimit == 36000.0);
  CHECK(defaultSettingsFor(Variant::StationaryFixed) == stationary);
  const SolveSettings transient = defaultSettingsFor(Variant::TransientFixed);
  CHECK(transient.relativeGap == 5e-3);
  CHECK(transient.absoluteGap == 1e-2);
  CHECK(transient.timeLimit == 60.0);
  const SolveSettings full = defaultSettingsFor(Variant::Full);
  CHECK(full.relativeGap == stationary.relativeGap);
  CHECK(full.absoluteGap == stationary.absoluteGap);

  SolveSettings bad = stationary;
  bad.relativeGap = -1.0;
  CHECK_THROWS_AS(checkSettings(bad), std::invalid_argument);
  bad = stationary;
  bad.threads = 0;
  CHECK_THROWS_AS(checkSettings(bad), std::invalid_argument);
}

TEST_CASE("statuses") {
  for (auto status : {SolveStatus::Optimal, SolveStatus::Feasible, SolveStatus::Infeasible,
                      SolveStatus::TimeLimit, SolveStatus::Error})
    CHECK(parseStatus(statusName(status)) == status);
  CHECK_THROWS_AS(parseStatus("bogus"), NetstationError);
}

TEST_CASE("in-process backend") {
  const HighsBackend backend;
  const SolveResult one = backend.solve(boundedBelow(3.0), defaultSettingsFor(Variant::Stationary));
  CHECK(one.status == SolveStatus::Optimal);
  CHECK(one.objective == doctest::Approx(3.0));
  REQUIRE(one.assignment.size() == 1);
  CHECK(one.assignment[0] == doctest::Approx(3.0));

  const SolveResult none = backend.solve(contradiction(), defaultSettingsFor(Variant::Stationary));
  CHECK(none.status == SolveStatus::Infeasible);
  CHECK_FALSE(none.hasSolution());

  const SolveResult knap = backend.solve(knapsack(), defaultSettingsFor(Variant::Stationary));
  CHECK(knap.status == SolveStatus::Optimal);
  CHECK(knap.objective == doctest::Approx(-8.0));
  CHECK(knap.bound <= knap.objective + 1e-9);
}

TEST_CASE("hand enumeration of the stationary choice") {
  const Instance instance = testing::loadWithRanges("mini_station.json", 5000);
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);
  const HighsBackend backend;
  for (std::size_t t = 1; t < problem.positions(); ++t) {
    const SolveResult free = backend.solve(buildStationaryModel(problem, t, {0, 1}, 0),
                                           defaultSettingsFor(Variant::Stationary));
    REQUIRE(free.hasSolution());
    double best = std::numeric_limits<double>::infinity();
    for (int mode = 0; mode < 2; ++mode) {
      for (int direction : instance.spec.directionsOf(mode)) {
        ModelInstance fixed = buildStationaryFixedModel(problem, t, mode, 0);
        const int fd = fixed.findVariable("fd." + instance.spec.directions[direction].id + "." +
                                          std::to_string(t));
        if (fd >= 0) fixed.variables[fd].lower = 1.0;
        const SolveResult r = backend.solve(fixed, defaultSettingsFor(Variant::StationaryFixed));
        if (r.hasSolution()) best = std::min(best, r.objective);
      }
    }
    CHECK(free.objective == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("assignment check") {
  const ModelInstance model = knapsack();
  CHECK(checkAssignment(model, {1, 0, 1}).ok());
  const CheckReport over = checkAssignment(model, {1, 1, 1});
  CHECK_FALSE(over.ok());
  CHECK(over.worstEntity == "weight");
  CHECK(over.worstViolation == doctest::Approx(2.0 / 4.0));
  const CheckReport fractional = checkAssignment(model, {0.5, 0, 0});
  CHECK_FALSE(fractional.ok());
  CHECK_FALSE(checkAssignment(model, {2, 0, 0}).ok());
}

TEST_CASE("LP text") {
  const Instance instance = testing::loadWithRanges("mini_station.json", 2000);
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);
  const std::string first = writeLp(buildFullModel(problem));
  const std::string second = writeLp(buildFullModel(problem));
  CHECK(first == second);
  CHECK(first.find("Minimize") != std::string::npos);
  CHECK(first.find("General") != std::string::npos);
  CHECK(first.find("End") != std::string::npos);

  const std::string ranged = writeLp(knapsack());
  CHECK(ranged.find("range.lo") != std::string::npos);
  CHECK(ranged.find("range.hi") != std::string::npos);
}

TEST_CASE("solution text round trip") {
  const ModelInstance model = knapsack();
  SolveResult result;
  result.status = SolveStatus::Optimal;
  result.objective = -8.0;
  result.bound = -8.0;
  result.assignment = {1, 0, 1};
  std::stringstream text;
  std::vector<std::string> names;
  for (const auto& v : model.variables) names.push_back(v.name);
  writeSolutionText(text, result, names);
  const SolveResult back = readSolutionText(text, model);
  CHECK(back.status == SolveStatus::Optimal);
  CHECK(back.assignment == result.assignment);
  CHECK(back.objective == doctest::Approx(-8.0));

  std::stringstream partial("#status: optimal\na 1\nb 0\n");
  CHECK(readSolutionText(partial, model).status == SolveStatus::Error);
}

TEST_CASE("external solver through files") {
  const FileBackend backend(NETSTATION_LPSOLVE, scratch("file"));
  const SolveResult knap = backend.solve(knapsack(), defaultSettingsFor(Variant::Stationary));
  CHECK(knap.status == SolveStatus::Optimal);
  CHECK(knap.objective == doctest::Approx(-8.0));
  CHECK(backend.solve(contradiction(), defaultSettingsFor(Variant::Stationary)).status ==
        SolveStatus::Infeasible);

  const Instance instance = testing::loadWithRanges("mini_station.json", 2000);
  const StationProblem problem(instance.spec, instance.scenario, instance.weights);
  const ModelInstance model = buildStationaryFixedModel(problem, 2, 1, 0);
  const SolveResult viaFile = backend.solve(model, defaultSettingsFor(model.variant));
  const SolveResult inProcess = HighsBackend().solve(model, defaultSettingsFor(model.variant));
  REQUIRE(viaFile.hasSolution());
  CHECK(viaFile.objective == doctest::Approx(inProcess.objective).epsilon(1e-6));
  CHECK(checkAssignment(model, viaFile.assignment).ok());

  const FileBackend missing("/nonexistent/solver", scratch("missing"));
  CHECK(missing.solve(knapsack(), defaultSettingsFor(Variant::Stationary)).status ==
        SolveStatus::Error);
}
