#include <algorithm>

#include <doctest.h>

#include "netstation/errors.hpp"
#include "netstation/io.hpp"
#include "netstation/network.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

bool mentions(const std::vector<Violation>& violations, const std::string& text) {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
    return v.entity.find(text) != std::string::npos || v.rule.find(text) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("minimal pipe station is valid") {
  const Instance instance = parseInstance(testing::twoNodeDocument());
  CHECK(validate(instance.spec, instance.scenario).empty());
  CHECK(instance.spec.nodes.size() == 2);
  CHECK(instance.spec.arcs.size() == 1);
}

TEST_CASE("mini fixture is valid") {
  const Instance instance = loadInstance(testing::fixture("mini_station.json"));
  CHECK(validate(instance.spec, instance.scenario).empty());
  CHECK(instance.spec.modes.size() == 2);
  CHECK(instance.scenario.positions() == 5);
  CHECK(instance.scenario.timeGrid.back() == doctest::Approx(3600.0));
}

TEST_CASE("overlapping direction sets are rejected") {
  Instance instance = parseInstance(testing::twoNodeDocument());
  instance.spec.directions[0].outflowNodes.push_back(instance.spec.nodeIndex("A"));
  const auto violations = validate(instance.spec, instance.scenario);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule == "node is both inflow and outflow");

  auto document = testing::twoNodeDocument();
  document["flowDirections"][0]["outflow"].push_back("A");
  CHECK_THROWS_AS(parseInstance(document), SchemaError);
}

TEST_CASE("missing valve assignment names the valve") {
  Instance instance = loadInstance(testing::fixture("mini_station.json"));
  const int valve = instance.spec.arcIndex("v1");
  instance.spec.modes[0].assignment[valve].reset();
  const auto violations = validate(instance.spec, instance.scenario);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule.find("'v1'") != std::string::npos);
  CHECK(violations[0].entity.find("oValve") != std::string::npos);
}

TEST_CASE("other structural rules") {
  Instance base = loadInstance(testing::fixture("mini_station.json"));

  Instance bad = base;
  bad.spec.transitionTimes[0].pop_back();
  CHECK(mentions(validate(bad.spec, bad.scenario), "transition times"));

  bad = base;
  bad.spec.transitionTimes[0][1] = -1.0;
  CHECK(mentions(validate(bad.spec, bad.scenario), "negative entry"));

  bad = base;
  bad.scenario.timeGrid[2] = bad.scenario.timeGrid[1];
  CHECK(mentions(validate(bad.spec, bad.scenario), "strictly increasing"));

  bad = base;
  bad.spec.validPairs.clear();
  CHECK(mentions(validate(bad.spec, bad.scenario), "no valid"));

  bad = base;
  bad.spec.arcs[bad.spec.arcIndex("p1")].data = PipeData{100.0, 0.5, 0.6, 0.0};
  CHECK(mentions(validate(bad.spec, bad.scenario), "roughness"));

  bad = base;
  bad.spec.fenceGroups[0].nodes.push_back(bad.spec.nodeIndex("n1"));
  CHECK(mentions(validate(bad.spec, bad.scenario), "not a boundary node"));

  auto document = testing::fixtureJson("mini_station.json");
  document["nodes"][1]["id"] = "S";
  CHECK_THROWS_AS(parseInstance(document), SchemaError);
}

TEST_CASE("mode availability") {
  const Instance instance = loadInstance(testing::fixture("mini_station.json"));
  const auto& grid = instance.scenario.timeGrid;
  for (int o = 0; o < 2; ++o)
    for (std::size_t t = 0; t < grid.size(); ++t) CHECK(modeAvailable(instance.spec, grid, o, t));

  StationSpec spec = instance.spec;
  const int station = spec.arcIndex("cs1");
  spec.outages.push_back({station, 0, 15.0 * 60.0, 30.0 * 60.0});
  const int valveMode = spec.modeIndex("oValve");
  const int compressorMode = spec.modeIndex("oComp");
  for (std::size_t t = 0; t < grid.size(); ++t) CHECK(modeAvailable(spec, grid, valveMode, t));
  CHECK(modeAvailable(spec, grid, compressorMode, 0));
  CHECK_FALSE(modeAvailable(spec, grid, compressorMode, 1));
  CHECK(modeAvailable(spec, grid, compressorMode, 2));

  // Window touching only the last position.
  spec.outages.back() = {station, 0, 60.0 * 60.0, 70.0 * 60.0};
  CHECK(modeAvailable(spec, grid, compressorMode, 3));
  CHECK_FALSE(modeAvailable(spec, grid, compressorMode, 4));
}

TEST_CASE("mode lookup") {
  const Instance instance = loadInstance(testing::fixture("mini_station.json"));
  const StationSpec& spec = instance.spec;
  const int valve = spec.arcIndex("v1");
  const int station = spec.arcIndex("cs1");
  CHECK(modeOf(spec, spec.modeIndex("oValve"), valve) == ModeToken::open());
  CHECK(modeOf(spec, spec.modeIndex("oComp"), valve) == ModeToken::closed());
  CHECK(modeOf(spec, spec.modeIndex("oComp"), station) == ModeToken::active(0));
  CHECK(modeOf(spec, spec.modeIndex("oValve"), station) == ModeToken::closed());
  CHECK_THROWS_AS(modeOf(spec, 0, spec.arcIndex("p1")), NetstationError);

  const auto active = stationSetting(spec, spec.modeIndex("oComp"), station);
  CHECK_FALSE(active.bypass);
  CHECK_FALSE(active.closed);
  CHECK(active.configuration == 0);
  CHECK(stationSetting(spec, spec.modeIndex("oValve"), station).closed);

  CHECK(spec.unitsInUse(spec.modeIndex("oComp")).size() == 1);
  CHECK(spec.unitsInUse(spec.modeIndex("oValve")).empty());
  CHECK(spec.transitionTime(0, 1) == doctest::Approx(600.0));
  CHECK_THROWS_AS(spec.nodeIndex("nowhere"), NetstationError);
}

TEST_CASE("fixed valves are resolved at load") {
  auto document = testing::fixtureJson("mini_station.json");
  document["operationModes"][0]["assignment"]["v1"] = "closed";
  const Instance closedEverywhere = parseInstance(document);
  CHECK(closedEverywhere.spec.findArc("v1") == -1);
  CHECK(closedEverywhere.spec.rewrite.removedArcs == std::vector<std::string>{"v1"});
}
