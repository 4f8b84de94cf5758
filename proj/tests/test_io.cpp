#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "netstation/errors.hpp"
#include "netstation/io.hpp"
#include "netstation/units.hpp"
#include "support.hpp"

using namespace netstation;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("netstation_test_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("bundled fixtures load") {
  for (const std::string name : {"mini_station.json", "mini_day.json", "mini_outage.json", "trio_station.json"}) {
    const Instance instance = loadInstance(testing::fixture(name));
    CHECK(validate(instance.spec, instance.scenario).empty());
  }
  const Instance mini = loadInstance(testing::fixture("mini_station.json"));
  const int source = mini.spec.nodeIndex("S");
  CHECK(mini.scenario.initialState.pressure[source] == doctest::Approx(units::barToPa(50.0)));
  CHECK(mini.scenario.timeGrid[1] == doctest::Approx(900.0));
  const auto& unit = mini.spec.arcs[mini.spec.arcIndex("cs1")].station().units[0];
  CHECK(unit.maxPower == doctest::Approx(3.0e6));
  CHECK(unit.maxPressureIncrease == doctest::Approx(units::barToPa(20.0)));
  CHECK(mini.weights == ObjectiveWeights{});
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(loadInstance(testing::fixture("bad_missing_theta.json")), SchemaError);
  CHECK_THROWS_AS(loadInstance(testing::fixture("does_not_exist.json")), NetstationError);

  auto document = testing::fixtureJson("mini_station.json");
  document["arcs"][0]["kind"] = "teleporter";
  CHECK_THROWS_AS(parseInstance(document), SchemaError);

  document = testing::fixtureJson("mini_station.json");
  document["arcs"][0].erase("length");
  CHECK_THROWS_AS(parseInstance(document), SchemaError);

  document = testing::fixtureJson("mini_station.json");
  document["scenario"]["pressureDemand"]["X"] = {50, 50};
  CHECK_THROWS_AS(parseInstance(document), SchemaError);

  document = testing::fixtureJson("mini_station.json");
  document["weights"] = {{"modeChange", -1.0}};
  CHECK_THROWS_AS(parseInstance(document), SchemaError);
}

TEST_CASE("canonical round trip") {
  for (const std::string name : {"mini_station.json", "trio_station.json", "mini_outage.json"}) {
    const Instance original = loadInstance(testing::fixture(name));
    const auto path = scratch("roundtrip") / name;
    saveInstance(original, path);
    const Instance back = loadInstance(path);
    CHECK(back == original);
    CHECK(instanceToJson(back) == instanceToJson(original));
  }
}

TEST_CASE("grid templates") {
  for (int steps : {12, 24, 48, 96}) {
    const TimeGridTemplate t = timeGridTemplate(steps);
    CHECK(t.steps() == static_cast<std::size_t>(steps));
    const auto grid = t.grid();
    CHECK(grid.size() == static_cast<std::size_t>(steps) + 1);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(12.0 * 3600.0));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
  }
  CHECK_THROWS_AS(timeGridTemplate(13), std::invalid_argument);
}

TEST_CASE("resampling") {
  const std::vector<double> grid{0, 10, 20};
  CHECK(interpolate(grid, {1, 3, 7}, 5) == doctest::Approx(2.0));
  CHECK(interpolate(grid, {1, 3, 7}, 20) == 7.0);
  CHECK_THROWS(interpolate(grid, {1, 3, 7}, 21));

  const Instance day = loadInstance(testing::fixture("mini_day.json"));
  const Instance same = retime(day, day.scenario.timeGrid);
  CHECK(same == day);

  // Every series keeps its envelope: a 15-step grid refined to 96 steps.
  std::vector<double> coarse;
  for (int i = 0; i <= 15; ++i) coarse.push_back(i * 48.0 * 60.0);
  const Instance fifteen = retime(day, coarse);
  const Instance fine = retime(fifteen, timeGridTemplate(96).grid());
  CHECK(fine.scenario.positions() == 97);
  for (std::size_t v = 0; v < day.spec.nodes.size(); ++v) {
    const TimeSeries& source = fifteen.scenario.pressureDemand[v];
    const TimeSeries& target = fine.scenario.pressureDemand[v];
    if (source.empty()) continue;
    CHECK(target.min() >= source.min() - 1e-9);
    CHECK(target.max() <= source.max() + 1e-9);
    CHECK(target.min() == doctest::Approx(source.min()));
    CHECK(target.max() == doctest::Approx(source.max()));
  }
  // Midpoint of a linear ramp.
  std::vector<double> mids;
  const auto& raw = day.scenario.timeGrid;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    mids.push_back(raw[i]);
    if (i + 1 < raw.size()) mids.push_back(0.5 * (raw[i] + raw[i + 1]));
  }
  const Instance doubled = retime(day, mids);
  const int exit = day.spec.nodeIndex("X");
  for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
    const double a = day.scenario.pressureDemand[exit].at(i);
    const double b = day.scenario.pressureDemand[exit].at(i + 1);
    CHECK(doubled.scenario.pressureDemand[exit].at(2 * i + 1) == doctest::Approx(0.5 * (a + b)));
  }
}

TEST_CASE("unit conversion") {
  CHECK(units::massFlowToVolumetric(0.0, 0.8) == 0.0);
  CHECK(units::massFlowToVolumetric(1.0, 0.8) == doctest::Approx(4.5));
  CHECK(units::barToPa(1.0) == 1e5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> value(-500, 500);
  for (int i = 0; i < 100; ++i) {
    const double x = value(rng);
    CHECK(std::abs(units::paToBar(units::barToPa(x)) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    CHECK(std::abs(units::volumetricToMassFlow(units::massFlowToVolumetric(x, 0.785), 0.785) - x) <=
          1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("range cache") {
  Instance built = testing::loadWithRanges("mini_station.json", 3000);
  const auto cache = rangesToJson(built.spec, 3000);
  Instance fresh = loadInstance(testing::fixture("mini_station.json"));
  CHECK(applyRanges(fresh.spec, cache, 3000).empty());
  const int arc = built.spec.arcIndex("cs1");
  CHECK(fresh.spec.arcs[arc].station().configurations[0].facets ==
        built.spec.arcs[arc].station().configurations[0].facets);

  Instance stale = loadInstance(testing::fixture("mini_station.json"));
  stale.spec.arcs[arc].station().units[0].efficiency = 0.7;
  CHECK(applyRanges(stale.spec, cache, 3000) == std::vector<std::string>{"cs1"});
  CHECK(applyRanges(stale.spec, cache, 4000) == std::vector<std::string>{"cs1"});
  CHECK(rangeCachePath("/a/b/station.json").filename() == "station.ranges.json");
}
