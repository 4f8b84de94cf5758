#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "netstation/compressor_ranges.hpp"
#include "netstation/io.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(NETSTATION_FIXTURE_DIR) / name;
}

inline nlohmann::json fixtureJson(const std::string& name) {
  return netstation::readJson(fixture(name));
}

/// Instance with configuration facets built (fewer power samples for speed
/// unless stated).
inline netstation::Instance loadWithRanges(const std::string& name,
                                           std::size_t samples = netstation::kDefaultPowerSamples) {
  netstation::Instance instance = netstation::loadInstance(fixture(name));
  netstation::buildConfigurationRanges(instance.spec, {samples, std::nullopt});
  return instance;
}

inline netstation::Instance withRanges(netstation::Instance instance,
                                       std::size_t samples = netstation::kDefaultPowerSamples) {
  netstation::buildConfigurationRanges(instance.spec, {samples, std::nullopt});
  return instance;
}

/// Two boundary nodes joined by one pipe, one mode, one direction.
inline nlohmann::json twoNodeDocument() {
  return nlohmann::json::parse(R"({
    "name": "pipe_only",
    "gas": {"specificGasConstant": 518.28, "temperature": 283.15, "pseudoCriticalPressure": 46.5,
            "pseudoCriticalTemperature": 190.6, "normalDensity": 0.785},
    "nodes": [
      {"id": "A", "kind": "boundary", "pressureLB": 40, "pressureUB": 70},
      {"id": "B", "kind": "boundary", "pressureLB": 40, "pressureUB": 70}
    ],
    "arcs": [
      {"id": "p", "kind": "pipe", "from": "A", "to": "B", "length": 1000, "diameter": 0.5,
       "roughness": 1e-5, "slope": 0}
    ],
    "units": [], "configurations": [],
    "operationModes": [{"id": "o", "assignment": {}}],
    "flowDirections": [{"id": "f", "inflow": ["A"], "outflow": ["B"]}],
    "validPairs": [["o", "f"]],
    "fenceGroups": [{"id": "gA", "nodes": ["A"]}, {"id": "gB", "nodes": ["B"]}],
    "transitionTimes": {"o": {"o": 0}},
    "unavailability": [],
    "scenario": {
      "timeGrid": [0, 30],
      "pressureDemand": {"A": 60, "B": 55},
      "flowDemand": {"gA": 50, "gB": -50},
      "inflowBounds": {"A": {"lower": 0, "upper": 100}, "B": {"lower": -100, "upper": 0}},
      "initialState": {"mode": "o", "pressure": {"A": 60, "B": 59.9}, "inflow": {"A": 50, "B": -50},
                       "flow": {"p": 50}, "regulatorModes": {}}
    }
  })");
}

}  // namespace testing
