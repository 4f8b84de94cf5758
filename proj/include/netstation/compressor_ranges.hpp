#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netstation/network.hpp"
#include "netstation/polytope.hpp"

// Operating ranges of compressor units and configurations as 3-D polytopes in
// (inlet pressure [bar], outlet pressure [bar], mass flow [kg/s]).

namespace netstation {

inline constexpr std::size_t kDefaultPowerSamples = 50000;

/// Lifts the unit's (Q, ratio) facets to 3-D and appends the caps
/// p_out - p_in <= maxPressureIncrease, p_in >= inletLB, p_out <= outletUB.
HPolytope liftUnitRange(const CompressorUnit& unit, double inletLB, double outletUB,
                        const GasConstants& gas);

struct PowerFit {
  Eigen::Vector4d coefficients;  // W over (1, p_in, p_out, q)
  HalfSpace bound;
  double rmsResidual = 0.0;
  double maxSampledPower = 0.0;
};

PowerFit fitPowerModel(const HPolytope& lifted, const CompressorUnit& unit,
                       const GasConstants& gas, std::size_t samples, std::uint64_t seed);

/// fitted power(p_in, p_out, q) - maxPower <= 0
HalfSpace linearizePowerBound(const HPolytope& lifted, const CompressorUnit& unit,
                              const GasConstants& gas,
                              std::size_t samples = kDefaultPowerSamples,
                              std::uint64_t seed = 0);

/// Parallel units: shared pressures, flows add up. nullopt when empty.
std::optional<HPolytope> stagePolytope(const std::vector<HPolytope>& units);

/// Stages in series: outlet of one stage is the inlet of the next, same flow.
std::optional<HPolytope> configurationPolytope(const std::vector<HPolytope>& stages);

std::vector<ConfigurationFacet> toFacets(const HPolytope& polytope);

std::uint64_t defaultUnitSeed(const std::string& unitId);

/// FNV-1a over everything the station's ranges depend on.
std::string rangeInputHash(const StationSpec& spec, int arc, std::size_t samples);

struct RangeBuildOptions {
  std::size_t samples = kDefaultPowerSamples;
  std::optional<std::uint64_t> seed;  // per-unit default otherwise
};

/// Fills Configuration::facets of every station. Empty configurations come
/// back as violations and keep no facets.
std::vector<Violation> buildConfigurationRanges(StationSpec& spec,
                                                const RangeBuildOptions& options = {});

}  // namespace netstation
