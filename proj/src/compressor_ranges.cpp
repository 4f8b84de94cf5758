#include "netstation/compressor_ranges.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "netstation/units.hpp"

namespace netstation {

namespace {

Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

// Lifts a half-space on (p_in, p_out, q) into a larger space.
HalfSpace embed(const HalfSpace& h, int dimension, int inlet, int outlet,
                const std::vector<std::pair<int, double>>& flowTerms) {
  HalfSpace out{Eigen::VectorXd::Zero(dimension), h.offset};
  out.normal[inlet] += h.normal[0];
  out.normal[outlet] += h.normal[1];
  for (const auto& [index, factor] : flowTerms) out.normal[index] += factor * h.normal[2];
  return out;
}

std::optional<HPolytope> reduce(HPolytope polytope, const std::vector<int>& eliminate) {
  try {
    if (eliminate.empty()) return removeRedundant(polytope);
    return projectOut(polytope, eliminate);
  } catch (const InfeasiblePolytope&) {
    return std::nullopt;
  }
}

}  // namespace

HPolytope liftUnitRange(const CompressorUnit& unit, double inletLB, double outletUB,
                        const GasConstants& gas) {
  if (unit.operatingRange2D.empty()) {
    throw std::invalid_argument("unit '" + unit.id + "' has no operating range facets");
  }
  if (!(unit.maxPressureIncrease > 0.0 && inletLB > 0.0 && outletUB > 0.0)) {
    throw std::invalid_argument("lifting caps must be positive");
  }
  // a0 + a1 Q + a2 p_out/p_in <= 0 times p_in, with Q = R T z q / p_in, in bar.
  const double flowFactor = gas.rtz(unit.inletZ) / units::kPaPerBar;
  HPolytope out{3, {}};
  for (const auto& [a0, a1, a2] : unit.operatingRange2D) {
    out.halfSpaces.push_back({vec3(a0, a2, a1 * flowFactor), 0.0});
  }
  out.halfSpaces.push_back({vec3(-1.0, 1.0, 0.0), -units::paToBar(unit.maxPressureIncrease)});
  out.halfSpaces.push_back({vec3(-1.0, 0.0, 0.0), units::paToBar(inletLB)});
  out.halfSpaces.push_back({vec3(0.0, 1.0, 0.0), -units::paToBar(outletUB)});
  try {
    enumerateVertices(out);
  } catch (const UnboundedPolytope&) {
    throw std::invalid_argument("operating range of unit '" + unit.id + "' is unbounded");
  }
  return out;
}

PowerFit fitPowerModel(const HPolytope& lifted, const CompressorUnit& unit,
                       const GasConstants& gas, std::size_t samples, std::uint64_t seed) {
  const VPolytope vertices = enumerateVertices(lifted);
  const auto points = sampleUniform(vertices, samples, seed);
  Eigen::MatrixX3d design(points.size(), 3);
  Eigen::VectorXd power(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    design.row(static_cast<Eigen::Index>(i)) = p.transpose();
    // Sample points hugging the facets may sit a rounding error outside the
    // formula's domain.
    const double inlet = units::barToPa(p[0]);
    const double outlet = std::max(units::barToPa(p[1]), inlet);
    const double flow = std::max(p[2], 0.0);
    power[static_cast<Eigen::Index>(i)] =
        compressionPower(flow, inlet, outlet, unit.inletZ, unit.efficiency, gas);
  }
  PowerFit fit;
  fit.coefficients = leastSquaresHyperplane(design, power);
  const Eigen::VectorXd predicted =
      (design * fit.coefficients.tail<3>()).array() + fit.coefficients[0];
  fit.rmsResidual = std::sqrt((power - predicted).squaredNorm() / static_cast<double>(power.size()));
  fit.maxSampledPower = power.maxCoeff();
  fit.bound = {fit.coefficients.tail<3>(), fit.coefficients[0] - unit.maxPower};
  return fit;
}

HalfSpace linearizePowerBound(const HPolytope& lifted, const CompressorUnit& unit,
                              const GasConstants& gas, std::size_t samples, std::uint64_t seed) {
  return fitPowerModel(lifted, unit, gas, samples, seed).bound;
}

std::optional<HPolytope> stagePolytope(const std::vector<HPolytope>& units) {
  if (units.empty()) throw std::invalid_argument("a stage needs at least one unit");
  const int k = static_cast<int>(units.size());
  // Coordinates: p_in, p_out, q, then q_1 .. q_{k-1}; q_k = q - sum of the others.
  const int dimension = 3 + k - 1;
  HPolytope product{dimension, {}};
  for (int u = 0; u < k; ++u) {
    std::vector<std::pair<int, double>> flow;
    if (u + 1 < k) {
      flow = {{3 + u, 1.0}};
    } else {
      flow = {{2, 1.0}};
      for (int other = 0; other + 1 < k; ++other) flow.emplace_back(3 + other, -1.0);
    }
    for (const auto& h : units[u].halfSpaces) {
      product.halfSpaces.push_back(embed(h, dimension, 0, 1, flow));
    }
  }
  std::vector<int> eliminate;
  for (int c = 3; c < dimension; ++c) eliminate.push_back(c);
  return reduce(std::move(product), eliminate);
}

std::optional<HPolytope> configurationPolytope(const std::vector<HPolytope>& stages) {
  if (stages.empty()) throw std::invalid_argument("a configuration needs at least one stage");
  const int n = static_cast<int>(stages.size());
  // Coordinates: p_in, p_out, q, then the n - 1 intermediate pressures.
  const int dimension = 3 + n - 1;
  HPolytope product{dimension, {}};
  for (int s = 0; s < n; ++s) {
    const int inlet = s == 0 ? 0 : 3 + s - 1;
    const int outlet = s + 1 == n ? 1 : 3 + s;
    for (const auto& h : stages[s].halfSpaces) {
      product.halfSpaces.push_back(embed(h, dimension, inlet, outlet, {{2, 1.0}}));
    }
  }
  std::vector<int> eliminate;
  for (int c = 3; c < dimension; ++c) eliminate.push_back(c);
  return reduce(std::move(product), eliminate);
}

std::vector<ConfigurationFacet> toFacets(const HPolytope& polytope) {
  if (polytope.dimension != 3) throw std::invalid_argument("configuration facets are 3-D");
  std::vector<ConfigurationFacet> out;
  for (const auto& h : polytope.halfSpaces) {
    const HalfSpace n = h.normalized();
    out.push_back({n.normal[0], n.normal[1], n.normal[2], n.offset});
  }
  return out;
}

std::uint64_t defaultUnitSeed(const std::string& unitId) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : unitId) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string rangeInputHash(const StationSpec& spec, int arc, std::size_t samples) {
  std::ostringstream text;
  text << std::setprecision(17);
  const Arc& a = spec.arcs.at(arc);
  const auto& station = a.station();
  text << a.id << '|' << samples << '|' << spec.gas.specificGasConstant << '|'
       << spec.gas.temperature << '|' << spec.gas.isentropicExponent << '|'
       << spec.nodes[a.from].pressureLB.min() << '|' << spec.nodes[a.to].pressureUB.max();
  for (const auto& unit : station.units) {
    text << "|u:" << unit.id << ',' << unit.maxPressureIncrease << ',' << unit.maxPower << ','
         << unit.efficiency << ',' << unit.inletZ;
    for (const auto& f : unit.operatingRange2D) text << ',' << f[0] << ',' << f[1] << ',' << f[2];
  }
  for (const auto& config : station.configurations) {
    text << "|c:" << config.id;
    for (const auto& stage : config.stages) {
      text << '/';
      for (int u : stage) text << u << ',';
    }
  }
  return std::to_string(defaultUnitSeed(text.str()));
}

std::vector<Violation> buildConfigurationRanges(StationSpec& spec,
                                                const RangeBuildOptions& options) {
  std::vector<Violation> problems;
  for (int a : spec.arcsOfKind(ArcKind::CompressorStation)) {
    Arc& arc = spec.arcs[a];
    const double inletLB = spec.nodes[arc.from].pressureLB.min();
    const double outletUB = spec.nodes[arc.to].pressureUB.max();
    auto& station = arc.station();
    std::vector<HPolytope> unitRanges;
    for (const auto& unit : station.units) {
      HPolytope lifted = liftUnitRange(unit, inletLB, outletUB, spec.gas);
      const std::uint64_t seed = options.seed.value_or(defaultUnitSeed(unit.id));
      lifted.halfSpaces.push_back(
          linearizePowerBound(lifted, unit, spec.gas, options.samples, seed));
      unitRanges.push_back(std::move(lifted));
    }
    for (auto& config : station.configurations) {
      config.facets.clear();
      std::vector<HPolytope> stages;
      bool empty = false;
      for (const auto& stage : config.stages) {
        std::vector<HPolytope> members;
        for (int u : stage) members.push_back(unitRanges.at(u));
        auto range = stagePolytope(members);
        if (!range) {
          empty = true;
          break;
        }
        stages.push_back(std::move(*range));
      }
      std::optional<HPolytope> region;
      if (!empty) region = configurationPolytope(stages);
      if (!region) {
        problems.push_back({"arc '" + arc.id + "' configuration '" + config.id + "'",
                            "operating range is empty"});
        continue;
      }
      config.facets = toFacets(*region);
    }
  }
  return problems;
}

}  // namespace netstation
