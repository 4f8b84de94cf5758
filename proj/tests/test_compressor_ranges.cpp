#include <cmath>
#include <random>

#include <doctest.h>

#include "netstation/compressor_ranges.hpp"
#include "netstation/units.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netstation;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

GasConstants naturalGas() {
  GasConstants gas;
  gas.specificGasConstant = 518.28;
  gas.temperature = 283.15;
  gas.pseudoCriticalPressureBar = 46.5;
  gas.pseudoCriticalTemperature = 190.6;
  gas.normalDensity = 0.785;
  return gas;
}

CompressorUnit fixtureUnit() {
  CompressorUnit unit;
  unit.id = "u1";
  // 1 <= ratio <= 1.6, 0.05 <= Q <= 2 m^3/s.
  unit.operatingRange2D = {{-1.6, 0, 1}, {1, 0, -1}, {-2.0, 1, 0}, {0.05, -1, 0}};
  unit.maxPressureIncrease = units::barToPa(20.0);
  unit.maxPower = 3.0e6;
  unit.efficiency = 0.8;
  unit.inletZ = 0.88;
  return unit;
}

bool inside2D(const CompressorUnit& unit, double volumetric, double ratio) {
  for (const auto& [a0, a1, a2] : unit.operatingRange2D)
    if (a0 + a1 * volumetric + a2 * ratio > 1e-9) return false;
  return true;
}

double hausdorff(const HPolytope& polytope, const std::vector<VectorXd>& expected) {
  return oracle::vertexHausdorff(oracle::bruteVertices(polytope), expected);
}

bool sameRegion(const std::optional<HPolytope>& got, const std::vector<VectorXd>& expected) {
  return got && hausdorff(*got, expected) < 1e-7;
}

}  // namespace

TEST_CASE("lifting facets") {
  const GasConstants gas = naturalGas();
  CompressorUnit unit = fixtureUnit();
  const HPolytope lifted = liftUnitRange(unit, units::barToPa(30.0), units::barToPa(80.0), gas);
  REQUIRE(lifted.halfSpaces.size() == 7);

  // ratio <= 1.6 becomes -1.6 p_in + p_out <= 0.
  const auto& ratioCap = lifted.halfSpaces[0];
  CHECK((ratioCap.normal - Vector3d(-1.6, 1.0, 0.0)).norm() < 1e-15);
  CHECK(ratioCap.offset == 0.0);

  // Q <= 2 becomes R T z q - 2 p_in <= 0 (bar scaling on the flow term).
  const auto& flowCap = lifted.halfSpaces[2];
  const double rtz = 518.28 * 283.15 * 0.88 / 1e5;
  CHECK(flowCap.normal[0] == doctest::Approx(-2.0));
  CHECK(flowCap.normal[1] == 0.0);
  CHECK(flowCap.normal[2] == doctest::Approx(rtz).epsilon(1e-14));

  // Caps on the pressure increase and the end pressures.
  CHECK(lifted.contains(Vector3d(40.0, 59.0, 10.0)));
  CHECK_FALSE(lifted.contains(Vector3d(40.0, 61.0, 10.0)));
  CHECK_FALSE(lifted.contains(Vector3d(29.0, 30.0, 10.0)));

  // The slice at fixed inlet pressure reproduces the machine map.
  std::mt19937_64 rng(4);
  for (double inletBar : {35.0, 45.0, 60.0}) {
    std::uniform_real_distribution<double> ratio(0.9, 1.7);
    std::uniform_real_distribution<double> volumetric(0.0, 2.2);
    for (int k = 0; k < 400; ++k) {
      const double r = ratio(rng);
      const double qv = volumetric(rng);
      const double outletBar = r * inletBar;
      if (outletBar - inletBar > 20.0 - 1e-6 || outletBar > 80.0 - 1e-6) continue;
      const double massFlow = qv * units::barToPa(inletBar) / gas.rtz(unit.inletZ);
      const bool expected = inside2D(unit, qv, r);
      const double margin = std::min({std::abs(r - 1.0), std::abs(r - 1.6), std::abs(qv - 0.05),
                                      std::abs(qv - 2.0)});
      if (margin < 1e-9) continue;
      CHECK(lifted.contains(Vector3d(inletBar, outletBar, massFlow)) == expected);
    }
  }

  unit.operatingRange2D = {{-1.6, 0, 1}, {1, 0, -1}};  // no flow limits
  CHECK_THROWS_AS(liftUnitRange(unit, units::barToPa(30.0), units::barToPa(80.0), gas),
                  std::invalid_argument);
}

TEST_CASE("power bound") {
  const GasConstants gas = naturalGas();
  const CompressorUnit unit = fixtureUnit();
  const HPolytope lifted = liftUnitRange(unit, units::barToPa(30.0), units::barToPa(80.0), gas);
  const PowerFit fit = fitPowerModel(lifted, unit, gas, 20000, 17);
  CHECK(fit.maxSampledPower > 0.0);
  CHECK(fit.rmsResidual < 0.1 * fit.maxSampledPower);
  const PowerFit again = fitPowerModel(lifted, unit, gas, 20000, 17);
  CHECK(fit.coefficients == again.coefficients);

  // Independent samples through the rejection oracle give a similar fit.
  std::mt19937_64 rng(99);
  const auto vertices = enumerateVertices(lifted).vertices;
  Vector3d lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(Vector3d(v));
    hi = hi.cwiseMax(Vector3d(v));
  }
  std::vector<Vector3d> points;
  while (points.size() < 20000) {
    Vector3d p;
    for (int i = 0; i < 3; ++i) p[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    if (lifted.contains(p, 0.0)) points.push_back(p);
  }
  double squared = 0.0;
  for (const auto& p : points) {
    const double truth = oracle::power(p[2], p[0], p[1], unit.inletZ, unit.efficiency,
                                       gas.specificGasConstant, gas.temperature,
                                       gas.isentropicExponent);
    const double predicted = fit.coefficients[0] + fit.coefficients.tail<3>().dot(p);
    squared += (truth - predicted) * (truth - predicted);
  }
  CHECK(std::sqrt(squared / points.size()) < 0.1 * fit.maxSampledPower);

  // A sliver around ratio 1 draws almost no power: the bound never binds.
  CompressorUnit flat = unit;
  flat.operatingRange2D = {{-1.000001, 0, 1}, {1, 0, -1}, {-2.0, 1, 0}, {0.05, -1, 0}};
  const HPolytope sliver = liftUnitRange(flat, units::barToPa(30.0), units::barToPa(80.0), gas);
  const PowerFit idle = fitPowerModel(sliver, flat, gas, 5000, 3);
  CHECK(idle.maxSampledPower < 1e-4 * flat.maxPower);
  for (const auto& v : enumerateVertices(sliver).vertices) CHECK(idle.bound.evaluate(v) < 0.0);
}

TEST_CASE("parallel units") {
  const HPolytope b = oracle::box({{1, 2}, {2, 3}, {0, 5}});
  CHECK(sameRegion(stagePolytope({b}), oracle::bruteVertices(b)));
  const auto twin = stagePolytope({b, b});
  CHECK(sameRegion(twin, oracle::bruteVertices(oracle::box({{1, 2}, {2, 3}, {0, 10}}))));
  CHECK(sameRegion(twin, oracle::parallelOracle({b, b})));

  const HPolytope away = oracle::box({{4, 5}, {2, 3}, {0, 5}});
  CHECK_FALSE(stagePolytope({b, away}).has_value());
  CHECK_THROWS(stagePolytope({}));

  const HPolytope tilted = [&] {
    HPolytope h = oracle::box({{1, 3}, {1.5, 4}, {0, 6}});
    h.halfSpaces.push_back({Vector3d(-1, 1, 0.1), -1.2});
    return h;
  }();
  CHECK(sameRegion(stagePolytope({b, tilted}), oracle::parallelOracle({b, tilted})));
}

TEST_CASE("stages in series") {
  const HPolytope first = oracle::box({{1, 2}, {2, 3}, {0, 5}});
  const HPolytope second = oracle::box({{2.5, 4}, {4, 6}, {1, 8}});
  CHECK(sameRegion(configurationPolytope({first}), oracle::bruteVertices(first)));
  const auto chain = configurationPolytope({first, second});
  CHECK(sameRegion(chain, oracle::bruteVertices(oracle::box({{1, 2}, {4, 6}, {1, 5}}))));
  CHECK(sameRegion(chain, oracle::seriesOracle({first, second})));

  const HPolytope gap = oracle::box({{3.5, 4}, {4, 6}, {1, 8}});
  CHECK_FALSE(configurationPolytope({first, gap}).has_value());

  // Series order matters: a point admitted one way round but not the other.
  HPolytope a = oracle::box({{1, 3}, {1, 4}, {0, 6}});
  a.halfSpaces.push_back({Vector3d(-1.5, 1, 0), 0.0});  // ratio <= 1.5
  HPolytope c = oracle::box({{1, 4}, {2, 6}, {0, 3}});
  const auto ac = configurationPolytope({a, c});
  const auto ca = configurationPolytope({c, a});
  REQUIRE(ac);
  REQUIRE(ca);
  CHECK(sameRegion(ac, oracle::seriesOracle({a, c})));
  CHECK(sameRegion(ca, oracle::seriesOracle({c, a})));
  bool witness = false;
  for (const auto& v : oracle::bruteVertices(*ac))
    if (!ca->contains(v, 1e-7)) witness = true;
  for (const auto& v : oracle::bruteVertices(*ca))
    if (!ac->contains(v, 1e-7)) witness = true;
  CHECK(witness);
}

TEST_CASE("facets of the mini station") {
  Instance instance = testing::loadWithRanges("mini_station.json", 5000);
  const int arc = instance.spec.arcIndex("cs1");
  const auto& config = instance.spec.arcs[arc].station().configurations.front();
  REQUIRE_FALSE(config.facets.empty());
  for (const auto& f : config.facets)
    CHECK(std::hypot(f.w, f.x, f.y) == doctest::Approx(1.0).epsilon(1e-12));
  // Inlet 45 bar, outlet 55 bar, 60 kg/s is a comfortable operating point.
  for (const auto& f : config.facets) CHECK(f.w * 45 + f.x * 55 + f.y * 60 + f.z <= 0.0);

  const std::string hash = rangeInputHash(instance.spec, arc, 5000);
  CHECK(hash == rangeInputHash(instance.spec, arc, 5000));
  CHECK(hash != rangeInputHash(instance.spec, arc, 6000));
  instance.spec.arcs[arc].station().units[0].maxPower *= 2.0;
  CHECK(hash != rangeInputHash(instance.spec, arc, 5000));
  CHECK(defaultUnitSeed("u1") == defaultUnitSeed("u1"));
  CHECK(defaultUnitSeed("u1") != defaultUnitSeed("u2"));
}
