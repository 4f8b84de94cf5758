#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "netstation/physics.hpp"
#include "netstation/units.hpp"
#include "oracles.hpp"

using namespace netstation;

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

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("friction factor") {
  // D/k back-solved from a target factor.
  const double ratio = std::pow(10.0, (1.0 / std::sqrt(0.02) - 1.138) / 2.0);
  CHECK(nikuradseFriction(ratio, 1.0) == doctest::Approx(0.02).epsilon(1e-12));
  // lambda = 1 would need D < k.
  CHECK_THROWS(nikuradseFriction(std::pow(10.0, -0.069), 1.0));
  CHECK(nikuradseFriction(1.0, 0.001) == doctest::Approx(0.019627).epsilon(1e-5));
  CHECK(rel(nikuradseFriction(1.0, 0.001), oracle::friction(1.0, 0.001)) < 1e-12);
  CHECK(nikuradseFriction(1.0, 0.01) > nikuradseFriction(1.0, 0.001));
  CHECK_THROWS(nikuradseFriction(0.0, 0.001));
  CHECK_THROWS(nikuradseFriction(1.0, -1.0));
}

TEST_CASE("compressibility") {
  GasConstants gas = naturalGas();
  CHECK(papayZ(0.0, gas).z == 1.0);
  gas.temperature = gas.pseudoCriticalTemperature;
  const double zc = papayZ(gas.pseudoCriticalPressureBar, gas).z;
  CHECK(zc == doctest::Approx(0.67045).epsilon(1e-5));
  CHECK(rel(zc, oracle::papay(46.5, 46.5, 190.6, 190.6)) < 1e-12);

  gas = naturalGas();
  const double p = units::barToPa(55.0);
  CHECK(pipeZ(p, p, gas) == doctest::Approx(papayZ(55.0, gas).z).epsilon(1e-14));
  CHECK_FALSE(papayZ(100.0, gas).outsideValidity);
  const auto high = papayZ(160.0, gas);
  CHECK(high.outsideValidity);
  CHECK(std::isfinite(high.z));
}

TEST_CASE("compressibility decreases up to the critical pressure") {
  GasConstants gas = naturalGas();
  for (double temperature : {gas.pseudoCriticalTemperature, 250.0, 283.15, 320.0}) {
    gas.temperature = temperature;
    double previous = papayZ(0.0, gas).z;
    for (int i = 1; i <= 100; ++i) {
      const double z = papayZ(gas.pseudoCriticalPressureBar * i / 100.0, gas).z;
      CHECK(z < previous);
      previous = z;
    }
  }
}

TEST_CASE("velocity constants") {
  const GasConstants gas = naturalGas();
  const double area = crossSectionArea(0.8);
  CHECK(area == doctest::Approx(M_PI * 0.16));
  const double p = units::barToPa(50.0);
  const double z = 0.9;
  CHECK(pipeVelocityConstant(p, 0.0, area, z, gas) == 0.0);
  const double v = pipeVelocityConstant(p, 100.0, area, z, gas);
  CHECK(pipeVelocityConstant(p, 200.0, area, z, gas) == doctest::Approx(2.0 * v));
  CHECK(pipeVelocityConstant(p, -100.0, area, z, gas) == doctest::Approx(v));
  const double hand = 518.28 * 283.15 * 0.9 / area * 100.0 / p;
  CHECK(rel(v, hand) < 1e-12);
  CHECK_THROWS(pipeVelocityConstant(0.0, 1.0, area, z, gas));

  CHECK(resistorVelocityConstant(p, p, 100.0, area, z, gas) == doctest::Approx(v));
  CHECK(resistorVelocityConstant(p, 0.9 * p, 0.0, area, z, gas) == 0.0);
  const double mean = 0.5 * (hand + 518.28 * 283.15 * 0.9 / area * 100.0 / (0.9 * p));
  CHECK(rel(resistorVelocityConstant(p, 0.9 * p, 100.0, area, z, gas), mean) < 1e-12);
  CHECK_THROWS(resistorVelocityConstant(p, 0.0, 1.0, area, z, gas));
}

TEST_CASE("adiabatic head and its inverse") {
  const GasConstants gas = naturalGas();
  CHECK(adiabaticHead(1.0, 0.9, gas) == 0.0);
  const double h = adiabaticHead(1.5, 0.9, gas);
  CHECK(rel(h, oracle::head(1.5, 0.9, 518.28, 283.15, 1.296)) < 1e-12);
  for (double r : {1.0, 1.01, 1.3, 1.5, 2.0, 3.0})
    CHECK(std::abs(pressureRatioFromHead(adiabaticHead(r, 0.85, gas), 0.85, gas) - r) < 1e-10);
  CHECK_THROWS(adiabaticHead(0.9, 0.9, gas));
  CHECK_THROWS(pressureRatioFromHead(-1.0, 0.9, gas));
}

TEST_CASE("compression power") {
  const GasConstants gas = naturalGas();
  const double pl = units::barToPa(45.0);
  const double pr = units::barToPa(60.0);
  CHECK(compressionPower(0.0, pl, pr, 0.9, 0.8, gas) == 0.0);
  CHECK(compressionPower(50.0, pl, pl, 0.9, 0.8, gas) == 0.0);
  const double one = compressionPower(40.0, pl, pr, 0.9, 0.8, gas);
  const double two = compressionPower(80.0, pl, pr, 0.9, 0.8, gas);
  CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
  CHECK(rel(one, oracle::power(40.0, pl, pr, 0.9, 0.8, 518.28, 283.15, 1.296)) < 1e-12);
  double previous = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double p = compressionPower(40.0, pl, pl * (1.0 + 0.05 * i), 0.9, 0.8, gas);
    CHECK(p > previous);
    previous = p;
  }
  CHECK_THROWS(compressionPower(40.0, pl, 0.9 * pl, 0.9, 0.8, gas));
  CHECK_THROWS(compressionPower(40.0, pl, pr, 0.9, 0.0, gas));
  CHECK_THROWS(compressionPower(40.0, pl, pr, 0.9, 1.5, gas));
}

TEST_CASE("gas constants are checked") {
  GasConstants gas = naturalGas();
  CHECK_NOTHROW(checkGasConstants(gas));
  gas.temperature = 0.0;
  CHECK_THROWS_AS(checkGasConstants(gas), std::invalid_argument);
}
