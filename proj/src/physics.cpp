#include "netstation/physics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "netstation/units.hpp"

namespace netstation {

namespace {

void requirePositive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

void checkGasConstants(const GasConstants& gas) {
  requirePositive(gas.specificGasConstant, "specific gas constant");
  requirePositive(gas.temperature, "gas temperature");
  requirePositive(gas.pseudoCriticalPressureBar, "pseudocritical pressure");
  requirePositive(gas.pseudoCriticalTemperature, "pseudocritical temperature");
  requirePositive(gas.normalDensity, "normal density");
  requirePositive(gas.gravity, "gravity");
  if (!(gas.isentropicExponent > 1.0)) {
    throw std::invalid_argument("isentropic exponent must exceed 1");
  }
}

double nikuradseFriction(double diameter, double roughness) {
  requirePositive(diameter, "pipe diameter");
  requirePositive(roughness, "pipe roughness");
  if (roughness >= diameter) {
    throw std::invalid_argument("pipe roughness must be smaller than the diameter");
  }
  const double root = 2.0 * std::log10(diameter / roughness) + 1.138;
  return 1.0 / (root * root);
}

CompressibilityEstimate papayZ(double pressureBar, const GasConstants& gas) {
  if (!(pressureBar >= 0.0)) throw std::invalid_argument("pressure must be non-negative");
  const double reducedP = pressureBar / gas.pseudoCriticalPressureBar;
  const double reducedT = gas.temperature / gas.pseudoCriticalTemperature;
  CompressibilityEstimate out;
  out.z = 1.0 - 3.52 * reducedP * std::exp(-2.26 * reducedT) +
          0.247 * reducedP * reducedP * std::exp(-1.878 * reducedT);
  out.outsideValidity = pressureBar > 150.0;
  return out;
}

double pipeZ(double inletPressure, double outletPressure, const GasConstants& gas) {
  const double zIn = papayZ(units::paToBar(inletPressure), gas).z;
  const double zOut = papayZ(units::paToBar(outletPressure), gas).z;
  return 0.5 * (zIn + zOut);
}

double crossSectionArea(double diameter) {
  requirePositive(diameter, "diameter");
  return std::numbers::pi * diameter * diameter / 4.0;
}

double pipeVelocityConstant(double pressure, double massFlow, double area, double z,
                            const GasConstants& gas) {
  requirePositive(pressure, "reference pressure");
  requirePositive(area, "cross-section area");
  return gas.rtz(z) / area * std::abs(massFlow) / pressure;
}

double resistorVelocityConstant(double inletPressure, double outletPressure, double massFlow,
                                double area, double z, const GasConstants& gas) {
  return 0.5 * (pipeVelocityConstant(inletPressure, massFlow, area, z, gas) +
                pipeVelocityConstant(outletPressure, massFlow, area, z, gas));
}

double adiabaticHead(double pressureRatio, double inletZ, const GasConstants& gas) {
  if (!(pressureRatio >= 1.0)) throw std::invalid_argument("pressure ratio below 1");
  const double kappa = gas.isentropicExponent;
  const double exponent = (kappa - 1.0) / kappa;
  return gas.rtz(inletZ) / exponent * (std::pow(pressureRatio, exponent) - 1.0);
}

double pressureRatioFromHead(double head, double inletZ, const GasConstants& gas) {
  const double kappa = gas.isentropicExponent;
  const double exponent = (kappa - 1.0) / kappa;
  if (!(head >= 0.0)) throw std::invalid_argument("negative head");
  const double base = 1.0 + head * exponent / gas.rtz(inletZ);
  return std::pow(base, 1.0 / exponent);
}

double compressionPower(double massFlow, double inletPressure, double outletPressure,
                        double inletZ, double efficiency, const GasConstants& gas) {
  requirePositive(inletPressure, "inlet pressure");
  if (outletPressure < inletPressure) {
    throw std::invalid_argument("outlet pressure below inlet pressure");
  }
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw std::invalid_argument("efficiency must lie in (0, 1]");
  }
  if (massFlow < 0.0) throw std::invalid_argument("mass flow must be non-negative");
  return massFlow * adiabaticHead(outletPressure / inletPressure, inletZ, gas) / efficiency;
}

}  // namespace netstation
