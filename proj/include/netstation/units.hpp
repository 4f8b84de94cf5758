#pragma once

// File documents use bar, 1000 m^3/h (normal conditions) and minutes.
// Everything behind the loader works in Pa / kg/s / s, except the MIP
// variables which carry pressures in bar.

namespace netstation::units {

inline constexpr double kPaPerBar = 1.0e5;
inline constexpr double kSecondsPerMinute = 60.0;
inline constexpr double kSecondsPerHour = 3600.0;

constexpr double barToPa(double bar) { return bar * kPaPerBar; }
constexpr double paToBar(double pa) { return pa / kPaPerBar; }

constexpr double minutesToSeconds(double minutes) { return minutes * kSecondsPerMinute; }
constexpr double secondsToMinutes(double seconds) { return seconds / kSecondsPerMinute; }

/// [1000 m^3/h] = 3600 / (1000 rho0) [kg/s]
constexpr double massFlowToVolumetric(double kgPerSecond, double normalDensity) {
  return kgPerSecond * 3600.0 / (1000.0 * normalDensity);
}
constexpr double volumetricToMassFlow(double thousandCubicMetersPerHour, double normalDensity) {
  return thousandCubicMetersPerHour * (1000.0 * normalDensity) / 3600.0;
}

}  // namespace netstation::units
