#pragma once

// Gas constants and the closed-form physics used to linearize pipes,
// resistors and compressor machines. Pressures in Pa unless named *Bar.

namespace netstation {

struct GasConstants {
  double specificGasConstant = 0.0;       // J/(kg K)
  double temperature = 0.0;               // K
  double pseudoCriticalPressureBar = 0.0; // bar
  double pseudoCriticalTemperature = 0.0; // K
  double normalDensity = 0.0;             // kg/m^3
  double isentropicExponent = 1.296;
  double gravity = 9.80665;                 // m/s^2

  /// R_s * T * z, the recurring product in every linearization.
  double rtz(double z) const { return specificGasConstant * temperature * z; }
};

/// Throws std::invalid_argument unless all constants are positive and finite.
void checkGasConstants(const GasConstants& gas);

/// Darcy friction factor of a fully rough pipe. Both lengths in metres.
double nikuradseFriction(double diameter, double roughness);

struct CompressibilityEstimate {
  double z = 1.0;
  // Papay's fit loses accuracy above roughly 150 bar or pressure ratios past ~2.
  bool outsideValidity = false;
};

CompressibilityEstimate papayZ(double pressureBar, const GasConstants& gas);

/// Mean of the end-point compressibilities, both pressures in Pa.
double pipeZ(double inletPressure, double outletPressure, const GasConstants& gas);

double crossSectionArea(double diameter);

/// R_s T z / A * |q| / p, the velocity per unit of mass flow at a reference point.
double pipeVelocityConstant(double pressure, double massFlow, double area, double z,
                            const GasConstants& gas);

/// Average of the two end velocity constants at the reference state.
double resistorVelocityConstant(double inletPressure, double outletPressure, double massFlow,
                                double area, double z, const GasConstants& gas);

/// Specific adiabatic head [J/kg] for the given pressure ratio p_out / p_in.
double adiabaticHead(double pressureRatio, double inletZ, const GasConstants& gas);

/// Inverse of adiabaticHead in the pressure ratio.
double pressureRatioFromHead(double head, double inletZ, const GasConstants& gas);

/// Shaft power [W] of a machine compressing `massFlow` [kg/s] from the inlet to
/// the outlet pressure [Pa] with isentropic efficiency `efficiency`.
double compressionPower(double massFlow, double inletPressure, double outletPressure,
                        double inletZ, double efficiency, const GasConstants& gas);

}  // namespace netstation
