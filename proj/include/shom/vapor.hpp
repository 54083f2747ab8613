#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "constants.hpp"
#include "error.hpp"

namespace shom {

/// Heated Rb cell: temperature in kelvin, length in meters.
struct VaporCell {
  double temperature;
  double length;

  VaporCell(double temperature_k, double length_m) : temperature(temperature_k), length(length_m) {
    if (!(temperature_k > 0.0)) throw InvalidArgument("cell temperature must be positive");
    if (!(length_m >= 0.0)) throw InvalidArgument("cell length must be non-negative");
  }
};

/// Single Lorentzian resonance seen by the signal photon.
struct DispersionModel {
  double od;       // optical depth
  double tau;      // Doppler-broadened lifetime [s]
  double lambda0;  // resonance wavelength [m]

  DispersionModel(double od_, double tau_, double lambda0_ = RbProperties::lambda_d1)
      : od(od_), tau(tau_), lambda0(lambda0_) {
    if (!(od_ >= 0.0)) throw InvalidArgument("optical depth must be non-negative");
    if (!(tau_ > 0.0)) throw InvalidArgument("lifetime must be positive");
    if (!(lambda0_ > 0.0)) throw InvalidArgument("resonance wavelength must be positive");
  }

  double omega0() const noexcept { return 2.0 * std::numbers::pi * PhysicalConstants::c / lambda0; }
};

inline constexpr double kPressureModelMinT = 250.0;
inline constexpr double kPressureModelMaxT = 600.0;

/// Rb vapor pressure [Torr] from the Nesmeyanov fit, valid on [250 K, 600 K].
inline double vapor_pressure(double temperature_k) {
  if (!(temperature_k >= kPressureModelMinT && temperature_k <= kPressureModelMaxT))
    throw OutOfModelRange("vapor pressure model valid for 250 K <= T <= 600 K");
  const double t = temperature_k;
  const double log10_p = 15.88253 - 4529.635 / t + 0.00058663 * t - 2.99138 * std::log10(t);
  return std::pow(10.0, log10_p);
}

/// Doppler-broadened excited-state lifetime tau = 1/Delta(T) [s].
inline double doppler_lifetime(double temperature_k) {
  if (!(temperature_k > 0.0)) throw InvalidArgument("temperature must be positive");
  constexpr double c = PhysicalConstants::c;
  const double thermal_speed =
      std::sqrt(2.0 * PhysicalConstants::k_B * temperature_k / RbProperties::mass);
  const double width = 2.0 * RbProperties::omega_0 / c * thermal_speed;
  return 1.0 / width;
}

/// Resonant optical depth of the cell. Equivalent to n * sigma(T) * L with the
/// Doppler lifetime folded into sigma.
inline double optical_depth(const VaporCell& cell) {
  using PC = PhysicalConstants;
  const double pressure_pa = vapor_pressure(cell.temperature) * units::torr;
  const double thermal_energy = PC::k_B * cell.temperature;
  const double mu = RbProperties::dipole_moment;
  return pressure_pa / std::pow(thermal_energy, 1.5) * (mu * mu / (4.0 * PC::epsilon_0 * PC::hbar)) *
         std::sqrt(RbProperties::mass / 2.0) * cell.length;
}

/// Dispersion model of a cell with lifetime and OD evaluated at its temperature.
inline DispersionModel dispersion_for(const VaporCell& cell,
                                      double lambda0 = RbProperties::lambda_d1) {
  return {optical_depth(cell), doppler_lifetime(cell.temperature), lambda0};
}

/// x(lambda) = 2 pi tau c (lambda - lambda0) / lambda0^2.
inline double reduced_detuning(const DispersionModel& model, double lambda_m) noexcept {
  return 2.0 * std::numbers::pi * model.tau * PhysicalConstants::c * (lambda_m - model.lambda0) /
         (model.lambda0 * model.lambda0);
}

/// OD x / (1 + x^2): phase as a function of the reduced detuning.
inline double lorentzian_phase(double od, double x) noexcept { return od * x / (1.0 + x * x); }

/// Spectral phase imprinted on the signal photon [rad].
inline double spectral_phase(const DispersionModel& model, double lambda_m) {
  if (!(lambda_m > 0.0)) throw InvalidArgument("wavelength must be positive");
  return lorentzian_phase(model.od, reduced_detuning(model, lambda_m));
}

/// Wavelength where the reduced detuning equals `x`.
inline double wavelength_at_detuning(const DispersionModel& model, double x) noexcept {
  return model.lambda0 +
         x * model.lambda0 * model.lambda0 /
             (2.0 * std::numbers::pi * model.tau * PhysicalConstants::c);
}

/// Exact sup - inf of the spectral phase over [lo, hi]. The extrema sit at x = +-1.
inline double spectral_phase_peak_to_peak(const DispersionModel& model, double lo_m, double hi_m) {
  if (!(hi_m > lo_m)) throw InvalidArgument("empty wavelength interval");
  double lo = spectral_phase(model, lo_m);
  double hi = lo;
  auto visit = [&](double lambda) {
    const double p = spectral_phase(model, lambda);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  };
  visit(hi_m);
  for (double x : {-1.0, 1.0}) {
    const double lambda = wavelength_at_detuning(model, x);
    if (lambda > lo_m && lambda < hi_m) visit(lambda);
  }
  return hi - lo;
}

inline double angular_frequency(double lambda_m) noexcept {
  return 2.0 * std::numbers::pi * PhysicalConstants::c / lambda_m;
}

/// First-order (linearized) wavelength-to-frequency map around lambda0; the
/// map under which spectral_phase and the transfer-function argument coincide.
inline double angular_frequency_linearized(const DispersionModel& model, double lambda_m) noexcept {
  return model.omega0() - 2.0 * std::numbers::pi * PhysicalConstants::c *
                              (lambda_m - model.lambda0) / (model.lambda0 * model.lambda0);
}

/// Exponent -OD / (1 - i (omega - omega0) tau) of the field transfer factor.
inline std::complex<double> transfer_exponent(const DispersionModel& model, double omega) {
  if (!(omega > 0.0)) throw InvalidArgument("angular frequency must be positive");
  const double detuning = (omega - model.omega0()) * model.tau;
  const double denom = 1.0 + detuning * detuning;
  // -OD (1 + i d) / (1 + d^2)
  return {-model.od / denom, -model.od * detuning / denom};
}

/// Field transfer factor exp[-OD / (1 - i (omega - omega0) tau)].
inline std::complex<double> transfer_function(const DispersionModel& model, double omega) {
  return std::exp(transfer_exponent(model, omega));
}

struct AbsorptionCheck {
  bool negligible;
  double margin;  // (omega - omega0)^2 tau^2 / OD
};

/// Absorption is negligible when (omega - omega0)^2 tau^2 >= kappa * OD.
inline AbsorptionCheck absorption_negligible(const DispersionModel& model, double omega,
                                             double kappa = 100.0) {
  const double d = (omega - model.omega0()) * model.tau;
  const double lhs = d * d;
  if (lhs == 0.0) return {false, 0.0};
  if (model.od == 0.0) return {true, std::numeric_limits<double>::infinity()};
  const double margin = lhs / model.od;
  return {margin >= kappa, margin};
}

}  // namespace shom
