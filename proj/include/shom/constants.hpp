#pragma once

#include <numbers>

namespace shom {

/// CODATA 2018 values, SI units.
struct PhysicalConstants {
  static constexpr double c = 299792458.0;          // m/s
  static constexpr double k_B = 1.380649e-23;       // J/K
  static constexpr double hbar = 1.054571817e-34;   // J s
  static constexpr double epsilon_0 = 8.8541878128e-12;  // F/m
};

/// Rubidium-87 D1 line parameters used by the two-level vapor model.
struct RbProperties {
  static constexpr double dipole_moment = 1.4646e-29;  // C m, effective far-detuned D1
  static constexpr double mass = 1.443e-25;            // kg
  static constexpr double lambda_d1 = 795e-9;          // m
  // Derived from lambda_d1; never set on its own.
  static constexpr double omega_0 = 2.0 * std::numbers::pi * PhysicalConstants::c / lambda_d1;
};

namespace units {

inline constexpr double nm = 1e-9;
inline constexpr double fs = 1e-15;
inline constexpr double ps = 1e-12;
inline constexpr double torr = 133.322;  // Pa
inline constexpr double zero_celsius = 273.15;

constexpr double celsius_to_kelvin(double t) { return t + zero_celsius; }
constexpr double kelvin_to_celsius(double t) { return t - zero_celsius; }

}  // namespace units

}  // namespace shom
