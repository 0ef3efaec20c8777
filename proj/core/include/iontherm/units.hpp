#pragma once

namespace iontherm {

/// Conversion from dimensionless chain units to SI for a given ion mass and
/// length unit d0. The frequency unit is sqrt(k_C e^2 / (m d0^3)).
struct UnitSystem {
  double mass_amu = 0.0;
  double d0_meters = 0.0;
  double frequency_unit_rad_per_s = 0.0;
  double frequency_unit_hz = 0.0;  // frequency_unit_rad_per_s / 2 pi
  double time_unit_s = 0.0;        // 1 / frequency_unit_rad_per_s
  double energy_unit_joule = 0.0;  // k_C e^2 / d0
};

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double elementary_charge = 1.602176634e-19;      // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;   // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;     // kg
inline constexpr double coulomb_constant = 1.0 / (4.0 * pi * vacuum_permittivity);
}  // namespace constants

UnitSystem to_physical_units(double mass_amu, double d0_meters);

}  // namespace iontherm
