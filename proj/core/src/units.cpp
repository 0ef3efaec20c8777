#include "iontherm/units.hpp"

#include <cmath>

#include "iontherm/errors.hpp"

namespace iontherm {

UnitSystem to_physical_units(double mass_amu, double d0_meters) {
  if (!(mass_amu > 0.0) || !(d0_meters > 0.0) || !std::isfinite(mass_amu) || !std::isfinite(d0_meters))
    throw InvalidArgument("to_physical_units: mass and d0 must be positive");
  using namespace constants;
  const double mass = mass_amu * atomic_mass_unit;
  const double ke2 = coulomb_constant * elementary_charge * elementary_charge;
  UnitSystem u;
  u.mass_amu = mass_amu;
  u.d0_meters = d0_meters;
  u.frequency_unit_rad_per_s = std::sqrt(ke2 / (mass * d0_meters * d0_meters * d0_meters));
  u.frequency_unit_hz = u.frequency_unit_rad_per_s / (2.0 * pi);
  u.time_unit_s = 1.0 / u.frequency_unit_rad_per_s;
  u.energy_unit_joule = ke2 / d0_meters;
  return u;
}

}  // namespace iontherm
