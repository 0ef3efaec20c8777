#pragma once

// Plain-text result formats. CSV layouts:
//   profile:  ion_index,z,omega_i,temperature
//   series:   time,ion_1,...,ion_N
//   map:      gamma1,gamma2,t_m
//   sweep:    <parameter>,ion_index,z,omega_i,temperature
// Reals are written with 17 significant digits so they re-parse exactly.

#include <iosfwd>
#include <span>
#include <string>

#include "iontherm/config.hpp"
#include "iontherm/experiments.hpp"
#include "iontherm/spectral_dynamics.hpp"

namespace iontherm {

std::string format_real(double v);

void write_profile_csv(std::ostream& os, const TemperatureProfile& profile, std::span<const double> positions,
                       std::span<const double> local_freqs);
void write_series_csv(std::ostream& os, const TemperatureSeries& series);
void write_map_csv(std::ostream& os, const SweepResult& map);
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

void write_profile_json(std::ostream& os, const TemperatureProfile& profile, std::span<const double> positions,
                        std::span<const double> local_freqs);
void write_series_json(std::ostream& os, const TemperatureSeries& series);
void write_sweep_json(std::ostream& os, const SweepResult& sweep);
void write_dynamics_json(std::ostream& os, const DynamicsResult& result);

/// Writes `contents` to `path`, or to stdout when path is empty or "-".
/// Throws IoError with the path on failure.
void write_text(const std::string& path, const std::string& contents);

}  // namespace iontherm
