#pragma once

// Cross-checks of the spectral solver against the independent oracles on
// seeded random chains. Shared by the `validate` subcommand and the tests.

#include <cstdint>
#include <string>
#include <vector>

#include "iontherm/experiments.hpp"

namespace iontherm {

struct OracleInstance {
  ScenarioConfig scenario;
  std::vector<double> initial_temps;
};

struct ValidationOptions {
  int instances = 20;
  int max_ions = 8;
  int n_traj = 2000;
  std::uint64_t seed = 42;
  int threads = 1;
  std::vector<double> mc_times{0.5, 1.0, 2.0, 5.0, 10.0};
  /// Instances whose slowest decay rate 2 min Re(l) falls below this are redrawn.
  double min_decay_rate = 1e-4;
  double steady_tolerance = 1e-6;
  double transient_time = 7.3;
  double transient_tolerance = 1e-6;
  double mc_sigmas = 3.0;
  bool monte_carlo = true;
};

struct ValidationCheck {
  std::string name;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  int comparisons = 0;
  int failures = 0;
  bool passed() const noexcept { return failures == 0; }
};

struct ValidationReport {
  std::vector<OracleInstance> instances;
  std::vector<ValidationCheck> checks;
  int redrawn = 0;
  bool passed() const noexcept;
};

/// Uniform chains, omega_x = 10, N in [1, max_ions]; gamma_i ~ U[0,1] with
/// each rate switched off with probability 0.3 (at least one stays on),
/// T^B_i ~ U[0,10], initial temperatures ~ U[0,10].
std::vector<OracleInstance> random_oracle_instances(const ValidationOptions& options, int* redrawn = nullptr);

ValidationReport run_validation(const ValidationOptions& options);

std::string format_report(const ValidationReport& report);

}  // namespace iontherm
