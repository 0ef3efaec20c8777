#pragma once

// Scenario builders and analysis routines for the driven-chain studies:
// driving-rate sweeps, two-rate maps, background-bath sweeps and relaxation
// dynamics, plus the profile statistics used to quantify them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iontherm/bath_config.hpp"
#include "iontherm/chain_geometry.hpp"
#include "iontherm/spectral_dynamics.hpp"

namespace iontherm {

enum class SweepParameter { gamma, gamma1, gamma2, gamma_bg, hot_ion_index, time };

const char* to_string(SweepParameter p) noexcept;
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept;

struct SweepAxis {
  SweepParameter parameter = SweepParameter::gamma;
  std::vector<double> values;  // strictly increasing
};

struct ScenarioConfig {
  TrapSpec chain;
  std::vector<BathAttachment> attachments;
  std::optional<BackgroundBath> background;
  double initial_temp = 0.0;
  std::vector<SweepAxis> sweep;
};

/// Everything derived from a scenario that the solvers need.
struct ChainModel {
  IonChain chain;
  CouplingMatrix coupling;
  BathProfile profile;
  Eigen::VectorXd strengths;
  SpectralDecomposition decomp;
};

ChainModel build_model(const ScenarioConfig& scenario);
/// Reuses geometry and coupling; only the baths change.
ChainModel build_model(const IonChain& chain, const CouplingMatrix& coupling, const ScenarioConfig& scenario);

TemperatureProfile steady_profile(const ChainModel& model);

struct SweepResult {
  std::vector<SweepAxis> axes;
  /// One steady profile per grid point (1-D sweeps).
  std::vector<TemperatureProfile> profiles;
  /// Middle-ion temperature per grid point, row-major over (axes[0], axes[1]).
  std::vector<double> scalars;
  ScenarioConfig scenario;
  std::vector<double> positions;
  std::vector<double> local_freqs;
};

/// 1-based index of the ion reported as T_m: ceil(N/2).
int middle_ion(int n) noexcept;

std::vector<double> log_grid(double lo, double hi, int points);
std::vector<double> linear_grid(double lo, double hi, int points);

/// Both attachments share each grid rate.
SweepResult run_gamma_sweep(const ScenarioConfig& base, std::span<const double> gammas, int threads = 1);

/// T_m over gamma1 (first attachment) x gamma2 (second attachment).
SweepResult run_gamma_map(const ScenarioConfig& base, std::span<const double> gamma1_grid,
                          std::span<const double> gamma2_grid, int threads = 1);

/// Steady profile per background rate; base.background supplies T_bg.
SweepResult run_background_sweep(const ScenarioConfig& base, std::span<const double> gamma_bg_grid,
                                 int threads = 1);

/// Moves the second (hot) attachment along the chain.
SweepResult run_hot_ion_sweep(const ScenarioConfig& base, std::span<const int> hot_ions, int threads = 1);

enum class DynamicsKind { uniform, harmonic, harmonic_bg };

const char* to_string(DynamicsKind kind) noexcept;
std::optional<DynamicsKind> parse_dynamics_kind(std::string_view name) noexcept;

struct DynamicsOptions {
  int n = 20;
  double gamma = 0.1;
  double epsilon = 0.05;
  int points = 400;
  /// End of the log grid in units of 1/gamma; 0 picks the preset default.
  double t_end_over_gamma = 0.0;
};

struct DynamicsResult {
  ScenarioConfig scenario;
  std::vector<double> positions;
  std::vector<double> local_freqs;
  TemperatureSeries series;
  std::optional<TemperatureProfile> steady;  // empty if ill-conditioned
  RelaxationRecord relaxation;
  double min_sum_real = 0.0;
  std::string diagnostic;
  /// |T_i(t_end) - T_i(100 t_end)|: residual drift left after the grid ends.
  std::vector<double> late_drift;
};

ScenarioConfig dynamics_scenario(DynamicsKind kind, const DynamicsOptions& options = {});
DynamicsResult run_dynamics_scenario(DynamicsKind kind, const DynamicsOptions& options = {});
/// Runs an arbitrary scenario on the given time grid.
DynamicsResult run_dynamics(const ScenarioConfig& scenario, std::span<const double> times, double epsilon);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of T_i against i over [first, last] (1-based,
/// inclusive, at least three ions). A constant profile has R^2 = 1.
LinearFit linear_fit(const TemperatureProfile& profile, int first, int last);

/// max_i |T_i - T_{N+1-i}|.
double mirror_symmetry_score(const TemperatureProfile& profile);

/// Reference configurations: uniform chain, omega_x = 10, cold bath T = 2 on
/// ion 1 and hot bath T = 10 on `hot_ion` (default: the last ion).
ScenarioConfig edge_driven_scenario(int n, double gamma, int hot_ion = 0);
ScenarioConfig background_scenario(int n, double gamma, double gamma_bg, double t_bg = 4.0);

}  // namespace iontherm
