#pragma once

// Independent checks of the spectral solution. Nothing here touches the
// eigendecomposition: the steady state comes from a direct Lyapunov solve,
// transients from Runge-Kutta integration of the covariance flow, and the
// stochastic picture from sampled Langevin trajectories.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "iontherm/bath_config.hpp"
#include "iontherm/chain_geometry.hpp"
#include "iontherm/spectral_dynamics.hpp"

namespace iontherm {

/// Full covariance over the state ordering (x_1..x_N, p_1..p_N).
struct CovarianceMatrix {
  Eigen::MatrixXd c;

  int n() const noexcept { return static_cast<int>(c.rows() / 2); }
};

/// Thermal product state with zero cross-correlations.
CovarianceMatrix thermal_covariance(const InitialMoments& initial);

/// Per-ion mean phonon numbers read from the diagonal (no clamping).
std::vector<double> covariance_temperatures(const CovarianceMatrix& cov, const CouplingMatrix& coupling);

/// Largest Kronecker system the Lyapunov oracle will build (N <= 20).
inline constexpr int kLyapunovMaxIons = 20;

/// Solves Omega C + C Omega^T = Sigma, Sigma = diag(0, D), through the
/// vectorised (Kronecker-sum) linear system. Throws NoSteadyState when the
/// system is singular.
CovarianceMatrix lyapunov_steady_covariance(const DriftMatrix& drift, const Eigen::VectorXd& strengths);

struct CovarianceOdeOptions {
  double dt_max = 0.005;
  /// Above this many steps the RK4 step map is applied by repeated squaring
  /// (identical iterate, logarithmic cost); only allowed for small chains.
  long long direct_step_limit = 20000;
};

/// Integrates dC/dt = -Omega C - C Omega^T + Sigma with classical RK4, step
/// <= min(dt_max, 0.05 / max(omega_x, gamma_max)).
CovarianceMatrix covariance_ode_at(const DriftMatrix& drift, const Eigen::VectorXd& strengths,
                                   const CovarianceMatrix& c0, double t,
                                   const CovarianceOdeOptions& options = {});

/// Upper bound on the RK4 step for a given drift matrix.
double covariance_ode_step_bound(const DriftMatrix& drift);

struct EnsembleEstimate {
  std::vector<double> times;
  std::vector<std::vector<double>> mean_temps;  // [time][ion]
  std::vector<std::vector<double>> std_errs;    // [time][ion]
  std::vector<double> chain_mean;               // [time] mean over ions
  std::vector<double> chain_mean_std_err;       // [time]
  int n_traj = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
};

struct MonteCarloOptions {
  int n_traj = 2000;
  std::uint64_t seed = 42;
  double dt = 0.0;  // 0 selects 0.02 / max(omega_x, gamma_max)
  int threads = 1;
};

/// Largest admissible Monte-Carlo step.
double monte_carlo_step_bound(const CouplingMatrix& coupling, const BathProfile& profile);

/// Seeded ensemble of semi-implicit Euler-Maruyama trajectories:
///   p <- p - h (A x + gamma p) + sqrt(D h) xi,   x <- x + h p.
/// Initial states are drawn from the thermal product distribution for t0.
/// Each trajectory owns a counter-derived RNG stream, so estimates are
/// bit-identical for any thread count.
EnsembleEstimate monte_carlo_temperatures(const CouplingMatrix& coupling, const BathProfile& profile,
                                          std::span<const double> t0, std::span<const double> times,
                                          const MonteCarloOptions& options);

/// Exact second moments of the Monte-Carlo discretisation itself, obtained by
/// propagating C <- M C M^T + Q for the same step map. Used to measure the
/// scheme's weak bias without sampling noise.
CovarianceMatrix monte_carlo_scheme_covariance(const CouplingMatrix& coupling, const BathProfile& profile,
                                               const CovarianceMatrix& c0, double t, double dt);

/// splitmix64 finaliser used to derive per-trajectory seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace iontherm
