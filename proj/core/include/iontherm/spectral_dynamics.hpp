#pragma once

// Exact second moments of the linear Langevin chain
//
//   dx_i/dt = p_i
//   dp_i/dt = -sum_j A_ij x_j - gamma_i p_i + noise_i,   <noise_i noise_j> = D_i delta_ij
//
// obtained by diagonalising the 2N x 2N drift matrix Omega = [[0, -I], [A, diag(gamma)]]
// as Omega = U diag(lambda) U^-1. With V = U^-1 the covariance of q = (x, p) is
//
//   C(t) = U [ E(t) o (V C0 V^T) + F(t) o (V Sigma V^T) ] U^T,
//   E_ab = exp(-(l_a + l_b) t),   F_ab = (1 - E_ab) / (l_a + l_b),
//
// where o is the elementwise product and Sigma = diag(0, D). Only the diagonal
// of C is ever formed here; the full matrix lives in the oracle module.

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "iontherm/bath_config.hpp"
#include "iontherm/chain_geometry.hpp"

namespace iontherm {

inline constexpr double kSteadyTime = std::numeric_limits<double>::infinity();

struct DriftMatrix {
  Eigen::MatrixXd omega;  // [[0, -I], [A, diag(gamma)]]
  int n = 0;
};

struct SpectralDecomposition {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd u_inv;
  /// min over (a, b) of Re(l_a + l_b), i.e. twice the slowest decay rate.
  double min_sum_real = 0.0;
  /// 1-norm condition estimate of U.
  double u_condition = 0.0;
  /// ||U diag(l) U^-1 - Omega||_F / ||Omega||_F
  double reconstruction_error = 0.0;
  int n = 0;
};

struct DecomposeOptions {
  double max_condition = 1e12;
  double reconstruction_tolerance = 1e-10;
  double min_real_part = -1e-12;
};

/// Diagonal second moments for initial states without cross-correlations.
struct InitialMoments {
  Eigen::VectorXd x2;
  Eigen::VectorXd p2;
};

struct SecondMoments {
  Eigen::VectorXd x2;
  Eigen::VectorXd p2;
  double time = 0.0;  // kSteadyTime for the steady state
};

struct TemperatureProfile {
  std::vector<double> temps;  // mean phonon number per ion, 0-based storage
  double time = 0.0;
  /// Entries in (-1e-6, -1e-9) that were clamped to zero.
  int clamped = 0;

  int size() const noexcept { return static_cast<int>(temps.size()); }
};

using TemperatureSeries = std::vector<TemperatureProfile>;

DriftMatrix build_drift_matrix(const CouplingMatrix& coupling, const BathProfile& profile);
DriftMatrix build_drift_matrix(const CouplingMatrix& coupling, std::span<const double> gammas);

/// Throws DefectiveSpectrum when U is numerically singular (near-critical damping)
/// and NumericalFailure when the reconstruction check fails.
SpectralDecomposition decompose(const DriftMatrix& drift, const DecomposeOptions& options = {});

/// x2_i = (T_i + 1/2) / omega_i, p2_i = omega_i (T_i + 1/2).
InitialMoments thermal_initial(std::span<const double> t0, const CouplingMatrix& coupling);

/// Precontracted kernels for repeated evaluation at many times.
class MomentPropagator {
 public:
  MomentPropagator(const SpectralDecomposition& decomp, const InitialMoments& initial,
                   const Eigen::VectorXd& strengths);

  /// Moments at time t >= 0. Finite-time evaluation stays well defined even when
  /// some l_a + l_b is tiny, since F_ab is formed as -expm1(-s t) / s.
  SecondMoments at(double t) const;

 private:
  Eigen::MatrixXcd u_;
  InitialMoments initial_;
  Eigen::MatrixXcd initial_kernel_;  // V C0 V^T
  Eigen::MatrixXcd noise_kernel_;    // V Sigma V^T
  Eigen::MatrixXcd pair_sums_;       // l_a + l_b
};

SecondMoments variance_at(const SpectralDecomposition& decomp, const InitialMoments& initial,
                          const Eigen::VectorXd& strengths, double t);

/// t -> infinity limit. Throws IllConditionedSteadyState if some pair with a
/// nonzero noise weight has |l_a + l_b| < min_pair_sum.
SecondMoments steady_moments(const SpectralDecomposition& decomp, const Eigen::VectorXd& strengths,
                             double min_pair_sum = 1e-13);

/// T_i = (omega_i x2_i + p2_i / omega_i - 1) / 2.
TemperatureProfile temperature_of(const SecondMoments& moments, const CouplingMatrix& coupling);

TemperatureProfile steady_state_temperatures(const SpectralDecomposition& decomp,
                                             const Eigen::VectorXd& strengths,
                                             const CouplingMatrix& coupling);

TemperatureSeries evolve_temperatures(const SpectralDecomposition& decomp,
                                      const InitialMoments& initial,
                                      const Eigen::VectorXd& strengths,
                                      const CouplingMatrix& coupling, std::span<const double> times);

/// Thermalisation timescales read off a series.
struct RelaxationRecord {
  std::vector<int> driven_ions;                // 1-based, same order as bath targets
  std::vector<std::optional<double>> t1;       // first time within epsilon of the bath
  std::optional<double> t2;                    // empty: not reached on this grid
  std::vector<std::optional<double>> per_ion;  // per-ion version of t2
};

/// t1 is the first grid time each driven ion comes within epsilon of its bath
/// temperature (it may drift away again). t2 is the first grid time after
/// which max_i |T_i - T_i^s| < epsilon holds at every later grid point.
RelaxationRecord relaxation_times(const TemperatureSeries& series, const TemperatureProfile& steady,
                                  std::span<const BathAttachment> bath_targets, double epsilon);

}  // namespace iontherm
