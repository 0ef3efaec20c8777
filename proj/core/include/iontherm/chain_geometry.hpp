#pragma once

// Equilibrium geometry of a linear ion chain and its transverse coupling matrix.
//
// Units are dimensionless throughout: lengths in d0, frequencies in
// sqrt(e^2 / (m d0^3)). Ions are numbered 1..N in every public interface and
// stored 0-based.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace iontherm {

enum class TrapKind { uniform, harmonic };

const char* to_string(TrapKind kind) noexcept;

struct TrapSpec {
  TrapKind kind = TrapKind::uniform;
  int n = 1;
  double omega_x = 10.0;
  /// Axial frequency for harmonic traps. When empty the frequency is
  /// calibrated so that the largest spacing is exactly one length unit.
  std::optional<double> omega_z;
};

struct IonChain {
  std::vector<double> positions;  // strictly increasing
  double max_gap = 0.0;
  TrapKind kind = TrapKind::uniform;
  double omega_z = 0.0;  // zero for uniform chains

  int size() const noexcept { return static_cast<int>(positions.size()); }
};

struct CouplingMatrix {
  Eigen::MatrixXd a;            // symmetric N x N
  Eigen::VectorXd local_freqs;  // sqrt(A_ii)
  double omega_x = 0.0;
  double smallest_eigenvalue = 0.0;

  int size() const noexcept { return static_cast<int>(a.rows()); }
};

struct EquilibriumOptions {
  double force_tolerance = 1e-12;
  int max_iterations = 200;
};

/// Ions at 0, 1, ..., n-1.
IonChain uniform_positions(int n);

/// Stationary point of V(z) = sum_i omega_z^2 z_i^2 / 2 + sum_{i<j} 1/|z_i - z_j|
/// found by damped Newton iteration. Throws SolverFailure with the final
/// residual if the force tolerance is not met within the iteration cap.
IonChain solve_equilibrium(int n, double omega_z, const EquilibriumOptions& options = {});

/// Axial frequency for which the harmonic chain's largest spacing is 1.
/// Uses z ~ omega_z^(-2/3): solve once at omega_z = 1 with gap g and return g^(3/2).
double calibrate_axial_frequency(int n, const EquilibriumOptions& options = {});

/// Dispatches on the trap kind (calibrating omega_z if needed).
IonChain make_chain(const TrapSpec& trap);

/// A_ij = 1/|z_j - z_i|^3 for i != j, A_ii = omega_x^2 - sum_{j != i} A_ij.
/// Throws TrapTooWeak if some A_ii <= 0 and UnstableChain if A is not
/// positive definite.
CouplingMatrix build_coupling_matrix(const IonChain& chain, double omega_x);

/// Axial potential energy and its gradient (minus the force).
double axial_potential(std::span<const double> z, double omega_z);
std::vector<double> axial_gradient(std::span<const double> z, double omega_z);

}  // namespace iontherm
