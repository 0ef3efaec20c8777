#include "iontherm/chain_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "iontherm/errors.hpp"

namespace iontherm {

const char* to_string(TrapKind kind) noexcept {
  return kind == TrapKind::uniform ? "uniform" : "harmonic";
}

namespace {

double largest_gap(const std::vector<double>& z) {
  double gap = 0.0;
  for (std::size_t i = 1; i < z.size(); ++i) gap = std::max(gap, z[i] - z[i - 1]);
  return gap;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool strictly_increasing(const std::vector<double>& z) {
  for (std::size_t i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) return false;
  return true;
}

Eigen::MatrixXd axial_hessian(const std::vector<double>& z, double omega_z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) += omega_z * omega_z;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::abs(z[j] - z[i]);
      const double k = 2.0 / (d * d * d);
      h(i, j) -= k;
      h(j, i) -= k;
      h(i, i) += k;
      h(j, j) += k;
    }
  }
  return h;
}

// Reflect-average about the origin so that z_i = -z_{n+1-i} exactly.
void symmetrize(std::vector<double>& z) {
  const std::size_t n = z.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double half = 0.5 * (z[n - 1 - i] - z[i]);
    z[i] = -half;
    z[n - 1 - i] = half;
  }
  if (n % 2 == 1) z[n / 2] = 0.0;
}

}  // namespace

double axial_potential(std::span<const double> z, double omega_z) {
  double v = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    v += 0.5 * omega_z * omega_z * z[i] * z[i];
    for (std::size_t j = i + 1; j < z.size(); ++j) v += 1.0 / std::abs(z[j] - z[i]);
  }
  return v;
}

std::vector<double> axial_gradient(std::span<const double> z, double omega_z) {
  std::vector<double> g(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    g[i] += omega_z * omega_z * z[i];
    for (std::size_t j = i + 1; j < z.size(); ++j) {
      const double d = z[j] - z[i];
      const double f = std::copysign(1.0 / (d * d), d);
      // d/dz_i of 1/|z_j - z_i| is +sign(d)/d^2
      g[i] += f;
      g[j] -= f;
    }
  }
  return g;
}

IonChain uniform_positions(int n) {
  if (n < 1) throw InvalidArgument("uniform_positions: ion count must be >= 1");
  IonChain chain;
  chain.kind = TrapKind::uniform;
  chain.positions.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) chain.positions[static_cast<std::size_t>(i)] = i;
  chain.max_gap = n > 1 ? 1.0 : 0.0;
  return chain;
}

IonChain solve_equilibrium(int n, double omega_z, const EquilibriumOptions& options) {
  if (n < 1) throw InvalidArgument("solve_equilibrium: ion count must be >= 1");
  if (!(omega_z > 0.0) || !std::isfinite(omega_z))
    throw InvalidArgument("solve_equilibrium: omega_z must be positive");

  IonChain chain;
  chain.kind = TrapKind::harmonic;
  chain.omega_z = omega_z;
  if (n == 1) {
    chain.positions = {0.0};
    return chain;
  }

  // Uniform start with roughly the central spacing of the true crystal.
  const double spacing = 2.0 * std::pow(n, -0.56) * std::pow(omega_z, -2.0 / 3.0);
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = spacing * (i - 0.5 * (n - 1));

  double residual = max_abs(axial_gradient(z, omega_z));
  int iter = 0;
  for (; iter < options.max_iterations && residual > options.force_tolerance; ++iter) {
    const auto grad = axial_gradient(z, omega_z);
    const Eigen::Map<const Eigen::VectorXd> g(grad.data(), n);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(axial_hessian(z, omega_z));
    const Eigen::VectorXd step = -ldlt.solve(g);

    // Backtrack until ordering is kept and the potential does not increase.
    const double v0 = axial_potential(z, omega_z);
    double alpha = 1.0;
    std::vector<double> trial(z.size());
    bool accepted = false;
    for (int k = 0; k < 60; ++k, alpha *= 0.5) {
      for (int i = 0; i < n; ++i)
        trial[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + alpha * step(i);
      if (!strictly_increasing(trial)) continue;
      const double v1 = axial_potential(trial, omega_z);
      // Near the minimum rounding makes V flat; accept full steps there.
      if (v1 <= v0 + 1e-14 * std::abs(v0) || (alpha == 1.0 && max_abs(grad) < 1e-6)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    z.swap(trial);
    symmetrize(z);
    residual = max_abs(axial_gradient(z, omega_z));
  }

  if (!(residual <= options.force_tolerance)) {
    std::ostringstream msg;
    msg << "solve_equilibrium: no convergence for n=" << n << ", omega_z=" << omega_z
        << " after " << iter << " iterations (residual force " << residual << ")";
    throw SolverFailure(msg.str(), residual);
  }

  chain.positions = std::move(z);
  chain.max_gap = largest_gap(chain.positions);
  return chain;
}

double calibrate_axial_frequency(int n, const EquilibriumOptions& options) {
  if (n < 2) throw InvalidArgument("calibrate_axial_frequency: need at least two ions");
  const IonChain unit = solve_equilibrium(n, 1.0, options);
  return std::pow(unit.max_gap, 1.5);
}

IonChain make_chain(const TrapSpec& trap) {
  if (trap.kind == TrapKind::uniform) return uniform_positions(trap.n);
  if (trap.n == 1) return solve_equilibrium(1, trap.omega_z.value_or(1.0));
  const double omega_z = trap.omega_z ? *trap.omega_z : calibrate_axial_frequency(trap.n);
  return solve_equilibrium(trap.n, omega_z);
}

CouplingMatrix build_coupling_matrix(const IonChain& chain, double omega_x) {
  if (!(omega_x > 0.0) || !std::isfinite(omega_x))
    throw InvalidArgument("build_coupling_matrix: omega_x must be positive");
  const int n = chain.size();
  if (n < 1) throw InvalidArgument("build_coupling_matrix: empty chain");

  CouplingMatrix cm;
  cm.omega_x = omega_x;
  cm.a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(chain.positions[static_cast<std::size_t>(j)] -
                                chain.positions[static_cast<std::size_t>(i)]);
      const double k = 1.0 / (d * d * d);
      cm.a(i, j) = k;
      cm.a(j, i) = k;
    }
  }
  cm.local_freqs.resize(n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += cm.a(i, j);
    cm.a(i, i) = omega_x * omega_x - off;
    if (!(cm.a(i, i) > 0.0)) {
      std::ostringstream msg;
      msg << "build_coupling_matrix: transverse trap too weak, A_ii = " << cm.a(i, i)
          << " <= 0 at ion " << i + 1;
      throw TrapTooWeak(msg.str(), i + 1);
    }
    cm.local_freqs(i) = std::sqrt(cm.a(i, i));
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cm.a, Eigen::EigenvaluesOnly);
  cm.smallest_eigenvalue = es.eigenvalues().minCoeff();
  if (!(cm.smallest_eigenvalue > 0.0)) {
    std::ostringstream msg;
    msg << "build_coupling_matrix: coupling matrix not positive definite (smallest eigenvalue "
        << cm.smallest_eigenvalue << ")";
    throw UnstableChain(msg.str(), cm.smallest_eigenvalue);
  }
  return cm;
}

}  // namespace iontherm
