#include "iontherm/langevin_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "iontherm/errors.hpp"
#include "iontherm/parallel.hpp"

namespace iontherm {

namespace {

Eigen::MatrixXd noise_matrix(int n, const Eigen::VectorXd& strengths) {
  if (strengths.size() != n) throw InvalidArgument("noise strength vector does not match the chain size");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  sigma.bottomRightCorner(n, n) = strengths.asDiagonal();
  return sigma;
}

double max_gamma(const DriftMatrix& drift) {
  return drift.omega.bottomRightCorner(drift.n, drift.n).diagonal().maxCoeff();
}

// Every row of A sums to omega_x^2.
double transverse_frequency(const DriftMatrix& drift) {
  return std::sqrt(std::max(drift.omega.bottomLeftCorner(drift.n, drift.n).rowwise().sum().maxCoeff(), 0.0));
}

Eigen::MatrixXd flow(const Eigen::MatrixXd& omega, const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& c) {
  const Eigen::MatrixXd oc = omega * c;
  return sigma - oc - oc.transpose();
}

// Vectorised operator of C -> -Omega C - C Omega^T (column-major vec).
Eigen::MatrixXd vectorised_flow(const Eigen::MatrixXd& omega) {
  const Eigen::Index m = omega.rows();
  const Eigen::Index d = m * m;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  // vec(Omega C) = (I kron Omega) vec(C); vec(C Omega^T) = (Omega kron I) vec(C)
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index k = 0; k < m; ++k) {
        l(j * m + r, j * m + k) -= omega(r, k);
        l(r * m + j, k * m + j) -= omega(r, k);
      }
  return l;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CovarianceMatrix thermal_covariance(const InitialMoments& initial) {
  const auto n = initial.x2.size();
  CovarianceMatrix cov;
  cov.c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  cov.c.diagonal().head(n) = initial.x2;
  cov.c.diagonal().tail(n) = initial.p2;
  return cov;
}

std::vector<double> covariance_temperatures(const CovarianceMatrix& cov, const CouplingMatrix& coupling) {
  const int n = coupling.size();
  if (cov.n() != n) throw InvalidArgument("covariance and coupling matrix sizes differ");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double w = coupling.local_freqs(i);
    t[static_cast<std::size_t>(i)] = 0.5 * (w * cov.c(i, i) + cov.c(n + i, n + i) / w - 1.0);
  }
  return t;
}

CovarianceMatrix lyapunov_steady_covariance(const DriftMatrix& drift, const Eigen::VectorXd& strengths) {
  const int n = drift.n;
  if (n > kLyapunovMaxIons)
    throw InvalidArgument("lyapunov_steady_covariance: oracle is limited to N <= 20");
  const Eigen::MatrixXd sigma = noise_matrix(n, strengths);
  const Eigen::Index m = 2 * n;

  // (I kron Omega + Omega kron I) vec(C) = vec(Sigma)
  const Eigen::MatrixXd k = -vectorised_flow(drift.omega);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(k);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-15)) {
    std::ostringstream msg;
    msg << "lyapunov_steady_covariance: Kronecker system is singular (rcond " << rcond
        << "); some mode is undamped";
    throw NoSteadyState(msg.str());
  }
  const Eigen::VectorXd vec = lu.solve(Eigen::Map<const Eigen::VectorXd>(sigma.data(), m * m));
  CovarianceMatrix cov;
  cov.c = Eigen::Map<const Eigen::MatrixXd>(vec.data(), m, m);
  cov.c = 0.5 * (cov.c + cov.c.transpose()).eval();
  return cov;
}

double covariance_ode_step_bound(const DriftMatrix& drift) {
  const double rate = std::max({transverse_frequency(drift), max_gamma(drift), 1e-300});
  return 0.05 / rate;
}

CovarianceMatrix covariance_ode_at(const DriftMatrix& drift, const Eigen::VectorXd& strengths,
                                   const CovarianceMatrix& c0, double t, const CovarianceOdeOptions& options) {
  const int n = drift.n;
  if (c0.n() != n) throw InvalidArgument("covariance_ode_at: initial covariance has the wrong size");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("covariance_ode_at: time must be finite and >= 0");
  if (!(options.dt_max > 0.0)) throw InvalidArgument("covariance_ode_at: dt_max must be positive");
  if (t == 0.0) return c0;

  const double h_max = std::min(options.dt_max, covariance_ode_step_bound(drift));
  const double steps_real = std::ceil(t / h_max);
  if (!(steps_real < 1e15) || !(t / steps_real > 0.0))
    throw InvalidArgument("covariance_ode_at: step size underflow");
  const auto steps = static_cast<long long>(steps_real);
  const double h = t / static_cast<double>(steps);
  const Eigen::MatrixXd sigma = noise_matrix(n, strengths);
  const Eigen::MatrixXd& omega = drift.omega;
  const Eigen::Index m = 2 * n;

  if (steps <= options.direct_step_limit) {
    Eigen::MatrixXd c = c0.c;
    for (long long s = 0; s < steps; ++s) {
      const Eigen::MatrixXd k1 = flow(omega, sigma, c);
      const Eigen::MatrixXd k2 = flow(omega, sigma, c + 0.5 * h * k1);
      const Eigen::MatrixXd k3 = flow(omega, sigma, c + 0.5 * h * k2);
      const Eigen::MatrixXd k4 = flow(omega, sigma, c + h * k3);
      c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      c = 0.5 * (c + c.transpose()).eval();
    }
    return {c};
  }

  if (n > 10)
    throw InvalidArgument("covariance_ode_at: too many RK4 steps for a chain this large");

  // One RK4 step on the linear system v' = L v + s is the affine map
  // v -> R(hL) v + h psi(hL) s with R(z) = 1 + z + z^2/2 + z^3/6 + z^4/24 and
  // psi(z) = 1 + z/2 + z^2/6 + z^3/24. Compose it `steps` times by squaring.
  const Eigen::Index d = m * m;
  const Eigen::MatrixXd hl = h * vectorised_flow(omega);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd hl2 = hl * hl;
  const Eigen::MatrixXd hl3 = hl2 * hl;
  const Eigen::MatrixXd hl4 = hl3 * hl;
  Eigen::MatrixXd step_p = id + hl + hl2 / 2.0 + hl3 / 6.0 + hl4 / 24.0;
  const Eigen::MatrixXd psi = id + hl / 2.0 + hl2 / 6.0 + hl3 / 24.0;
  Eigen::VectorXd step_r = h * (psi * Eigen::Map<const Eigen::VectorXd>(sigma.data(), d));

  Eigen::MatrixXd acc_p = id;
  Eigen::VectorXd acc_r = Eigen::VectorXd::Zero(d);
  for (long long k = steps; k > 0; k >>= 1) {
    if (k & 1) {
      acc_r = step_p * acc_r + step_r;
      acc_p = step_p * acc_p;
    }
    if (k > 1) {
      step_r = step_p * step_r + step_r;
      step_p = step_p * step_p;
    }
  }
  const Eigen::VectorXd v = acc_p * Eigen::Map<const Eigen::VectorXd>(c0.c.data(), d) + acc_r;
  CovarianceMatrix out;
  out.c = Eigen::Map<const Eigen::MatrixXd>(v.data(), m, m);
  out.c = 0.5 * (out.c + out.c.transpose()).eval();
  return out;
}

double monte_carlo_step_bound(const CouplingMatrix& coupling, const BathProfile& profile) {
  double g = 0.0;
  for (double x : profile.gammas) g = std::max(g, x);
  return 0.02 / std::max(coupling.omega_x, g);
}

namespace {

struct McSetup {
  std::vector<double> times;
  std::vector<long long> steps;  // per interval
  std::vector<double> h;         // per interval
};

McSetup plan_intervals(std::span<const double> times, double dt) {
  McSetup plan;
  double prev = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (!(t >= prev) || !std::isfinite(t) || (k > 0 && !(t > prev)))
      throw InvalidArgument("monte_carlo_temperatures: times must be nonnegative and strictly increasing");
    const double span = t - prev;
    const long long m = span == 0.0 ? 0 : static_cast<long long>(std::ceil(span / dt));
    plan.times.push_back(t);
    plan.steps.push_back(m);
    plan.h.push_back(m == 0 ? 0.0 : span / static_cast<double>(m));
    prev = t;
  }
  return plan;
}

}  // namespace

EnsembleEstimate monte_carlo_temperatures(const CouplingMatrix& coupling, const BathProfile& profile,
                                          std::span<const double> t0, std::span<const double> times,
                                          const MonteCarloOptions& options) {
  const int n = coupling.size();
  if (profile.size() != n || static_cast<int>(t0.size()) != n)
    throw InvalidArgument("monte_carlo_temperatures: sizes of coupling, profile and t0 differ");
  if (options.n_traj < 100) throw InvalidArgument("monte_carlo_temperatures: need n_traj >= 100");
  const double bound = monte_carlo_step_bound(coupling, profile);
  const double dt = options.dt == 0.0 ? bound : options.dt;
  if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12))
    throw InvalidArgument("monte_carlo_temperatures: dt must satisfy 0 < dt <= 0.02 / max(omega_x, gamma_max)");

  const McSetup plan = plan_intervals(times, dt);
  const InitialMoments init = thermal_initial(t0, coupling);
  const Eigen::VectorXd d = noise_strengths(profile, coupling);
  const Eigen::VectorXd gamma = Eigen::Map<const Eigen::VectorXd>(profile.gammas.data(), n);
  const Eigen::VectorXd w = coupling.local_freqs;
  const std::size_t n_times = plan.times.size();
  const auto n_traj = static_cast<std::size_t>(options.n_traj);

  // samples[(traj * n_times + k) * n + i]
  std::vector<double> samples(n_traj * n_times * static_cast<std::size_t>(n));

  parallel_for(n_traj, options.threads, [&](std::size_t traj) {
    std::mt19937_64 rng(derive_seed(options.seed, traj));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd x(n), p(n), force(n);
    for (int i = 0; i < n; ++i) {
      x(i) = std::sqrt(init.x2(i)) * normal(rng);
      p(i) = std::sqrt(init.p2(i)) * normal(rng);
    }
    for (std::size_t k = 0; k < n_times; ++k) {
      const double h = plan.h[k];
      const Eigen::VectorXd kick = (d * h).cwiseSqrt();
      for (long long s = 0; s < plan.steps[k]; ++s) {
        force.noalias() = coupling.a * x;
        for (int i = 0; i < n; ++i) {
          const double xi = d(i) > 0.0 ? normal(rng) : 0.0;
          p(i) += -h * (force(i) + gamma(i) * p(i)) + kick(i) * xi;
          x(i) += h * p(i);
        }
      }
      double* out = samples.data() + (traj * n_times + k) * static_cast<std::size_t>(n);
      for (int i = 0; i < n; ++i) out[i] = 0.5 * (w(i) * x(i) * x(i) + p(i) * p(i) / w(i) - 1.0);
    }
  });

  EnsembleEstimate est;
  est.times = plan.times;
  est.n_traj = options.n_traj;
  est.seed = options.seed;
  est.dt = dt;
  est.mean_temps.assign(n_times, std::vector<double>(static_cast<std::size_t>(n)));
  est.std_errs.assign(n_times, std::vector<double>(static_cast<std::size_t>(n)));
  est.chain_mean.resize(n_times);
  est.chain_mean_std_err.resize(n_times);

  const double nt = static_cast<double>(n_traj);
  std::vector<double> column(n_traj), dev(n_traj);
  auto reduce = [&](double& mean, double& err) {
    mean = pairwise_sum(column.begin(), column.end()) / nt;
    for (std::size_t j = 0; j < n_traj; ++j) dev[j] = (column[j] - mean) * (column[j] - mean);
    const double var = pairwise_sum(dev.begin(), dev.end()) / (nt - 1.0);
    err = std::sqrt(var / nt);
  };
  for (std::size_t k = 0; k < n_times; ++k) {
    for (int i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n_traj; ++j)
        column[j] = samples[(j * n_times + k) * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
      reduce(est.mean_temps[k][static_cast<std::size_t>(i)], est.std_errs[k][static_cast<std::size_t>(i)]);
    }
    for (std::size_t j = 0; j < n_traj; ++j) {
      const double* row = samples.data() + (j * n_times + k) * static_cast<std::size_t>(n);
      column[j] = pairwise_sum(row, row + n) / n;
    }
    reduce(est.chain_mean[k], est.chain_mean_std_err[k]);
  }
  return est;
}

CovarianceMatrix monte_carlo_scheme_covariance(const CouplingMatrix& coupling, const BathProfile& profile,
                                               const CovarianceMatrix& c0, double t, double dt) {
  const int n = coupling.size();
  if (!(dt > 0.0)) throw InvalidArgument("monte_carlo_scheme_covariance: dt must be positive");
  const auto steps = static_cast<long long>(std::ceil(t / dt - 1e-9));
  const double h = steps > 0 ? t / static_cast<double>(steps) : 0.0;
  const Eigen::VectorXd d = noise_strengths(profile, coupling);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) g(i, i) = profile.gammas[static_cast<std::size_t>(i)];

  // (x, p) -> (x + h p', p') with p' = (I - h G) p - h A x + kick
  Eigen::MatrixXd map(2 * n, 2 * n);
  map.bottomLeftCorner(n, n) = -h * coupling.a;
  map.bottomRightCorner(n, n) = id - h * g;
  map.topLeftCorner(n, n) = id + h * map.bottomLeftCorner(n, n);
  map.topRightCorner(n, n) = h * map.bottomRightCorner(n, n);
  Eigen::MatrixXd kick(2 * n, n);
  kick.topRows(n) = h * id;
  kick.bottomRows(n) = id;
  const Eigen::MatrixXd q = kick * (d * h).asDiagonal() * kick.transpose();

  Eigen::MatrixXd c = c0.c;
  for (long long s = 0; s < steps; ++s) c = map * c * map.transpose() + q;
  return {c};
}

}  // namespace iontherm
