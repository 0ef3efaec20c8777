#include "iontherm/spectral_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "iontherm/errors.hpp"

namespace iontherm {

using cplx = std::complex<double>;

namespace {

// exp(z) - 1 without cancellation for small |z|.
cplx expm1(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// diag(U M U^T) split into x and p halves.
SecondMoments contract_diagonal(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& m, double t) {
  const Eigen::Index n2 = u.rows();
  const Eigen::Index n = n2 / 2;
  const Eigen::MatrixXcd um = u * m;
  const Eigen::VectorXcd q = um.cwiseProduct(u).rowwise().sum();

  for (Eigen::Index mu = 0; mu < n2; ++mu) {
    const double re = q(mu).real();
    const double im = q(mu).imag();
    if (!(std::abs(im) <= 1e-8 * std::max(std::abs(re), 1e-300)) && std::abs(im) > 1e-14) {
      std::ostringstream msg;
      msg << "variance evaluation left an imaginary residue " << im << " on moment " << mu
          << " (real part " << re << ") at t=" << t;
      throw NumericalFailure(msg.str());
    }
  }
  SecondMoments out;
  out.x2 = q.head(n).real();
  out.p2 = q.tail(n).real();
  out.time = t;
  return out;
}

Eigen::MatrixXcd noise_kernel(const SpectralDecomposition& d, const Eigen::VectorXd& strengths) {
  const Eigen::Index n = d.n;
  if (strengths.size() != n)
    throw InvalidArgument("noise strength vector does not match the chain size");
  // V Sigma V^T with Sigma = diag(0, D)
  const Eigen::MatrixXcd vp = d.u_inv.rightCols(n);
  return vp * strengths.cast<cplx>().asDiagonal() * vp.transpose();
}

Eigen::MatrixXcd pair_sums(const Eigen::VectorXcd& lambda) {
  const Eigen::Index m = lambda.size();
  Eigen::MatrixXcd s(m, m);
  for (Eigen::Index b = 0; b < m; ++b)
    for (Eigen::Index a = 0; a < m; ++a) s(a, b) = lambda(a) + lambda(b);
  return s;
}

}  // namespace

DriftMatrix build_drift_matrix(const CouplingMatrix& coupling, std::span<const double> gammas) {
  const int n = coupling.size();
  if (static_cast<int>(gammas.size()) != n)
    throw InvalidArgument("build_drift_matrix: bath profile and coupling matrix sizes differ");
  DriftMatrix drift;
  drift.n = n;
  drift.omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  drift.omega.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  drift.omega.bottomLeftCorner(n, n) = coupling.a;
  for (int i = 0; i < n; ++i) drift.omega(n + i, n + i) = gammas[static_cast<std::size_t>(i)];
  return drift;
}

DriftMatrix build_drift_matrix(const CouplingMatrix& coupling, const BathProfile& profile) {
  return build_drift_matrix(coupling, std::span<const double>(profile.gammas));
}

SpectralDecomposition decompose(const DriftMatrix& drift, const DecomposeOptions& options) {
  const int n = drift.n;
  if (n < 1 || drift.omega.rows() != 2 * n || drift.omega.cols() != 2 * n)
    throw InvalidArgument("decompose: malformed drift matrix");

  // Balance the position block: with S = diag(s I, I), S Omega S^-1 has O(s)
  // entries everywhere instead of O(1) and O(s^2). Eigenvalues are unchanged.
  const double s = std::sqrt(std::max(drift.omega.bottomLeftCorner(n, n).diagonal().mean(), 1e-300));
  Eigen::MatrixXd balanced = drift.omega;
  balanced.topRightCorner(n, n) *= s;
  balanced.bottomLeftCorner(n, n) /= s;

  Eigen::EigenSolver<Eigen::MatrixXd> es(balanced, true);
  if (es.info() != Eigen::Success) throw NumericalFailure("decompose: eigenvalue iteration did not converge");

  SpectralDecomposition d;
  d.n = n;
  d.eigenvalues = es.eigenvalues();
  d.u = es.eigenvectors();
  d.u.topRows(n) /= s;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(d.u);
  const double rcond = lu.rcond();
  d.u_condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(d.u_condition <= options.max_condition)) {
    std::ostringstream msg;
    msg << "decompose: eigenvector basis is numerically singular (condition " << d.u_condition
        << "); the drift matrix is close to defective, e.g. near critical damping. "
        << "Perturb gamma or omega_x slightly.";
    throw DefectiveSpectrum(msg.str(), d.u_condition);
  }
  d.u_inv = lu.inverse();

  const Eigen::MatrixXcd recon = d.u * d.eigenvalues.asDiagonal() * d.u_inv;
  const double norm = drift.omega.norm();
  d.reconstruction_error = (recon - drift.omega.cast<cplx>()).norm() / norm;
  if (!(d.reconstruction_error <= options.reconstruction_tolerance)) {
    std::ostringstream msg;
    msg << "decompose: reconstruction error " << d.reconstruction_error << " exceeds "
        << options.reconstruction_tolerance;
    throw NumericalFailure(msg.str());
  }

  const double min_re = d.eigenvalues.real().minCoeff();
  if (!(min_re > options.min_real_part)) {
    std::ostringstream msg;
    msg << "decompose: eigenvalue with negative real part " << min_re
        << "; the linear flow is unstable";
    throw NumericalFailure(msg.str());
  }
  d.min_sum_real = 2.0 * min_re;
  return d;
}

InitialMoments thermal_initial(std::span<const double> t0, const CouplingMatrix& coupling) {
  const int n = coupling.size();
  if (static_cast<int>(t0.size()) != n)
    throw InvalidArgument("thermal_initial: temperature vector does not match the chain size");
  InitialMoments m;
  m.x2.resize(n);
  m.p2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = t0[static_cast<std::size_t>(i)];
    if (!(t >= 0.0) || !std::isfinite(t))
      throw InvalidArgument("thermal_initial: initial temperatures must be nonnegative");
    const double w = coupling.local_freqs(i);
    m.x2(i) = (t + 0.5) / w;
    m.p2(i) = w * (t + 0.5);
  }
  return m;
}

MomentPropagator::MomentPropagator(const SpectralDecomposition& decomp, const InitialMoments& initial,
                                   const Eigen::VectorXd& strengths)
    : u_(decomp.u), initial_(initial) {
  const Eigen::Index n = decomp.n;
  if (initial.x2.size() != n || initial.p2.size() != n)
    throw InvalidArgument("initial moments do not match the chain size");
  Eigen::VectorXcd c0(2 * n);
  c0.head(n) = initial.x2.cast<cplx>();
  c0.tail(n) = initial.p2.cast<cplx>();
  initial_kernel_ = decomp.u_inv * c0.asDiagonal() * decomp.u_inv.transpose();
  noise_kernel_ = noise_kernel(decomp, strengths);
  pair_sums_ = pair_sums(decomp.eigenvalues);
}

SecondMoments MomentPropagator::at(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("variance_at: time must be finite and >= 0");
  if (t == 0.0) return {initial_.x2, initial_.p2, 0.0};

  const Eigen::Index m = pair_sums_.rows();
  Eigen::MatrixXcd kernel(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    for (Eigen::Index a = 0; a < m; ++a) {
      const cplx s = pair_sums_(a, b);
      const cplx em1 = expm1(-s * t);  // E - 1
      const cplx f = s == cplx(0.0) ? cplx(t) : -em1 / s;
      kernel(a, b) = (em1 + 1.0) * initial_kernel_(a, b) + f * noise_kernel_(a, b);
    }
  }
  return contract_diagonal(u_, kernel, t);
}

SecondMoments variance_at(const SpectralDecomposition& decomp, const InitialMoments& initial,
                          const Eigen::VectorXd& strengths, double t) {
  return MomentPropagator(decomp, initial, strengths).at(t);
}

SecondMoments steady_moments(const SpectralDecomposition& decomp, const Eigen::VectorXd& strengths,
                             double min_pair_sum) {
  const Eigen::MatrixXcd w = noise_kernel(decomp, strengths);
  const Eigen::MatrixXcd sums = pair_sums(decomp.eigenvalues);
  const Eigen::Index m = w.rows();
  const double weight_floor = 1e-300;
  Eigen::MatrixXcd kernel(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    for (Eigen::Index a = 0; a < m; ++a) {
      if (std::abs(w(a, b)) <= weight_floor) {
        kernel(a, b) = 0.0;
        continue;
      }
      if (!(std::abs(sums(a, b)) >= min_pair_sum)) {
        std::ostringstream msg;
        msg << "steady state is ill-conditioned: |l_a + l_b| = " << std::abs(sums(a, b))
            << " below " << min_pair_sum << " (min Re(l_a + l_b) = " << decomp.min_sum_real
            << "); relaxation is too slow to resolve in double precision";
        throw IllConditionedSteadyState(msg.str(), decomp.min_sum_real);
      }
      kernel(a, b) = w(a, b) / sums(a, b);
    }
  }
  return contract_diagonal(decomp.u, kernel, kSteadyTime);
}

TemperatureProfile temperature_of(const SecondMoments& moments, const CouplingMatrix& coupling) {
  const int n = coupling.size();
  if (moments.x2.size() != n || moments.p2.size() != n)
    throw InvalidArgument("temperature_of: moments do not match the chain size");
  TemperatureProfile prof;
  prof.time = moments.time;
  prof.temps.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double w = coupling.local_freqs(i);
    double t = 0.5 * (w * moments.x2(i) + moments.p2(i) / w - 1.0);
    if (t < 0.0) {
      if (t < -1e-6) {
        std::ostringstream msg;
        msg << "temperature_of: negative temperature " << t << " on ion " << i + 1;
        throw NumericalFailure(msg.str());
      }
      if (t < -1e-9) ++prof.clamped;
      t = 0.0;
    }
    prof.temps[static_cast<std::size_t>(i)] = t;
  }
  return prof;
}

TemperatureProfile steady_state_temperatures(const SpectralDecomposition& decomp,
                                             const Eigen::VectorXd& strengths,
                                             const CouplingMatrix& coupling) {
  return temperature_of(steady_moments(decomp, strengths), coupling);
}

TemperatureSeries evolve_temperatures(const SpectralDecomposition& decomp,
                                      const InitialMoments& initial,
                                      const Eigen::VectorXd& strengths,
                                      const CouplingMatrix& coupling, std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k]))
      throw InvalidArgument("evolve_temperatures: times must be finite and nonnegative");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw InvalidArgument("evolve_temperatures: times must be strictly increasing");
  }
  const MomentPropagator prop(decomp, initial, strengths);
  TemperatureSeries series;
  series.reserve(times.size());
  for (double t : times) series.push_back(temperature_of(prop.at(t), coupling));
  return series;
}

RelaxationRecord relaxation_times(const TemperatureSeries& series, const TemperatureProfile& steady,
                                  std::span<const BathAttachment> bath_targets, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("relaxation_times: epsilon must be positive");
  const int n = steady.size();
  for (const auto& p : series)
    if (p.size() != n) throw InvalidArgument("relaxation_times: series and steady profile sizes differ");

  RelaxationRecord rec;
  for (const auto& b : bath_targets) {
    if (b.ion < 1 || b.ion > n) throw InvalidArgument("relaxation_times: bath ion out of range");
    rec.driven_ions.push_back(b.ion);
    std::optional<double> t1;
    for (const auto& p : series) {
      if (std::abs(p.temps[static_cast<std::size_t>(b.ion - 1)] - b.temperature) < epsilon) {
        t1 = p.time;
        break;
      }
    }
    rec.t1.push_back(t1);
  }

  // Scan backwards: the settling time is the earliest point of the final run
  // of grid points that all satisfy the condition.
  auto settle = [&](auto&& ok) -> std::optional<double> {
    std::optional<double> t;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
      if (!ok(*it)) break;
      t = it->time;
    }
    return t;
  };

  rec.t2 = settle([&](const TemperatureProfile& p) {
    for (int i = 0; i < n; ++i)
      if (!(std::abs(p.temps[static_cast<std::size_t>(i)] - steady.temps[static_cast<std::size_t>(i)]) <
            epsilon))
        return false;
    return true;
  });
  rec.per_ion.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    rec.per_ion[idx] = settle([&](const TemperatureProfile& p) {
      return std::abs(p.temps[idx] - steady.temps[idx]) < epsilon;
    });
  }
  return rec;
}

}  // namespace iontherm
