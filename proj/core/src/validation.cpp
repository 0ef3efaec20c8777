#include "iontherm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "iontherm/errors.hpp"
#include "iontherm/langevin_oracle.hpp"
#include "iontherm/output.hpp"

namespace iontherm {

namespace {

constexpr double kLongTime = 1e6;

void record(ValidationCheck& check, double deviation) {
  ++check.comparisons;
  check.max_deviation = std::max(check.max_deviation, deviation);
  if (!(deviation <= check.tolerance)) ++check.failures;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

bool ValidationReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed(); });
}

std::vector<OracleInstance> random_oracle_instances(const ValidationOptions& options, int* redrawn) {
  if (options.instances < 0 || options.max_ions < 1 || options.max_ions > kLyapunovMaxIons)
    throw InvalidArgument("random_oracle_instances: bad instance count or chain size");
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> size_dist(1, options.max_ions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<OracleInstance> out;
  int rejected = 0;
  while (static_cast<int>(out.size()) < options.instances) {
    const int n = size_dist(rng);
    OracleInstance inst;
    inst.scenario.chain = TrapSpec{TrapKind::uniform, n, 10.0, std::nullopt};
    bool any = false;
    for (int i = 1; i <= n; ++i) {
      double gamma = unit(rng);
      if (unit(rng) < 0.3) gamma = 0.0;
      const double temp = 10.0 * unit(rng);
      any = any || gamma > 0.0;
      inst.scenario.attachments.push_back({i, gamma, temp});
    }
    for (int i = 0; i < n; ++i) inst.initial_temps.push_back(10.0 * unit(rng));
    if (!any) {
      ++rejected;
      continue;
    }
    try {
      if (build_model(inst.scenario).decomp.min_sum_real < options.min_decay_rate) {
        ++rejected;
        continue;
      }
    } catch (const DefectiveSpectrum&) {
      ++rejected;
      continue;
    }
    out.push_back(std::move(inst));
  }
  if (redrawn) *redrawn = rejected;
  return out;
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report;
  report.instances = random_oracle_instances(options, &report.redrawn);

  ValidationCheck lyap{"steady spectral vs lyapunov", 0.0, options.steady_tolerance};
  ValidationCheck ode{"steady spectral vs covariance-ode", 0.0, options.steady_tolerance};
  ValidationCheck lyap_ode{"steady lyapunov vs covariance-ode", 0.0, options.steady_tolerance};
  ValidationCheck transient{"transient spectral vs covariance-ode", 0.0, options.transient_tolerance};
  ValidationCheck mc{"monte-carlo chain mean |z|", 0.0, options.mc_sigmas};

  for (std::size_t k = 0; k < report.instances.size(); ++k) {
    const auto& inst = report.instances[k];
    const ChainModel model = build_model(inst.scenario);
    const DriftMatrix drift = build_drift_matrix(model.coupling, model.profile);

    const auto spectral = steady_profile(model).temps;
    const auto lyap_t = covariance_temperatures(lyapunov_steady_covariance(drift, model.strengths), model.coupling);
    const InitialMoments initial = thermal_initial(inst.initial_temps, model.coupling);
    const CovarianceMatrix c0 = thermal_covariance(initial);
    const auto ode_t = covariance_temperatures(covariance_ode_at(drift, model.strengths, c0, kLongTime), model.coupling);
    record(lyap, max_abs_diff(spectral, lyap_t));
    record(ode, max_abs_diff(spectral, ode_t));
    record(lyap_ode, max_abs_diff(lyap_t, ode_t));

    const auto exact_tr = temperature_of(variance_at(model.decomp, initial, model.strengths, options.transient_time),
                                         model.coupling);
    const auto ode_tr = covariance_temperatures(
        covariance_ode_at(drift, model.strengths, c0, options.transient_time), model.coupling);
    record(transient, max_abs_diff(exact_tr.temps, ode_tr));

    if (!options.monte_carlo || options.mc_times.empty()) continue;
    MonteCarloOptions mco;
    mco.n_traj = options.n_traj;
    mco.seed = derive_seed(options.seed, k);
    mco.threads = options.threads;
    const EnsembleEstimate est =
        monte_carlo_temperatures(model.coupling, model.profile, inst.initial_temps, options.mc_times, mco);
    MomentPropagator prop(model.decomp, initial, model.strengths);
    for (std::size_t j = 0; j < options.mc_times.size(); ++j) {
      const SecondMoments m = prop.at(options.mc_times[j]);
      double mean = 0.0;
      for (Eigen::Index i = 0; i < m.x2.size(); ++i) {
        const double w = model.coupling.local_freqs(i);
        mean += 0.5 * (w * m.x2(i) + m.p2(i) / w - 1.0);
      }
      mean /= static_cast<double>(m.x2.size());
      const double se = est.chain_mean_std_err[j];
      record(mc, se > 0.0 ? std::abs(est.chain_mean[j] - mean) / se : std::abs(est.chain_mean[j] - mean));
    }
  }

  report.checks = {lyap, ode, lyap_ode, transient};
  if (options.monte_carlo) report.checks.push_back(mc);
  return report;
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  os << "instances " << report.instances.size() << " (redrawn " << report.redrawn << ")\n";
  for (const auto& c : report.checks)
    os << (c.passed() ? "PASS " : "FAIL ") << c.name << ": max " << format_real(c.max_deviation) << " tol "
       << format_real(c.tolerance) << " over " << c.comparisons << " comparisons, " << c.failures
       << " failures\n";
  os << (report.passed() ? "validation passed\n" : "validation FAILED\n");
  return os.str();
}

}  // namespace iontherm
