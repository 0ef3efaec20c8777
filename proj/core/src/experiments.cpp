#include "iontherm/experiments.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "iontherm/errors.hpp"
#include "iontherm/parallel.hpp"

namespace iontherm {

const char* to_string(SweepParameter p) noexcept {
  switch (p) {
    case SweepParameter::gamma: return "gamma";
    case SweepParameter::gamma1: return "gamma1";
    case SweepParameter::gamma2: return "gamma2";
    case SweepParameter::gamma_bg: return "gamma_bg";
    case SweepParameter::hot_ion_index: return "hot_ion_index";
    case SweepParameter::time: return "time";
  }
  return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept {
  for (auto p : {SweepParameter::gamma, SweepParameter::gamma1, SweepParameter::gamma2,
                 SweepParameter::gamma_bg, SweepParameter::hot_ion_index, SweepParameter::time})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

const char* to_string(DynamicsKind kind) noexcept {
  switch (kind) {
    case DynamicsKind::uniform: return "uniform";
    case DynamicsKind::harmonic: return "harmonic";
    case DynamicsKind::harmonic_bg: return "harmonic-bg";
  }
  return "unknown";
}

std::optional<DynamicsKind> parse_dynamics_kind(std::string_view name) noexcept {
  if (name == "uniform") return DynamicsKind::uniform;
  if (name == "harmonic") return DynamicsKind::harmonic;
  if (name == "harmonic-bg" || name == "harmonic_bg") return DynamicsKind::harmonic_bg;
  return std::nullopt;
}

int middle_ion(int n) noexcept { return (n + 1) / 2; }

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw InvalidArgument("log_grid: need 0 < lo < hi and points >= 2");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (!(hi > lo) || points < 2) throw InvalidArgument("linear_grid: need lo < hi and points >= 2");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  g.back() = hi;
  return g;
}

ChainModel build_model(const IonChain& chain, const CouplingMatrix& coupling, const ScenarioConfig& scenario) {
  ChainModel m;
  m.chain = chain;
  m.coupling = coupling;
  m.profile = assemble_profile(chain.size(), scenario.attachments, scenario.background);
  m.strengths = noise_strengths(m.profile, m.coupling);
  m.decomp = decompose(build_drift_matrix(m.coupling, m.profile));
  return m;
}

ChainModel build_model(const ScenarioConfig& scenario) {
  const IonChain chain = make_chain(scenario.chain);
  const CouplingMatrix coupling = build_coupling_matrix(chain, scenario.chain.omega_x);
  return build_model(chain, coupling, scenario);
}

TemperatureProfile steady_profile(const ChainModel& model) {
  return steady_state_temperatures(model.decomp, model.strengths, model.coupling);
}

namespace {

void require_two_attachments(const ScenarioConfig& base, const char* who) {
  if (base.attachments.size() != 2) {
    std::ostringstream msg;
    msg << who << ": scenario needs exactly two bath attachments (cold, hot), got " << base.attachments.size();
    throw InvalidArgument(msg.str());
  }
}

void require_increasing(std::span<const double> grid, const char* who) {
  if (grid.empty()) throw InvalidArgument(std::string(who) + ": empty grid");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw InvalidArgument(std::string(who) + ": grid must be strictly increasing");
}

SweepResult empty_result(const ScenarioConfig& base, const IonChain& chain, const CouplingMatrix& coupling) {
  SweepResult r;
  r.scenario = base;
  r.positions = chain.positions;
  r.local_freqs.assign(coupling.local_freqs.data(), coupling.local_freqs.data() + coupling.size());
  return r;
}

template <class Mutate>
SweepResult profile_sweep(const ScenarioConfig& base, SweepAxis axis, int threads, Mutate&& mutate) {
  const IonChain chain = make_chain(base.chain);
  const CouplingMatrix coupling = build_coupling_matrix(chain, base.chain.omega_x);
  SweepResult r = empty_result(base, chain, coupling);
  r.profiles.resize(axis.values.size());
  parallel_for(axis.values.size(), threads, [&](std::size_t k) {
    ScenarioConfig point = base;
    mutate(point, axis.values[k]);
    r.profiles[k] = steady_profile(build_model(chain, coupling, point));
  });
  r.axes.push_back(std::move(axis));
  return r;
}

}  // namespace

SweepResult run_gamma_sweep(const ScenarioConfig& base, std::span<const double> gammas, int threads) {
  require_two_attachments(base, "run_gamma_sweep");
  require_increasing(gammas, "run_gamma_sweep");
  return profile_sweep(base, {SweepParameter::gamma, {gammas.begin(), gammas.end()}}, threads,
                       [](ScenarioConfig& s, double g) {
                         for (auto& a : s.attachments) a.gamma = g;
                       });
}

SweepResult run_background_sweep(const ScenarioConfig& base, std::span<const double> gamma_bg_grid, int threads) {
  if (!base.background) throw InvalidArgument("run_background_sweep: scenario has no background bath");
  require_increasing(gamma_bg_grid, "run_background_sweep");
  return profile_sweep(base, {SweepParameter::gamma_bg, {gamma_bg_grid.begin(), gamma_bg_grid.end()}}, threads,
                       [](ScenarioConfig& s, double g) { s.background->gamma = g; });
}

SweepResult run_hot_ion_sweep(const ScenarioConfig& base, std::span<const int> hot_ions, int threads) {
  require_two_attachments(base, "run_hot_ion_sweep");
  std::vector<double> values(hot_ions.begin(), hot_ions.end());
  require_increasing(values, "run_hot_ion_sweep");
  return profile_sweep(base, {SweepParameter::hot_ion_index, std::move(values)}, threads,
                       [](ScenarioConfig& s, double ion) { s.attachments[1].ion = static_cast<int>(ion); });
}

SweepResult run_gamma_map(const ScenarioConfig& base, std::span<const double> gamma1_grid,
                          std::span<const double> gamma2_grid, int threads) {
  require_two_attachments(base, "run_gamma_map");
  require_increasing(gamma1_grid, "run_gamma_map");
  require_increasing(gamma2_grid, "run_gamma_map");
  const IonChain chain = make_chain(base.chain);
  const CouplingMatrix coupling = build_coupling_matrix(chain, base.chain.omega_x);
  SweepResult r = empty_result(base, chain, coupling);
  r.axes.push_back({SweepParameter::gamma1, {gamma1_grid.begin(), gamma1_grid.end()}});
  r.axes.push_back({SweepParameter::gamma2, {gamma2_grid.begin(), gamma2_grid.end()}});
  const std::size_t cols = gamma2_grid.size();
  r.scalars.resize(gamma1_grid.size() * cols);
  const auto mid = static_cast<std::size_t>(middle_ion(chain.size()) - 1);
  parallel_for(r.scalars.size(), threads, [&](std::size_t k) {
    ScenarioConfig point = base;
    point.attachments[0].gamma = gamma1_grid[k / cols];
    point.attachments[1].gamma = gamma2_grid[k % cols];
    r.scalars[k] = steady_profile(build_model(chain, coupling, point)).temps[mid];
  });
  return r;
}

ScenarioConfig edge_driven_scenario(int n, double gamma, int hot_ion) {
  ScenarioConfig s;
  s.chain = {TrapKind::uniform, n, 10.0, std::nullopt};
  s.attachments = {{1, gamma, 2.0}, {hot_ion > 0 ? hot_ion : n, gamma, 10.0}};
  return s;
}

ScenarioConfig background_scenario(int n, double gamma, double gamma_bg, double t_bg) {
  ScenarioConfig s = edge_driven_scenario(n, gamma);
  s.background = BackgroundBath{gamma_bg, t_bg};
  return s;
}

ScenarioConfig dynamics_scenario(DynamicsKind kind, const DynamicsOptions& options) {
  ScenarioConfig s = edge_driven_scenario(options.n, options.gamma);
  s.initial_temp = 5.0;
  if (kind != DynamicsKind::uniform) s.chain.kind = TrapKind::harmonic;
  if (kind == DynamicsKind::harmonic_bg) s.background = BackgroundBath{1e-3 * options.gamma, 4.0};
  return s;
}

DynamicsResult run_dynamics(const ScenarioConfig& scenario, std::span<const double> times, double epsilon) {
  const ChainModel model = build_model(scenario);
  const int n = model.chain.size();
  DynamicsResult r;
  r.scenario = scenario;
  r.positions = model.chain.positions;
  r.local_freqs.assign(model.coupling.local_freqs.data(), model.coupling.local_freqs.data() + n);
  r.min_sum_real = model.decomp.min_sum_real;

  const std::vector<double> t0(static_cast<std::size_t>(n), scenario.initial_temp);
  const InitialMoments initial = thermal_initial(t0, model.coupling);
  r.series = evolve_temperatures(model.decomp, initial, model.strengths, model.coupling, times);

  TemperatureProfile reference;
  try {
    r.steady = steady_profile(model);
    reference = *r.steady;
  } catch (const IllConditionedSteadyState& e) {
    r.diagnostic = e.what();
    reference.temps.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    reference.time = kSteadyTime;
  }

  std::vector<BathAttachment> targets = scenario.attachments;
  r.relaxation = relaxation_times(r.series, reference, targets, epsilon);

  if (!times.empty()) {
    const MomentPropagator prop(model.decomp, initial, model.strengths);
    const double t_end = times.back();
    const auto end = temperature_of(prop.at(t_end), model.coupling);
    const auto later = temperature_of(prop.at(100.0 * t_end), model.coupling);
    r.late_drift.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < r.late_drift.size(); ++i) r.late_drift[i] = std::abs(end.temps[i] - later.temps[i]);
  }
  return r;
}

DynamicsResult run_dynamics_scenario(DynamicsKind kind, const DynamicsOptions& options) {
  double t_end = options.t_end_over_gamma;
  if (t_end == 0.0) t_end = kind == DynamicsKind::harmonic ? 1e9 : 1e6;
  std::vector<double> times{0.0};
  const auto grid = log_grid(1e-2 / options.gamma, t_end / options.gamma, options.points);
  times.insert(times.end(), grid.begin(), grid.end());
  return run_dynamics(dynamics_scenario(kind, options), times, options.epsilon);
}

LinearFit linear_fit(const TemperatureProfile& profile, int first, int last) {
  const int n = profile.size();
  if (first < 1 || last > n || last - first + 1 < 3)
    throw InvalidArgument("linear_fit: range must lie in [1, N] and cover at least three ions");
  const int m = last - first + 1;
  double mx = 0.0, my = 0.0;
  for (int i = first; i <= last; ++i) {
    mx += i;
    my += profile.temps[static_cast<std::size_t>(i - 1)];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = first; i <= last; ++i) {
    const double dx = i - mx;
    const double dy = profile.temps[static_cast<std::size_t>(i - 1)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (int i = first; i <= last; ++i) {
      const double r = profile.temps[static_cast<std::size_t>(i - 1)] - (fit.intercept + fit.slope * i);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

double mirror_symmetry_score(const TemperatureProfile& profile) {
  const int n = profile.size();
  if (n < 1) throw InvalidArgument("mirror_symmetry_score: empty profile");
  double score = 0.0;
  for (int i = 0; i < n / 2; ++i)
    score = std::max(score, std::abs(profile.temps[static_cast<std::size_t>(i)] -
                                     profile.temps[static_cast<std::size_t>(n - 1 - i)]));
  return score;
}

}  // namespace iontherm
