#include "cli.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <nlohmann/json.hpp>

#include "iontherm/config.hpp"
#include "iontherm/errors.hpp"
#include "iontherm/experiments.hpp"
#include "iontherm/output.hpp"
#include "iontherm/units.hpp"
#include "iontherm/validation.hpp"

namespace iontherm {

namespace {

struct Globals {
  std::string config;
  std::string output;
  std::string format;
  std::uint64_t seed = 42;
  int threads = 1;
  bool quiet = false;
};

struct GridFlags {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

struct Context {
  Globals g;
  std::optional<RunConfig> cfg;

  const RunConfig& config(const char* command) {
    if (!cfg) {
      if (g.config.empty()) throw InvalidArgument(std::string(command) + " needs --config <path>");
      cfg = load_config(g.config);
    }
    return *cfg;
  }

  OutputFormat format() const {
    if (!g.format.empty()) return *parse_output_format(g.format);
    if (cfg && cfg->output) return cfg->output->format;
    return OutputFormat::csv;
  }

  std::string path() const {
    if (!g.output.empty()) return g.output;
    if (cfg && cfg->output) return cfg->output->path;
    return {};
  }

  void emit(const std::string& text) const { write_text(path(), text); }

  void note(const std::string& text) const {
    if (!g.quiet) std::cerr << text << '\n';
  }
};

const SweepAxis* find_axis(const RunConfig& cfg, SweepParameter p) {
  for (const auto& a : cfg.scenario.sweep)
    if (a.parameter == p) return &a;
  return nullptr;
}

std::vector<double> grid_or(const RunConfig& cfg, SweepParameter p, const GridFlags& flags) {
  if (const SweepAxis* axis = find_axis(cfg, p)) return axis->values;
  if (flags.points < 2 || !(flags.min > 0.0) || !(flags.max > flags.min))
    throw InvalidArgument("grid flags need 0 < --min < --max and --points >= 2");
  return log_grid(flags.min, flags.max, flags.points);
}

void add_grid_flags(CLI::App* cmd, GridFlags& flags, const char* what) {
  cmd->add_option("--min", flags.min, std::string("smallest ") + what)->capture_default_str();
  cmd->add_option("--max", flags.max, std::string("largest ") + what)->capture_default_str();
  cmd->add_option("--points", flags.points, "log-spaced grid points")->capture_default_str();
}

std::string profile_text(const Context& ctx, const TemperatureProfile& p, std::span<const double> z,
                         std::span<const double> w) {
  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) write_profile_json(os, p, z, w);
  else write_profile_csv(os, p, z, w);
  return os.str();
}

std::string sweep_text(const Context& ctx, const SweepResult& r) {
  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) write_sweep_json(os, r);
  else if (r.axes.size() == 2) write_map_csv(os, r);
  else write_sweep_csv(os, r);
  return os.str();
}

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// positions ---------------------------------------------------------------

struct PositionsFlags {
  int n = 20;
  std::string trap = "uniform";
  double omega_x = 10.0;
  std::optional<double> omega_z;
};

void run_positions(Context& ctx, const PositionsFlags& f) {
  TrapSpec spec;
  if (!ctx.g.config.empty()) {
    spec = ctx.config("positions").scenario.chain;
  } else {
    spec = TrapSpec{f.trap == "harmonic" ? TrapKind::harmonic : TrapKind::uniform, f.n, f.omega_x, f.omega_z};
    if (spec.kind == TrapKind::uniform && spec.omega_z) throw InvalidArgument("--omega-z needs --trap harmonic");
  }
  const IonChain chain = make_chain(spec);
  const CouplingMatrix coupling = build_coupling_matrix(chain, spec.omega_x);
  const auto w = as_vector(coupling.local_freqs);

  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) {
    nlohmann::json j = {{"n", chain.size()}, {"trap", to_string(chain.kind)}, {"z", chain.positions},
                        {"omega_i", w}, {"max_gap", chain.max_gap}};
    if (chain.kind == TrapKind::harmonic) j["omega_z"] = chain.omega_z;
    os << j.dump(2) << '\n';
  } else {
    os << "ion_index,z,omega_i\n";
    for (int i = 0; i < chain.size(); ++i)
      os << i + 1 << ',' << format_real(chain.positions[static_cast<std::size_t>(i)]) << ','
         << format_real(w[static_cast<std::size_t>(i)]) << '\n';
  }
  if (chain.kind == TrapKind::harmonic) ctx.note("omega_z = " + format_real(chain.omega_z));
  ctx.emit(os.str());
}

// steady / evolve ---------------------------------------------------------

void run_steady(Context& ctx) {
  const RunConfig& cfg = ctx.config("steady");
  const ChainModel model = build_model(cfg.scenario);
  const TemperatureProfile p = steady_profile(model);
  if (p.clamped > 0) ctx.note("clamped " + std::to_string(p.clamped) + " slightly negative temperatures");
  ctx.emit(profile_text(ctx, p, model.chain.positions, as_vector(model.coupling.local_freqs)));
}

struct EvolveFlags {
  double t_max = 0.0;
  int points = 100;
  std::string spacing = "log";
};

void run_evolve(Context& ctx, const EvolveFlags& f) {
  const RunConfig& cfg = ctx.config("evolve");
  std::vector<double> times;
  if (const SweepAxis* axis = find_axis(cfg, SweepParameter::time)) {
    times = axis->values;
  } else if (f.t_max > 0.0) {
    times = expand_time_grid({f.t_max, f.points, f.spacing == "linear" ? GridSpacing::linear : GridSpacing::log, {}});
  } else if (cfg.times) {
    times = expand_time_grid(*cfg.times);
  } else {
    throw InvalidArgument("evolve needs a time grid: a \"times\" block, a \"time\" sweep axis or --t-max");
  }
  const ChainModel model = build_model(cfg.scenario);
  const std::vector<double> t0(static_cast<std::size_t>(model.chain.size()), cfg.scenario.initial_temp);
  const InitialMoments initial = thermal_initial(t0, model.coupling);
  const TemperatureSeries series = evolve_temperatures(model.decomp, initial, model.strengths, model.coupling, times);
  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) write_series_json(os, series);
  else write_series_csv(os, series);
  ctx.emit(os.str());
}

// sweeps ------------------------------------------------------------------

void run_sweep_gamma(Context& ctx, const GridFlags& f) {
  const RunConfig& cfg = ctx.config("sweep-gamma");
  const auto grid = grid_or(cfg, SweepParameter::gamma, f);
  ctx.emit(sweep_text(ctx, run_gamma_sweep(cfg.scenario, grid, ctx.g.threads)));
}

void run_map_gamma(Context& ctx, const GridFlags& f) {
  const RunConfig& cfg = ctx.config("map-gamma");
  const auto g1 = grid_or(cfg, SweepParameter::gamma1, f);
  const auto g2 = grid_or(cfg, SweepParameter::gamma2, f);
  ctx.emit(sweep_text(ctx, run_gamma_map(cfg.scenario, g1, g2, ctx.g.threads)));
}

void run_sweep_background(Context& ctx, const GridFlags& f, double t_bg) {
  const RunConfig& cfg = ctx.config("sweep-background");
  ScenarioConfig base = cfg.scenario;
  if (!base.background) base.background = BackgroundBath{0.0, t_bg};
  const auto grid = grid_or(cfg, SweepParameter::gamma_bg, f);
  ctx.emit(sweep_text(ctx, run_background_sweep(base, grid, ctx.g.threads)));
}

// dynamics ----------------------------------------------------------------

std::string optional_time(const std::optional<double>& t) { return t ? format_real(*t) : "not reached"; }

void run_dynamics_cmd(Context& ctx, const std::string& preset, const DynamicsOptions& opts) {
  const DynamicsKind kind = *parse_dynamics_kind(preset);
  const DynamicsResult r = run_dynamics_scenario(kind, opts);

  std::ostringstream summary;
  summary << "preset " << preset << ", N = " << opts.n << ", gamma = " << format_real(opts.gamma)
          << ", 2 min Re(lambda) = " << format_real(r.min_sum_real);
  for (std::size_t k = 0; k < r.relaxation.driven_ions.size(); ++k)
    summary << "\n  t1(ion " << r.relaxation.driven_ions[k] << ") = " << optional_time(r.relaxation.t1[k]);
  summary << "\n  t2 = " << optional_time(r.relaxation.t2);
  if (!r.diagnostic.empty()) summary << "\n  " << r.diagnostic;
  ctx.note(summary.str());

  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) write_dynamics_json(os, r);
  else write_series_csv(os, r.series);
  ctx.emit(os.str());
}

// validate ----------------------------------------------------------------

int run_validate(Context& ctx, ValidationOptions opts) {
  opts.seed = ctx.g.seed;
  opts.threads = ctx.g.threads;
  const ValidationReport report = run_validation(opts);
  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : report.checks)
      checks.push_back({{"name", c.name},
                        {"max_deviation", c.max_deviation},
                        {"tolerance", c.tolerance},
                        {"comparisons", c.comparisons},
                        {"failures", c.failures},
                        {"passed", c.passed()}});
    nlohmann::json j = {{"seed", opts.seed},
                        {"instances", report.instances.size()},
                        {"redrawn", report.redrawn},
                        {"checks", checks},
                        {"passed", report.passed()}};
    os << j.dump(2) << '\n';
  } else {
    os << "seed " << opts.seed << '\n' << format_report(report);
  }
  ctx.emit(os.str());
  return report.passed() ? kExitOk : kExitValidation;
}

// units -------------------------------------------------------------------

struct UnitsFlags {
  double mass = 171.0;
  double d0 = 10e-6;
  double omega_x = 10.0;
  double gamma = 0.1;
  double t2 = 400.0;
};

void run_units(Context& ctx, const UnitsFlags& f) {
  const UnitSystem u = to_physical_units(f.mass, f.d0);
  struct Row {
    const char* quantity;
    double dimensionless;
    double value;
    const char* unit;
  };
  const double two_pi = 2.0 * constants::pi;
  const std::vector<Row> rows = {
      {"frequency_unit", 1.0, u.frequency_unit_rad_per_s, "rad/s"},
      {"frequency_unit_hz", 1.0, u.frequency_unit_hz, "Hz"},
      {"time_unit", 1.0, u.time_unit_s, "s"},
      {"energy_unit", 1.0, u.energy_unit_joule, "J"},
      {"omega_x", f.omega_x, f.omega_x * u.frequency_unit_rad_per_s, "rad/s"},
      {"omega_x/2pi", f.omega_x, f.omega_x * u.frequency_unit_hz / 1e6, "MHz"},
      {"gamma", f.gamma, f.gamma * u.frequency_unit_rad_per_s / 1e3, "1/ms"},
      {"gamma/2pi", f.gamma, f.gamma * u.frequency_unit_hz / 1e3, "kHz"},
      {"time (t/frequency_unit)", f.t2, f.t2 * u.time_unit_s * 1e3, "ms"},
      {"time (2pi t/frequency_unit)", f.t2, f.t2 * two_pi * u.time_unit_s * 1e3, "ms"},
  };
  std::ostringstream os;
  if (ctx.format() == OutputFormat::json) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& r : rows)
      table.push_back({{"quantity", r.quantity}, {"dimensionless", r.dimensionless}, {"value", r.value},
                       {"unit", r.unit}});
    os << nlohmann::json{{"mass_amu", f.mass}, {"d0_m", f.d0}, {"rows", table}}.dump(2) << '\n';
  } else {
    os << "quantity,dimensionless,value,unit\n";
    for (const auto& r : rows)
      os << r.quantity << ',' << format_real(r.dimensionless) << ',' << format_real(r.value) << ',' << r.unit
         << '\n';
  }
  ctx.emit(os.str());
}

int exit_code_for(const Error& e) {
  if (e.is_config_error() || e.kind() == ErrorKind::io_error) return kExitConfig;
  return kExitNumerical;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Steady-state and transient temperature profiles of laser-driven ion chains", "iontherm"};
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  app.add_option("--config", ctx.g.config, "JSON run configuration");
  app.add_option("--output", ctx.g.output, "output file (default: standard output)");
  app.add_option("--format", ctx.g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", ctx.g.seed, "random seed for Monte-Carlo checks")->capture_default_str();
  app.add_option("--threads", ctx.g.threads, "worker threads for sweeps and trajectories")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  app.add_flag("--quiet", ctx.g.quiet, "suppress diagnostics on standard error");

  PositionsFlags pos;
  auto* positions = app.add_subcommand("positions", "equilibrium chain positions and local frequencies");
  positions->add_option("--n", pos.n, "number of ions")->capture_default_str();
  positions->add_option("--trap", pos.trap, "uniform or harmonic")
      ->check(CLI::IsMember({"uniform", "harmonic"}))
      ->capture_default_str();
  positions->add_option("--omega-x", pos.omega_x, "transverse trap frequency")->capture_default_str();
  positions->add_option("--omega-z", pos.omega_z, "axial frequency (harmonic; default: calibrated)");

  auto* steady = app.add_subcommand("steady", "steady-state temperature profile");

  EvolveFlags ev;
  auto* evolve = app.add_subcommand("evolve", "temperature profiles on a time grid");
  evolve->add_option("--t-max", ev.t_max, "last time (overrides the config grid)");
  evolve->add_option("--points", ev.points, "grid points after t = 0")->capture_default_str();
  evolve->add_option("--spacing", ev.spacing, "linear or log")
      ->check(CLI::IsMember({"linear", "log"}))
      ->capture_default_str();

  GridFlags sweep_flags{1e-3, 1e2, 40};
  auto* sweep = app.add_subcommand("sweep-gamma", "steady profiles over a common driving rate");
  add_grid_flags(sweep, sweep_flags, "gamma");

  GridFlags map_flags{1e-3, 1e2, 30};
  auto* map = app.add_subcommand("map-gamma", "middle-ion temperature over (gamma1, gamma2)");
  add_grid_flags(map, map_flags, "rate");

  GridFlags bg_flags{1e-5, 1e-1, 30};
  double t_bg = 4.0;
  auto* background = app.add_subcommand("sweep-background", "steady profiles over the background rate");
  add_grid_flags(background, bg_flags, "gamma_bg");
  background->add_option("--t-bg", t_bg, "background temperature if the config has none")->capture_default_str();

  std::string preset;
  DynamicsOptions dyn;
  auto* dynamics = app.add_subcommand("dynamics", "relaxation of a 20-ion chain from T = 5");
  dynamics->add_option("--preset", preset, "uniform, harmonic or harmonic-bg")
      ->required()
      ->check(CLI::IsMember({"uniform", "harmonic", "harmonic-bg"}));
  dynamics->add_option("--n", dyn.n, "number of ions")->capture_default_str();
  dynamics->add_option("--gamma", dyn.gamma, "driving rate")->capture_default_str();
  dynamics->add_option("--epsilon", dyn.epsilon, "convergence threshold in phonons")->capture_default_str();
  dynamics->add_option("--points", dyn.points, "log grid points")->capture_default_str();
  dynamics->add_option("--t-end", dyn.t_end_over_gamma, "grid end in units of 1/gamma (0: preset default)");

  ValidationOptions val;
  bool no_mc = false;
  auto* validate = app.add_subcommand("validate", "compare the spectral solver with the oracles");
  validate->add_option("--instances", val.instances, "random chains")->capture_default_str();
  validate->add_option("--n-traj", val.n_traj, "Monte-Carlo trajectories per chain")->capture_default_str();
  validate->add_flag("--no-monte-carlo", no_mc, "skip the stochastic check");

  UnitsFlags uf;
  auto* units = app.add_subcommand("units", "conversion to SI units");
  units->add_option("--mass", uf.mass, "ion mass in amu")->capture_default_str();
  units->add_option("--d0", uf.d0, "length unit in metres")->capture_default_str();
  units->add_option("--omega-x", uf.omega_x, "dimensionless trap frequency to convert")->capture_default_str();
  units->add_option("--gamma", uf.gamma, "dimensionless rate to convert")->capture_default_str();
  units->add_option("--time", uf.t2, "dimensionless time to convert")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!ctx.g.config.empty()) ctx.config("");
    if (*positions) run_positions(ctx, pos);
    else if (*steady) run_steady(ctx);
    else if (*evolve) run_evolve(ctx, ev);
    else if (*sweep) run_sweep_gamma(ctx, sweep_flags);
    else if (*map) run_map_gamma(ctx, map_flags);
    else if (*background) run_sweep_background(ctx, bg_flags, t_bg);
    else if (*dynamics) run_dynamics_cmd(ctx, preset, dyn);
    else if (*validate) {
      val.monte_carlo = !no_mc;
      return run_validate(ctx, val);
    } else if (*units) run_units(ctx, uf);
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "iontherm: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "iontherm: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace iontherm
