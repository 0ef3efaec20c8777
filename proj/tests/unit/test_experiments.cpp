#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "iontherm/errors.hpp"
#include "iontherm/experiments.hpp"

using namespace iontherm;

namespace {

double sd(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

double mean_of(const TemperatureProfile& p, int first, int last) {
  double s = 0.0;
  for (int i = first; i <= last; ++i) s += p.temps[i - 1];
  return s / (last - first + 1);
}

}  // namespace

TEST(Grids, LogAndLinear) {
  const auto g = log_grid(1e-3, 1e2, 6);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.front(), 1e-3);
  EXPECT_EQ(g.back(), 1e2);
  EXPECT_NEAR(g[3], 1.0, 1e-12);
  const auto l = linear_grid(0.0, 1.0, 5);
  EXPECT_EQ(l, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_THROW(log_grid(0.0, 1.0, 5), InvalidArgument);
  EXPECT_THROW(linear_grid(1.0, 1.0, 5), InvalidArgument);
  EXPECT_THROW(linear_grid(0.0, 1.0, 1), InvalidArgument);
}

TEST(Vocabulary, SweepParametersRoundTrip) {
  for (auto p : {SweepParameter::gamma, SweepParameter::gamma1, SweepParameter::gamma2, SweepParameter::gamma_bg,
                 SweepParameter::hot_ion_index, SweepParameter::time})
    EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
  EXPECT_FALSE(parse_sweep_parameter("omega"));
  EXPECT_EQ(parse_dynamics_kind("harmonic-bg"), DynamicsKind::harmonic_bg);
  EXPECT_FALSE(parse_dynamics_kind("anharmonic"));
}

TEST(Scenarios, ReferenceConfigurations) {
  EXPECT_EQ(middle_ion(100), 50);
  EXPECT_EQ(middle_ion(101), 51);
  EXPECT_EQ(middle_ion(1), 1);
  const ScenarioConfig s = edge_driven_scenario(100, 0.1);
  ASSERT_EQ(s.attachments.size(), 2u);
  EXPECT_EQ(s.attachments[0].ion, 1);
  EXPECT_EQ(s.attachments[0].temperature, 2.0);
  EXPECT_EQ(s.attachments[1].ion, 100);
  EXPECT_EQ(s.attachments[1].temperature, 10.0);
  EXPECT_EQ(s.chain.omega_x, 10.0);
  EXPECT_EQ(edge_driven_scenario(101, 1.0, 30).attachments[1].ion, 30);
  const ScenarioConfig b = background_scenario(100, 0.1, 1e-3);
  ASSERT_TRUE(b.background);
  EXPECT_EQ(b.background->temperature, 4.0);
  const ScenarioConfig d = dynamics_scenario(DynamicsKind::harmonic_bg);
  EXPECT_EQ(d.chain.n, 20);
  EXPECT_EQ(d.chain.kind, TrapKind::harmonic);
  EXPECT_EQ(d.initial_temp, 5.0);
  EXPECT_NEAR(d.background->gamma, 1e-4, 1e-18);
}

TEST(Model, ReusedGeometryMatchesFreshBuild) {
  const ScenarioConfig s = background_scenario(12, 0.3, 0.01);
  const ChainModel fresh = build_model(s);
  const ChainModel reused = build_model(fresh.chain, fresh.coupling, s);
  EXPECT_EQ(steady_profile(fresh).temps, steady_profile(reused).temps);
}

TEST(GammaSweep, PlateauAndWeakDriving) {
  const std::vector<double> gammas{1e-3, 10.0};
  const SweepResult r = run_gamma_sweep(edge_driven_scenario(100, 1.0), gammas);
  ASSERT_EQ(r.profiles.size(), 2u);
  ASSERT_EQ(r.axes.size(), 1u);
  EXPECT_EQ(r.axes[0].parameter, SweepParameter::gamma);
  EXPECT_EQ(r.positions.size(), 100u);
  EXPECT_LT(sd(r.profiles[0].temps), 0.2);
  for (int i = 10; i <= 91; ++i) EXPECT_NEAR(r.profiles[1].temps[i - 1], 6.0, 0.1) << i;
}

TEST(GammaSweep, HotIonSeparatesPlateaus) {
  const std::vector<double> gammas{10.0};
  const SweepResult r = run_gamma_sweep(edge_driven_scenario(101, 1.0, 51), gammas);
  const auto& p = r.profiles[0];
  EXPECT_GT(mean_of(p, 64, 89), mean_of(p, 14, 38) + 1.0);
}

TEST(GammaSweep, ThreadCountDoesNotChangeResults) {
  const auto gammas = log_grid(1e-2, 10.0, 7);
  const SweepResult a = run_gamma_sweep(edge_driven_scenario(30, 1.0), gammas, 1);
  const SweepResult b = run_gamma_sweep(edge_driven_scenario(30, 1.0), gammas, 3);
  for (std::size_t k = 0; k < gammas.size(); ++k) EXPECT_EQ(a.profiles[k].temps, b.profiles[k].temps);
}

TEST(GammaSweep, Validation) {
  const std::vector<double> bad{1.0, 0.5};
  EXPECT_THROW(run_gamma_sweep(edge_driven_scenario(10, 1.0), bad), InvalidArgument);
  ScenarioConfig one = edge_driven_scenario(10, 1.0);
  one.attachments.pop_back();
  const std::vector<double> ok{1.0};
  EXPECT_THROW(run_gamma_sweep(one, ok), InvalidArgument);
}

TEST(GammaMap, DiagonalAndStrongCorner) {
  const std::vector<double> g{10.0, 100.0};
  const SweepResult r = run_gamma_map(edge_driven_scenario(100, 1.0), g, g);
  ASSERT_EQ(r.scalars.size(), 4u);
  EXPECT_NEAR(r.scalars[0], 6.0, 0.1);
  EXPECT_NEAR(r.scalars[3], 6.0, 0.1);
}

TEST(GammaMap, OptimalColdRate) {
  const auto g1 = log_grid(1e-3, 1e2, 26);
  const std::vector<double> g2{10.0};
  const SweepResult r = run_gamma_map(edge_driven_scenario(100, 1.0), g1, g2, 2);
  const auto best = std::min_element(r.scalars.begin(), r.scalars.end()) - r.scalars.begin();
  EXPECT_GE(g1[best], 0.03);
  EXPECT_LE(g1[best], 0.3);
}

TEST(BackgroundSweep, LimitsAndGradient) {
  const std::vector<double> grid{1e-12, 1e-11, 1e-3, 0.1};
  const SweepResult r = run_background_sweep(background_scenario(100, 0.1, 0.0), grid);
  const TemperatureProfile none = steady_profile(build_model(edge_driven_scenario(100, 0.1)));
  // The response to a vanishing background is continuous and linear in gamma_bg.
  double d12 = 0.0, d11 = 0.0;
  for (int i = 0; i < 100; ++i) {
    d12 = std::max(d12, std::abs(r.profiles[0].temps[i] - none.temps[i]));
    d11 = std::max(d11, std::abs(r.profiles[1].temps[i] - none.temps[i]));
  }
  EXPECT_LT(d12, 1e-5);
  EXPECT_NEAR(d11 / d12, 10.0, 0.5);
  EXPECT_GT(linear_fit(r.profiles[2], 2, 99).r_squared, 0.95);
  for (int i = 10; i <= 91; ++i) EXPECT_NEAR(r.profiles[3].temps[i - 1], 4.0, 0.3) << i;
  EXPECT_THROW(run_background_sweep(edge_driven_scenario(10, 0.1), grid), InvalidArgument);
}

TEST(HotIonSweep, MovesTheHeatingBath) {
  const std::vector<int> hot{30, 51};
  const SweepResult r = run_hot_ion_sweep(edge_driven_scenario(101, 10.0), hot);
  ASSERT_EQ(r.profiles.size(), 2u);
  EXPECT_EQ(r.axes[0].parameter, SweepParameter::hot_ion_index);
  EXPECT_NEAR(r.profiles[0].temps[29], 10.0, 0.1);
  EXPECT_NEAR(r.profiles[1].temps[50], 10.0, 0.1);
}

TEST(LinearFit, Conventions) {
  TemperatureProfile flat{std::vector<double>(10, 3.0), 0.0, 0};
  const LinearFit f = linear_fit(flat, 1, 10);
  EXPECT_EQ(f.slope, 0.0);
  EXPECT_EQ(f.r_squared, 1.0);
  TemperatureProfile line;
  for (int i = 1; i <= 10; ++i) line.temps.push_back(0.1 * i + 2.0);
  const LinearFit g = linear_fit(line, 2, 9);
  EXPECT_NEAR(g.slope, 0.1, 1e-12);
  EXPECT_NEAR(g.intercept, 2.0, 1e-12);
  EXPECT_NEAR(g.r_squared, 1.0, 1e-12);
  EXPECT_THROW(linear_fit(line, 3, 4), InvalidArgument);
  EXPECT_THROW(linear_fit(line, 0, 5), InvalidArgument);
  EXPECT_THROW(linear_fit(line, 5, 11), InvalidArgument);
}

TEST(MirrorScore, Cases) {
  TemperatureProfile p{{1.0, 5.0, 2.0, 1.5}, 0.0, 0};
  EXPECT_DOUBLE_EQ(mirror_symmetry_score(p), 3.0);
  TemperatureProfile single{{4.0}, 0.0, 0};
  EXPECT_EQ(mirror_symmetry_score(single), 0.0);

  ScenarioConfig sym = edge_driven_scenario(100, 0.5);
  sym.attachments[1].temperature = 2.0;
  EXPECT_LT(mirror_symmetry_score(steady_profile(build_model(sym))), 1e-8);

  const std::vector<double> gammas{1e-3, 10.0};
  const SweepResult r = run_gamma_sweep(edge_driven_scenario(101, 1.0, 51), gammas);
  EXPECT_LT(mirror_symmetry_score(r.profiles[0]), 0.1);
  EXPECT_GT(mirror_symmetry_score(r.profiles[1]), 1.0);
}

TEST(Dynamics, UniformPreset) {
  DynamicsOptions opts;
  opts.points = 120;
  const DynamicsResult r = run_dynamics_scenario(DynamicsKind::uniform, opts);
  ASSERT_EQ(r.series.size(), 121u);
  EXPECT_EQ(r.series.front().time, 0.0);
  for (double t : r.series.front().temps) EXPECT_NEAR(t, 5.0, 1e-12);
  EXPECT_NEAR(r.series.back().time, 1e6 / opts.gamma, 1e-3);
  ASSERT_TRUE(r.steady);
  EXPECT_TRUE(r.diagnostic.empty());
  EXPECT_EQ(r.relaxation.driven_ions, (std::vector<int>{1, 20}));
  ASSERT_TRUE(r.relaxation.t2);
  // The slowest (zigzag) mode decays at about 1.2e-5, far slower than 1/gamma.
  EXPECT_NEAR(r.min_sum_real, 2.45e-5, 0.05e-5);
  for (double d : r.late_drift) EXPECT_LT(d, 1e-6);
}

TEST(Dynamics, HarmonicWithoutBackgroundNeverSettles) {
  DynamicsOptions opts;
  opts.points = 80;
  const DynamicsResult r = run_dynamics_scenario(DynamicsKind::harmonic, opts);
  EXPECT_FALSE(r.steady);
  EXPECT_FALSE(r.diagnostic.empty());
  EXPECT_FALSE(r.relaxation.t2);
  EXPECT_NEAR(r.series.back().time, 1e9 / opts.gamma, 1.0);
  EXPECT_GT(r.late_drift[static_cast<std::size_t>(middle_ion(20) - 1)], opts.epsilon);
}

TEST(Dynamics, HarmonicWithBackgroundSettles) {
  DynamicsOptions opts;
  opts.points = 120;
  const DynamicsResult r = run_dynamics_scenario(DynamicsKind::harmonic_bg, opts);
  ASSERT_TRUE(r.steady);
  ASSERT_TRUE(r.relaxation.t2);
  for (double d : r.late_drift) EXPECT_LT(d, 1e-6);
}
