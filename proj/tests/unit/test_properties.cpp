// Randomised structural properties of the steady state.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "iontherm/experiments.hpp"

using namespace iontherm;

namespace {

struct Instance {
  ScenarioConfig scenario;
};

ScenarioConfig random_scenario(std::mt19937_64& rng, bool symmetric) {
  std::uniform_int_distribution<int> size(2, 24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScenarioConfig s;
  const int n = size(rng);
  s.chain = {u(rng) < 0.5 ? TrapKind::uniform : TrapKind::harmonic, n, 10.0, std::nullopt};
  for (int i = 1; i <= (symmetric ? (n + 1) / 2 : n); ++i) {
    if (u(rng) < 0.5 && !(i == 1)) continue;
    const double gamma = std::pow(10.0, -2.0 + 2.5 * u(rng));
    const double temp = 10.0 * u(rng);
    s.attachments.push_back({i, gamma, temp});
    if (symmetric && n + 1 - i != i) s.attachments.push_back({n + 1 - i, gamma, temp});
  }
  if (u(rng) < 0.5) s.background = BackgroundBath{1e-3, 10.0 * u(rng)};
  return s;
}

void set_temperatures(ScenarioConfig& s, const std::vector<double>& temps) {
  for (std::size_t k = 0; k < s.attachments.size(); ++k) s.attachments[k].temperature = temps[k];
}

}  // namespace

TEST(Properties, AffineInBathTemperatures) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    ScenarioConfig s = random_scenario(rng, false);
    s.background.reset();
    const ChainModel base = build_model(s);
    std::vector<double> a, b, mix;
    for (std::size_t k = 0; k < s.attachments.size(); ++k) {
      a.push_back(u(rng));
      b.push_back(u(rng));
      mix.push_back(0.3 * a.back() + 0.7 * b.back());
    }
    auto steady_for = [&](const std::vector<double>& temps) {
      ScenarioConfig c = s;
      set_temperatures(c, temps);
      return steady_profile(build_model(base.chain, base.coupling, c)).temps;
    };
    const auto ta = steady_for(a), tb = steady_for(b), tm = steady_for(mix);
    for (std::size_t i = 0; i < ta.size(); ++i) EXPECT_NEAR(tm[i], 0.3 * ta[i] + 0.7 * tb[i], 1e-9);
  }
}

TEST(Properties, ScalingOfShiftedTemperatures) {
  // T + 1/2 is linear in the bath values T^B + 1/2.
  ScenarioConfig s = edge_driven_scenario(15, 0.4);
  s.attachments.push_back({8, 0.05, 6.0});
  const auto t1 = steady_profile(build_model(s)).temps;
  for (auto& a : s.attachments) a.temperature = 3.0 * (a.temperature + 0.5) - 0.5;
  const auto t3 = steady_profile(build_model(s)).temps;
  for (std::size_t i = 0; i < t1.size(); ++i) EXPECT_NEAR(t3[i] + 0.5, 3.0 * (t1[i] + 0.5), 1e-9);
}

TEST(Properties, MirrorSymmetricConfigurations) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ScenarioConfig s = random_scenario(rng, true);
    EXPECT_LT(mirror_symmetry_score(steady_profile(build_model(s))), 1e-8) << trial;
  }
}

TEST(Properties, NormalisedConvexBound) {
  // With every bath at T = 0 the chain still sits at T0_i != 0 (zero-point
  // energy redistributed by the coupling). Dividing by 1 + 2 T0_i restores an
  // exact convex bound on T + 1/2.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const ScenarioConfig s = random_scenario(rng, false);
    const ChainModel m = build_model(s);
    ScenarioConfig zero = s;
    for (auto& a : zero.attachments) a.temperature = 0.0;
    if (zero.background) zero.background->temperature = 0.0;
    // Raw moments: zero-temperature baths can leave a slightly negative T0_i.
    const ChainModel zm = build_model(m.chain, m.coupling, zero);
    const SecondMoments z0 = steady_moments(zm.decomp, zm.strengths);
    std::vector<double> t0;
    for (int i = 0; i < m.chain.size(); ++i) {
      const double w = m.coupling.local_freqs(i);
      t0.push_back(0.5 * (w * z0.x2(i) + z0.p2(i) / w - 1.0));
    }
    const auto t = steady_profile(m).temps;

    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < m.profile.size(); ++i) {
      if (!m.profile.is_driven(i)) continue;
      lo = std::min(lo, m.profile.temperatures[i]);
      hi = std::max(hi, m.profile.temperatures[i]);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      EXPECT_GT(1.0 + 2.0 * t0[i], 0.0);
      const double scaled = (t[i] + 0.5) / (1.0 + 2.0 * t0[i]);
      EXPECT_GE(scaled, lo + 0.5 - 1e-9) << trial << " ion " << i;
      EXPECT_LE(scaled, hi + 0.5 + 1e-9) << trial << " ion " << i;
    }
  }
}

TEST(Properties, SingleIonFluctuationDissipation) {
  for (double gamma : {1e-4, 0.01, 1.0, 15.0})
    for (double temp : {0.0, 0.3, 7.0}) {
      ScenarioConfig s;
      s.chain = {TrapKind::uniform, 1, 10.0, std::nullopt};
      s.attachments = {{1, gamma, temp}};
      EXPECT_NEAR(steady_profile(build_model(s)).temps[0], temp, 1e-12);
    }
}

TEST(Properties, LongTimeForgetsInitialState) {
  const ChainModel m = build_model(background_scenario(10, 0.2, 0.01));
  const double t = 1e5;
  const auto cold = temperature_of(
      variance_at(m.decomp, thermal_initial(std::vector<double>(10, 0.0), m.coupling), m.strengths, t), m.coupling);
  const auto hot = temperature_of(
      variance_at(m.decomp, thermal_initial(std::vector<double>(10, 50.0), m.coupling), m.strengths, t), m.coupling);
  const auto st = steady_profile(m);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(cold.temps[i], hot.temps[i], 1e-10);
    EXPECT_NEAR(cold.temps[i], st.temps[i], 1e-10);
  }
}
