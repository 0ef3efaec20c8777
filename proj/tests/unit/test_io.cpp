#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "iontherm/config.hpp"
#include "iontherm/errors.hpp"
#include "iontherm/output.hpp"
#include "iontherm/units.hpp"

using namespace iontherm;

namespace {

const char* kFig1 = R"({
  "n": 100,
  "trap": {"kind": "uniform", "omega_x": 10},
  "baths": [
    {"ion": 1, "gamma": 10, "temperature": 2},
    {"ion": 100, "gamma": 10, "temperature": 10}
  ]
})";

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const InvalidConfig& e) {
    return e.violations();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string cell; std::getline(is, cell, ',');) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Config, MinimalFig1) {
  const RunConfig c = parse_config(kFig1);
  EXPECT_EQ(c.scenario.chain.n, 100);
  EXPECT_EQ(c.scenario.chain.kind, TrapKind::uniform);
  EXPECT_EQ(c.scenario.chain.omega_x, 10.0);
  ASSERT_EQ(c.scenario.attachments.size(), 2u);
  EXPECT_EQ(c.scenario.attachments[1].ion, 100);
  EXPECT_EQ(c.scenario.attachments[1].temperature, 10.0);
  EXPECT_FALSE(c.scenario.background);
  EXPECT_FALSE(c.times);
  EXPECT_FALSE(c.output);
}

TEST(Config, FullDocument) {
  const RunConfig c = parse_config(R"({
    "n": 20, "trap": {"kind": "harmonic", "omega_x": 10, "omega_z": 0.5},
    "baths": [{"ion": 1, "gamma": 0.1, "temperature": 2}],
    "background": {"gamma": 1e-4, "temperature": 4},
    "initial_temperature": 5,
    "times": {"t_max": 100, "points": 4, "spacing": "linear"},
    "sweep": [{"parameter": "gamma1", "min": 0.001, "max": 100, "points": 6},
              {"parameter": "gamma2", "values": [1, 10]}],
    "output": {"path": "out.json", "format": "json"}
  })");
  EXPECT_EQ(c.scenario.chain.kind, TrapKind::harmonic);
  EXPECT_EQ(c.scenario.chain.omega_z, 0.5);
  EXPECT_EQ(c.scenario.background->gamma, 1e-4);
  EXPECT_EQ(c.scenario.initial_temp, 5.0);
  ASSERT_EQ(c.scenario.sweep.size(), 2u);
  EXPECT_EQ(c.scenario.sweep[0].parameter, SweepParameter::gamma1);
  EXPECT_EQ(c.scenario.sweep[0].values.size(), 6u);
  EXPECT_NEAR(c.scenario.sweep[0].values[3], 1.0, 1e-12);
  EXPECT_EQ(c.scenario.sweep[1].values, (std::vector<double>{1.0, 10.0}));
  EXPECT_EQ(expand_time_grid(*c.times), (std::vector<double>{0.0, 25.0, 50.0, 75.0, 100.0}));
  EXPECT_EQ(c.output->path, "out.json");
  EXPECT_EQ(c.output->format, OutputFormat::json);
}

TEST(Config, BathIndexOutOfRange) {
  const auto v = violations_of(R"({"n": 3, "trap": {"kind": "uniform", "omega_x": 10},
    "baths": [{"ion": 0, "gamma": 0.1, "temperature": 2}, {"ion": 2, "gamma": 0.1, "temperature": 2}]})");
  EXPECT_TRUE(any_contains(v, "ion out of range [1,3]"));
}

TEST(Config, DuplicateBathIndex) {
  const auto v = violations_of(R"({"n": 3, "trap": {"kind": "uniform", "omega_x": 10},
    "baths": [{"ion": 2, "gamma": 0.1, "temperature": 2}, {"ion": 2, "gamma": 0.1, "temperature": 2}]})");
  EXPECT_TRUE(any_contains(v, "duplicate"));
}

TEST(Config, AggregatesSemanticViolations) {
  const auto v = violations_of(R"({"n": 3, "trap": {"kind": "uniform", "omega_x": -1, "omega_z": 2, "colour": 1},
    "baths": [{"ion": 9, "gamma": -0.1, "temperature": 2}],
    "sweep": [{"parameter": "omega", "values": [1, 2]}, {"parameter": "gamma", "values": [2, 1]}],
    "output": {"format": "xml"}, "extra": true})");
  EXPECT_TRUE(any_contains(v, "unknown key \"extra\""));
  EXPECT_TRUE(any_contains(v, "unknown key \"colour\""));
  EXPECT_TRUE(any_contains(v, "omega_x: must be positive"));
  EXPECT_TRUE(any_contains(v, "only applies to harmonic"));
  EXPECT_TRUE(any_contains(v, "ion out of range"));
  EXPECT_TRUE(any_contains(v, "gamma must be"));
  EXPECT_TRUE(any_contains(v, "unknown parameter \"omega\""));
  EXPECT_TRUE(any_contains(v, "strictly increasing"));
  EXPECT_TRUE(any_contains(v, "expected \"csv\" or \"json\""));
  EXPECT_GE(v.size(), 9u);
}

TEST(Config, MissingAndMistypedFields) {
  const auto v = violations_of(R"({"n": 2.5, "trap": {"kind": "ring"}, "baths": {"ion": 1}})");
  EXPECT_TRUE(any_contains(v, "expected an integer"));
  EXPECT_TRUE(any_contains(v, "expected \"uniform\" or \"harmonic\""));
  EXPECT_TRUE(any_contains(v, "missing required key \"omega_x\""));
  EXPECT_TRUE(any_contains(v, "baths: expected an array"));
  EXPECT_TRUE(any_contains(violations_of("{}"), "missing required key \"trap\""));
  EXPECT_TRUE(any_contains(violations_of("[1, 2]"), "expected an object"));
}

TEST(Config, SyntaxErrorHasLineAndColumn) {
  try {
    parse_config("{\n  \"n\": 3,\n  \"trap\": {\"kind\": \"uniform\",, }\n}");
    FAIL();
  } catch (const InvalidConfig& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 3"), std::string::npos) << what;
    EXPECT_NE(what.find("column 30"), std::string::npos) << what;
  }
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "iontherm_test_config.json";
  {
    std::ofstream out(path);
    out << kFig1;
  }
  EXPECT_EQ(load_config(path.string()).scenario.chain.n, 100);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path.string()), IoError);
}

TEST(TimeGrid, LogSpacing) {
  const auto g = expand_time_grid({1e4, 5, GridSpacing::log, 1.0});
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 1.0);
  EXPECT_NEAR(g[3], 100.0, 1e-9);
  EXPECT_EQ(g[5], 1e4);
  const auto d = expand_time_grid({1e4, 2, GridSpacing::log, std::nullopt});
  EXPECT_EQ(d[1], 1e-2);
}

TEST(Output, RealsRoundTripExactly) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 40 - 20);
    const std::string s = format_real(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
  EXPECT_EQ(format_real(INFINITY), "inf");
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(Output, ProfileCsvShape) {
  const TemperatureProfile p{{2.0, 10.0}, kSteadyTime, 0};
  const std::vector<double> z{0.0, 1.0}, w{9.9, 9.9};
  std::ostringstream os;
  write_profile_csv(os, p, z, w);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "ion_index,z,omega_i,temperature");
  EXPECT_EQ(lines[2], "2,1,9.9000000000000004,10");
  const std::vector<double> short_z{0.0};
  EXPECT_THROW(write_profile_csv(os, p, short_z, w), InvalidArgument);
}

TEST(Output, SeriesCsvRoundTrip) {
  TemperatureSeries s;
  for (int k = 0; k < 4; ++k) s.push_back({{0.1 * k, 1.0 / 3.0 + k, std::sqrt(2.0) * k}, 0.7 * k, 0});
  std::ostringstream os;
  write_series_csv(os, s);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "time,ion_1,ion_2,ion_3");
  for (int k = 0; k < 4; ++k) {
    const auto cells = split(lines[k + 1]);
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(std::stod(cells[0]), s[k].time);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(std::stod(cells[i + 1]), s[k].temps[i]);
  }
}

TEST(Output, MapCsvShape) {
  SweepResult map;
  const auto g = std::vector<double>(30, 0.0);
  map.axes = {{SweepParameter::gamma1, {}}, {SweepParameter::gamma2, {}}};
  for (int k = 0; k < 30; ++k) {
    map.axes[0].values.push_back(k + 1.0);
    map.axes[1].values.push_back(0.5 * (k + 1));
  }
  for (int k = 0; k < 900; ++k) map.scalars.push_back(k);
  std::ostringstream os;
  write_map_csv(os, map);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 901u);
  EXPECT_EQ(lines[0], "gamma1,gamma2,t_m");
  EXPECT_EQ(lines[1], "1,0.5,0");
  EXPECT_EQ(lines[31], "2,0.5,30");
  map.scalars.pop_back();
  EXPECT_THROW(write_map_csv(os, map), InvalidArgument);
}

TEST(Output, SweepCsvShape) {
  SweepResult r;
  r.axes = {{SweepParameter::gamma_bg, {1e-3, 1e-2}}};
  r.profiles = {{{1.0, 2.0}, kSteadyTime, 0}, {{3.0, 4.0}, kSteadyTime, 0}};
  r.positions = {0.0, 1.0};
  r.local_freqs = {9.0, 9.0};
  std::ostringstream os;
  write_sweep_csv(os, r);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "gamma_bg,ion_index,z,omega_i,temperature");
  EXPECT_EQ(lines[4], "0.01,2,1,9,4");
}

TEST(Output, WriteTextErrorsCarryPath) {
  try {
    write_text("/nonexistent-dir/out.csv", "x");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), "/nonexistent-dir/out.csv");
  }
  const auto path = std::filesystem::temp_directory_path() / "iontherm_write_text.csv";
  write_text(path.string(), "a,b\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b");
  std::filesystem::remove(path);
}

TEST(Units, YtterbiumTenMicrons) {
  const UnitSystem u = to_physical_units(171.0, 10e-6);
  const double expected =
      std::sqrt(constants::coulomb_constant * constants::elementary_charge * constants::elementary_charge /
                (171.0 * constants::atomic_mass_unit * 1e-15));
  EXPECT_DOUBLE_EQ(u.frequency_unit_rad_per_s, expected);
  EXPECT_NEAR(u.frequency_unit_rad_per_s, 9.01e5, 0.01e5);
  EXPECT_NEAR(u.frequency_unit_hz, 1.435e5, 0.001e5);
  EXPECT_DOUBLE_EQ(u.time_unit_s, 1.0 / u.frequency_unit_rad_per_s);
  EXPECT_NEAR(10.0 * u.frequency_unit_hz / 1e6, 1.43, 0.01);
  EXPECT_NEAR(0.1 * u.frequency_unit_hz / 1e3, 14.3, 0.1);
  EXPECT_NEAR(400.0 * u.time_unit_s * 1e3, 0.44, 0.01);
  EXPECT_NEAR(u.energy_unit_joule,
              constants::coulomb_constant * constants::elementary_charge * constants::elementary_charge / 10e-6,
              1e-35);
  EXPECT_THROW(to_physical_units(0.0, 1e-5), InvalidArgument);
  EXPECT_THROW(to_physical_units(171.0, -1.0), InvalidArgument);
}
