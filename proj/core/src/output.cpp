#include "iontherm/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iontherm/errors.hpp"

namespace iontherm {

using json = nlohmann::json;

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

void write_profile_csv(std::ostream& os, const TemperatureProfile& profile, std::span<const double> positions,
                       std::span<const double> local_freqs) {
  const auto n = profile.temps.size();
  if (positions.size() != n || local_freqs.size() != n)
    throw InvalidArgument("write_profile_csv: column lengths differ");
  os << "ion_index,z,omega_i,temperature\n";
  for (std::size_t i = 0; i < n; ++i)
    os << i + 1 << ',' << format_real(positions[i]) << ',' << format_real(local_freqs[i]) << ','
       << format_real(profile.temps[i]) << '\n';
}

void write_series_csv(std::ostream& os, const TemperatureSeries& series) {
  const std::size_t n = series.empty() ? 0 : series.front().temps.size();
  os << "time";
  for (std::size_t i = 0; i < n; ++i) os << ",ion_" << i + 1;
  os << '\n';
  for (const auto& p : series) {
    if (p.temps.size() != n) throw InvalidArgument("write_series_csv: ragged series");
    os << format_real(p.time);
    for (double t : p.temps) os << ',' << format_real(t);
    os << '\n';
  }
}

void write_map_csv(std::ostream& os, const SweepResult& map) {
  if (map.axes.size() != 2 || map.scalars.size() != map.axes[0].values.size() * map.axes[1].values.size())
    throw InvalidArgument("write_map_csv: result is not a two-axis map");
  os << "gamma1,gamma2,t_m\n";
  const auto& g1 = map.axes[0].values;
  const auto& g2 = map.axes[1].values;
  for (std::size_t r = 0; r < g1.size(); ++r)
    for (std::size_t c = 0; c < g2.size(); ++c)
      os << format_real(g1[r]) << ',' << format_real(g2[c]) << ',' << format_real(map.scalars[r * g2.size() + c])
         << '\n';
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  if (sweep.axes.size() != 1 || sweep.profiles.size() != sweep.axes[0].values.size())
    throw InvalidArgument("write_sweep_csv: result is not a one-axis sweep");
  const auto& axis = sweep.axes[0];
  os << to_string(axis.parameter) << ",ion_index,z,omega_i,temperature\n";
  for (std::size_t k = 0; k < axis.values.size(); ++k) {
    const auto& prof = sweep.profiles[k];
    for (std::size_t i = 0; i < prof.temps.size(); ++i)
      os << format_real(axis.values[k]) << ',' << i + 1 << ',' << format_real(sweep.positions[i]) << ','
         << format_real(sweep.local_freqs[i]) << ',' << format_real(prof.temps[i]) << '\n';
  }
}

namespace {

json time_value(double t) {
  if (std::isinf(t)) return "inf";
  return t;
}

json profile_json(const TemperatureProfile& p) {
  return {{"time", time_value(p.time)}, {"temperatures", p.temps}, {"clamped", p.clamped}};
}

json scenario_json(const ScenarioConfig& s) {
  json baths = json::array();
  for (const auto& a : s.attachments) baths.push_back({{"ion", a.ion}, {"gamma", a.gamma}, {"temperature", a.temperature}});
  json trap = {{"kind", to_string(s.chain.kind)}, {"omega_x", s.chain.omega_x}};
  if (s.chain.omega_z) trap["omega_z"] = *s.chain.omega_z;
  json out = {{"n", s.chain.n}, {"trap", trap}, {"baths", baths}, {"initial_temperature", s.initial_temp}};
  if (s.background) out["background"] = {{"gamma", s.background->gamma}, {"temperature", s.background->temperature}};
  return out;
}

json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

}  // namespace

void write_profile_json(std::ostream& os, const TemperatureProfile& profile, std::span<const double> positions,
                        std::span<const double> local_freqs) {
  json j = profile_json(profile);
  j["z"] = std::vector<double>(positions.begin(), positions.end());
  j["omega_i"] = std::vector<double>(local_freqs.begin(), local_freqs.end());
  os << j.dump(2) << '\n';
}

void write_series_json(std::ostream& os, const TemperatureSeries& series) {
  json rows = json::array();
  for (const auto& p : series) rows.push_back(profile_json(p));
  os << json{{"series", rows}}.dump(2) << '\n';
}

void write_sweep_json(std::ostream& os, const SweepResult& sweep) {
  json axes = json::array();
  for (const auto& a : sweep.axes) axes.push_back({{"parameter", to_string(a.parameter)}, {"values", a.values}});
  json j = {{"scenario", scenario_json(sweep.scenario)},
            {"axes", axes},
            {"z", sweep.positions},
            {"omega_i", sweep.local_freqs}};
  if (!sweep.profiles.empty()) {
    json profiles = json::array();
    for (const auto& p : sweep.profiles) profiles.push_back(p.temps);
    j["profiles"] = profiles;
  }
  if (!sweep.scalars.empty()) j["t_m"] = sweep.scalars;
  os << j.dump(2) << '\n';
}

void write_dynamics_json(std::ostream& os, const DynamicsResult& r) {
  json t1 = json::array();
  for (std::size_t k = 0; k < r.relaxation.t1.size(); ++k)
    t1.push_back({{"ion", r.relaxation.driven_ions[k]}, {"t1", optional_time(r.relaxation.t1[k])}});
  json per_ion = json::array();
  for (const auto& t : r.relaxation.per_ion) per_ion.push_back(optional_time(t));
  json series = json::array();
  for (const auto& p : r.series) series.push_back(profile_json(p));
  json j = {{"scenario", scenario_json(r.scenario)},
            {"z", r.positions},
            {"omega_i", r.local_freqs},
            {"min_sum_real", r.min_sum_real},
            {"steady", r.steady ? profile_json(*r.steady) : json(nullptr)},
            {"diagnostic", r.diagnostic},
            {"relaxation", {{"t1", t1}, {"t2", optional_time(r.relaxation.t2)}, {"per_ion_t2", per_ion}}},
            {"late_drift", r.late_drift},
            {"series", series}};
  os << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to standard output", "-");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file", path);
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing output file", path);
}

}  // namespace iontherm
