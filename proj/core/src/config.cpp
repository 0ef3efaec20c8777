#include "iontherm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iontherm/errors.hpp"

namespace iontherm {

using json = nlohmann::json;

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  return std::nullopt;
}

namespace {

class Checker {
 public:
  std::vector<std::string> violations;

  void fail(const std::string& where, const std::string& what) { violations.push_back(where + ": " + what); }

  void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
      if (!ok.count(key)) fail(where, "unknown key \"" + key + "\"");
  }

  std::optional<double> number(const json& obj, const std::string& where, const char* key, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(where, std::string("missing required key \"") + key + "\"");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(where + "." + key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<int> integer(const json& obj, const std::string& where, const char* key, bool required) {
    const auto v = number(obj, where, key, required);
    if (!v) return std::nullopt;
    if (std::floor(*v) != *v || std::abs(*v) > 1e9) {
      fail(where + "." + key, "expected an integer");
      return std::nullopt;
    }
    return static_cast<int>(*v);
  }

  std::optional<std::string> string(const json& obj, const std::string& where, const char* key, bool required) {
    if (!obj.contains(key)) {
      if (required) fail(where, std::string("missing required key \"") + key + "\"");
      return std::nullopt;
    }
    if (!obj.at(key).is_string()) {
      fail(where + "." + key, "expected a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  bool object(const json& v, const std::string& where) {
    if (v.is_object()) return true;
    fail(where, "expected an object");
    return false;
  }
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::optional<GridSpacing> parse_spacing(const std::string& s) {
  if (s == "log") return GridSpacing::log;
  if (s == "linear") return GridSpacing::linear;
  return std::nullopt;
}

std::optional<SweepAxis> parse_axis(Checker& c, const json& a, const std::string& where) {
  if (!c.object(a, where)) return std::nullopt;
  c.reject_unknown(a, where, {"parameter", "values", "min", "max", "points", "spacing"});
  SweepAxis axis;
  const auto name = c.string(a, where, "parameter", true);
  bool ok = true;
  if (name) {
    const auto p = parse_sweep_parameter(*name);
    if (!p) {
      c.fail(where + ".parameter",
             "unknown parameter \"" + *name + "\" (expected gamma, gamma1, gamma2, gamma_bg, hot_ion_index or time)");
      ok = false;
    } else {
      axis.parameter = *p;
    }
  } else {
    ok = false;
  }

  if (a.contains("values")) {
    if (a.contains("min") || a.contains("max") || a.contains("points"))
      c.fail(where, "give either \"values\" or \"min\"/\"max\"/\"points\", not both");
    const json& vals = a.at("values");
    if (!vals.is_array() || vals.empty()) {
      c.fail(where + ".values", "expected a non-empty array of numbers");
      return std::nullopt;
    }
    for (const auto& v : vals) {
      if (!v.is_number()) {
        c.fail(where + ".values", "expected a non-empty array of numbers");
        return std::nullopt;
      }
      axis.values.push_back(v.get<double>());
    }
  } else {
    const auto lo = c.number(a, where, "min", true);
    const auto hi = c.number(a, where, "max", true);
    const auto pts = c.integer(a, where, "points", true);
    const auto sp = c.string(a, where, "spacing", false);
    GridSpacing spacing = GridSpacing::log;
    if (sp) {
      if (auto s = parse_spacing(*sp)) spacing = *s;
      else c.fail(where + ".spacing", "expected \"linear\" or \"log\"");
    }
    if (!lo || !hi || !pts) return std::nullopt;
    if (*pts < 2) {
      c.fail(where + ".points", "need at least two points");
      return std::nullopt;
    }
    if (!(*hi > *lo) || (spacing == GridSpacing::log && !(*lo > 0.0))) {
      c.fail(where, "need min < max (and min > 0 for log spacing)");
      return std::nullopt;
    }
    axis.values = spacing == GridSpacing::log ? log_grid(*lo, *hi, *pts) : linear_grid(*lo, *hi, *pts);
  }
  for (std::size_t k = 1; k < axis.values.size(); ++k) {
    if (!(axis.values[k] > axis.values[k - 1])) {
      c.fail(where + ".values", "grid must be strictly increasing");
      break;
    }
  }
  if (!ok) return std::nullopt;
  return axis;
}

}  // namespace

std::vector<double> expand_time_grid(const TimeGridSpec& spec) {
  std::vector<double> times{0.0};
  if (spec.points < 1) return times;
  if (spec.spacing == GridSpacing::linear) {
    for (int k = 1; k <= spec.points; ++k) times.push_back(spec.t_max * k / spec.points);
    times.back() = spec.t_max;
  } else {
    const double lo = spec.t_min.value_or(spec.t_max * 1e-6);
    if (spec.points == 1) {
      times.push_back(spec.t_max);
    } else {
      const auto g = log_grid(lo, spec.t_max, spec.points);
      times.insert(times.end(), g.begin(), g.end());
    }
  }
  return times;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream msg;
    // Drop the library's own "[json.exception...] parse error at ...:" prefix.
    std::string detail = e.what();
    if (const auto at = detail.find("column"); at != std::string::npos)
      if (const auto colon = detail.find(": ", at); colon != std::string::npos) detail.erase(0, colon + 2);
    msg << "syntax error at line " << line << ", column " << col << ": " << detail;
    throw InvalidConfig(msg.str(), {msg.str()});
  }

  Checker c;
  RunConfig cfg;
  if (!c.object(doc, "config")) throw InvalidConfig(std::move(c.violations));
  c.reject_unknown(doc, "config",
                   {"n", "trap", "baths", "background", "initial_temperature", "times", "sweep", "output"});

  const auto n = c.integer(doc, "config", "n", true);
  if (n && *n < 1) c.fail("config.n", "ion count must be >= 1");
  const int n_ions = n && *n >= 1 ? *n : 0;
  cfg.scenario.chain.n = std::max(n_ions, 1);

  if (!doc.contains("trap")) {
    c.fail("config", "missing required key \"trap\"");
  } else if (c.object(doc.at("trap"), "trap")) {
    const json& t = doc.at("trap");
    c.reject_unknown(t, "trap", {"kind", "omega_x", "omega_z"});
    if (const auto kind = c.string(t, "trap", "kind", true)) {
      if (*kind == "uniform") cfg.scenario.chain.kind = TrapKind::uniform;
      else if (*kind == "harmonic") cfg.scenario.chain.kind = TrapKind::harmonic;
      else c.fail("trap.kind", "expected \"uniform\" or \"harmonic\"");
    }
    if (const auto wx = c.number(t, "trap", "omega_x", true)) {
      if (!(*wx > 0.0)) c.fail("trap.omega_x", "must be positive");
      cfg.scenario.chain.omega_x = *wx;
    }
    if (const auto wz = c.number(t, "trap", "omega_z", false)) {
      if (!(*wz > 0.0)) c.fail("trap.omega_z", "must be positive");
      if (cfg.scenario.chain.kind == TrapKind::uniform) c.fail("trap.omega_z", "only applies to harmonic traps");
      cfg.scenario.chain.omega_z = *wz;
    }
  }

  if (doc.contains("baths")) {
    const json& baths = doc.at("baths");
    if (!baths.is_array()) {
      c.fail("baths", "expected an array");
    } else {
      for (std::size_t k = 0; k < baths.size(); ++k) {
        const std::string where = "baths[" + std::to_string(k) + "]";
        if (!c.object(baths[k], where)) continue;
        c.reject_unknown(baths[k], where, {"ion", "gamma", "temperature"});
        const auto ion = c.integer(baths[k], where, "ion", true);
        const auto gamma = c.number(baths[k], where, "gamma", true);
        const auto temp = c.number(baths[k], where, "temperature", true);
        if (ion && gamma && temp) cfg.scenario.attachments.push_back({*ion, *gamma, *temp});
      }
    }
  }

  if (doc.contains("background") && c.object(doc.at("background"), "background")) {
    const json& b = doc.at("background");
    c.reject_unknown(b, "background", {"gamma", "temperature"});
    const auto gamma = c.number(b, "background", "gamma", true);
    const auto temp = c.number(b, "background", "temperature", true);
    if (gamma && temp) cfg.scenario.background = BackgroundBath{*gamma, *temp};
  }

  if (const auto t0 = c.number(doc, "config", "initial_temperature", false)) {
    if (!(*t0 >= 0.0)) c.fail("config.initial_temperature", "must be nonnegative");
    cfg.scenario.initial_temp = *t0;
  }

  if (doc.contains("times") && c.object(doc.at("times"), "times")) {
    const json& t = doc.at("times");
    c.reject_unknown(t, "times", {"t_max", "points", "spacing", "t_min"});
    TimeGridSpec spec;
    const auto t_max = c.number(t, "times", "t_max", true);
    const auto points = c.integer(t, "times", "points", true);
    if (t_max) {
      if (!(*t_max > 0.0)) c.fail("times.t_max", "must be positive");
      spec.t_max = *t_max;
    }
    if (points) {
      if (*points < 1) c.fail("times.points", "must be >= 1");
      spec.points = *points;
    }
    if (const auto sp = c.string(t, "times", "spacing", false)) {
      if (auto s = parse_spacing(*sp)) spec.spacing = *s;
      else c.fail("times.spacing", "expected \"linear\" or \"log\"");
    }
    if (const auto t_min = c.number(t, "times", "t_min", false)) {
      if (!(*t_min > 0.0) || (t_max && !(*t_min < *t_max))) c.fail("times.t_min", "must satisfy 0 < t_min < t_max");
      spec.t_min = *t_min;
    }
    cfg.times = spec;
  }

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_array()) {
      c.fail("sweep", "expected an array of axis descriptors");
    } else {
      if (s.size() > 2) c.fail("sweep", "at most two axes are supported");
      for (std::size_t k = 0; k < s.size(); ++k)
        if (auto axis = parse_axis(c, s[k], "sweep[" + std::to_string(k) + "]"))
          cfg.scenario.sweep.push_back(std::move(*axis));
    }
  }

  if (doc.contains("output") && c.object(doc.at("output"), "output")) {
    const json& o = doc.at("output");
    c.reject_unknown(o, "output", {"path", "format"});
    OutputSpec spec;
    if (const auto path = c.string(o, "output", "path", false)) spec.path = *path;
    if (const auto fmt = c.string(o, "output", "format", false)) {
      if (auto f = parse_output_format(*fmt)) spec.format = *f;
      else c.fail("output.format", "expected \"csv\" or \"json\"");
    }
    cfg.output = spec;
  }

  // Bath semantics (range, duplicates, signs, some damping) live in assemble_profile.
  if (n_ions >= 1) {
    try {
      (void)assemble_profile(n_ions, cfg.scenario.attachments, cfg.scenario.background);
    } catch (const InvalidConfig& e) {
      for (const auto& v : e.violations()) c.fail("baths", v);
    }
  }

  if (!c.violations.empty()) throw InvalidConfig(std::move(c.violations));
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace iontherm
