#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iontherm/experiments.hpp"

namespace iontherm {

enum class OutputFormat { csv, json };
enum class GridSpacing { linear, log };

struct TimeGridSpec {
  double t_max = 0.0;
  int points = 0;
  GridSpacing spacing = GridSpacing::log;
  /// First nonzero point of a log grid; defaults to t_max * 1e-6.
  std::optional<double> t_min;
};

struct OutputSpec {
  std::string path;
  OutputFormat format = OutputFormat::csv;
};

/// Validated run configuration (JSON document schema):
///
///   {
///     "n": 100,
///     "trap": {"kind": "uniform" | "harmonic", "omega_x": 10, "omega_z": 0.5},
///     "baths": [{"ion": 1, "gamma": 0.1, "temperature": 2}, ...],
///     "background": {"gamma": 1e-3, "temperature": 4},
///     "initial_temperature": 5,
///     "times": {"t_max": 1e4, "points": 200, "spacing": "log", "t_min": 0.1},
///     "sweep": [{"parameter": "gamma", "values": [...]} |
///               {"parameter": "gamma", "min": 1e-3, "max": 1e2, "points": 40, "spacing": "log"}],
///     "output": {"path": "out.csv", "format": "csv" | "json"}
///   }
///
/// Only "n" and "trap" are required. Unknown keys are rejected.
struct RunConfig {
  ScenarioConfig scenario;
  std::optional<TimeGridSpec> times;
  std::optional<OutputSpec> output;
};

/// Throws InvalidConfig with every violation found; syntax errors report
/// line and column.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Grid described by a time spec, starting with t = 0.
std::vector<double> expand_time_grid(const TimeGridSpec& spec);

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept;

}  // namespace iontherm
