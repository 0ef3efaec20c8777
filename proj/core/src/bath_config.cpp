#include "iontherm/bath_config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "iontherm/errors.hpp"

namespace iontherm {

BathProfile assemble_profile(int n, std::span<const BathAttachment> attachments,
                             std::optional<BackgroundBath> background) {
  std::vector<std::string> violations;
  if (n < 1) throw InvalidConfig({"ion count must be >= 1"});

  BathProfile profile;
  profile.gammas.assign(static_cast<std::size_t>(n), 0.0);
  profile.temperatures.assign(static_cast<std::size_t>(n), 0.0);

  if (background) {
    if (!(background->gamma >= 0.0) || !std::isfinite(background->gamma))
      violations.push_back("background gamma must be a nonnegative number");
    if (!(background->temperature >= 0.0) || !std::isfinite(background->temperature))
      violations.push_back("background temperature must be a nonnegative number");
    for (int i = 0; i < n; ++i) {
      profile.gammas[static_cast<std::size_t>(i)] = background->gamma;
      profile.temperatures[static_cast<std::size_t>(i)] = background->temperature;
    }
  }

  std::set<int> seen;
  for (const auto& att : attachments) {
    const std::string where = "bath on ion " + std::to_string(att.ion);
    bool ok = true;
    if (att.ion < 1 || att.ion > n) {
      violations.push_back(where + ": ion out of range [1," + std::to_string(n) + "]");
      ok = false;
    } else if (!seen.insert(att.ion).second) {
      violations.push_back(where + ": duplicate ion index");
      ok = false;
    }
    if (!(att.gamma >= 0.0) || !std::isfinite(att.gamma)) {
      violations.push_back(where + ": gamma must be a nonnegative number");
      ok = false;
    }
    if (!(att.temperature >= 0.0) || !std::isfinite(att.temperature)) {
      violations.push_back(where + ": temperature must be a nonnegative number");
      ok = false;
    }
    if (ok) {
      profile.gammas[static_cast<std::size_t>(att.ion - 1)] = att.gamma;
      profile.temperatures[static_cast<std::size_t>(att.ion - 1)] = att.temperature;
    }
  }

  bool any_damping = false;
  for (double g : profile.gammas) any_damping = any_damping || g > 0.0;
  if (violations.empty() && !any_damping)
    violations.push_back("no ion is coupled to a bath (all gamma are zero); no steady state exists");

  if (!violations.empty()) throw InvalidConfig(std::move(violations));

  // Undriven ions carry no temperature.
  for (int i = 0; i < n; ++i)
    if (profile.gammas[static_cast<std::size_t>(i)] == 0.0)
      profile.temperatures[static_cast<std::size_t>(i)] = 0.0;
  return profile;
}

Eigen::VectorXd noise_strengths(const BathProfile& profile, const CouplingMatrix& coupling) {
  const int n = profile.size();
  if (n != coupling.size())
    throw InvalidArgument("noise_strengths: bath profile and coupling matrix sizes differ");
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    const double g = profile.gammas[static_cast<std::size_t>(i)];
    d(i) = g == 0.0 ? 0.0
                    : 2.0 * g * coupling.local_freqs(i) *
                          (profile.temperatures[static_cast<std::size_t>(i)] + 0.5);
  }
  return d;
}

}  // namespace iontherm
