#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "iontherm/chain_geometry.hpp"

namespace iontherm {

/// One ion coupled to its own Markovian bath. Temperatures are mean phonon numbers.
struct BathAttachment {
  int ion = 1;  // 1-based
  double gamma = 0.0;
  double temperature = 0.0;
};

/// Weak bath applied to every ion without an explicit attachment.
struct BackgroundBath {
  double gamma = 0.0;
  double temperature = 0.0;
};

struct BathProfile {
  std::vector<double> gammas;
  std::vector<double> temperatures;

  int size() const noexcept { return static_cast<int>(gammas.size()); }
  bool is_driven(int index0) const { return gammas.at(static_cast<std::size_t>(index0)) > 0.0; }
};

/// Explicit attachments override the background. Throws InvalidConfig listing
/// every problem (bad index, duplicate, negative rate or temperature, no
/// damping anywhere).
BathProfile assemble_profile(int n, std::span<const BathAttachment> attachments,
                             std::optional<BackgroundBath> background = std::nullopt);

/// Momentum-noise strengths D_i = 2 gamma_i omega_i (T_i + 1/2).
Eigen::VectorXd noise_strengths(const BathProfile& profile, const CouplingMatrix& coupling);

}  // namespace iontherm
