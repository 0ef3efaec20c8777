#include "iontherm/errors.hpp"

namespace iontherm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::solver_failure: return "solver-failure";
    case ErrorKind::trap_too_weak: return "trap-too-weak";
    case ErrorKind::unstable_chain: return "unstable-chain";
    case ErrorKind::defective_spectrum: return "defective-spectrum";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::ill_conditioned_steady_state: return "ill-conditioned-steady-state";
    case ErrorKind::no_steady_state: return "no-steady-state";
    case ErrorKind::io_error: return "io-error";
  }
  return "unknown";
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "invalid configuration";
  for (const auto& v : violations) {
    out += "\n  - ";
    out += v;
  }
  return out;
}

}  // namespace

InvalidConfig::InvalidConfig(std::vector<std::string> violations)
    : Error(ErrorKind::invalid_config, join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace iontherm
