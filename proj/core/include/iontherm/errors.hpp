#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace iontherm {

/// Coarse failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_argument,
  invalid_config,
  solver_failure,
  trap_too_weak,
  unstable_chain,
  defective_spectrum,
  numerical_failure,
  ill_conditioned_steady_state,
  no_steady_state,
  io_error,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for errors caused by bad input rather than by the numerics.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::invalid_argument || kind_ == ErrorKind::invalid_config;
  }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::invalid_argument, what) {}
};

/// Carries every violation found, not just the first one.
class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(std::vector<std::string> violations);
  InvalidConfig(const std::string& what, std::vector<std::string> violations)
      : Error(ErrorKind::invalid_config, what), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(ErrorKind::solver_failure, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class TrapTooWeak : public Error {
 public:
  TrapTooWeak(const std::string& what, int ion)
      : Error(ErrorKind::trap_too_weak, what), ion_(ion) {}
  /// 1-based index of the first ion with a non-positive diagonal.
  int ion() const noexcept { return ion_; }

 private:
  int ion_;
};

class UnstableChain : public Error {
 public:
  UnstableChain(const std::string& what, double smallest_eigenvalue)
      : Error(ErrorKind::unstable_chain, what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

class DefectiveSpectrum : public Error {
 public:
  DefectiveSpectrum(const std::string& what, double condition)
      : Error(ErrorKind::defective_spectrum, what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what)
      : Error(ErrorKind::numerical_failure, what) {}
};

class IllConditionedSteadyState : public Error {
 public:
  IllConditionedSteadyState(const std::string& what, double min_sum_real)
      : Error(ErrorKind::ill_conditioned_steady_state, what), min_sum_real_(min_sum_real) {}
  double min_sum_real() const noexcept { return min_sum_real_; }

 private:
  double min_sum_real_;
};

class NoSteadyState : public Error {
 public:
  explicit NoSteadyState(const std::string& what) : Error(ErrorKind::no_steady_state, what) {}
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(ErrorKind::io_error, what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace iontherm
