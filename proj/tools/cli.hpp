#pragma once

namespace iontherm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidation = 4;

/// Entry point of the `iontherm` command; returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace iontherm
