#pragma once

#include "rtquench/cli/config.hpp"

namespace rtq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitPhase = 4;

// Each command writes its files under cfg.out_dir and returns an exit code.
// Errors propagate as exceptions; run() maps them onto exit codes.
int cmd_spectrum(const ExperimentConfig& cfg);
int cmd_quench(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);

int run(int argc, char** argv);

}  // namespace rtq::cli
