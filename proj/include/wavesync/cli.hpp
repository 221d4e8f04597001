// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_CLI_HPP
#define WAVESYNC_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wavesync/control.hpp"

namespace wavesync::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCondition = 2;

/// A problem file after parsing; initial data is resolved on `grid`.
struct ProblemFile {
  SyncProblem problem;
  Grid1D grid;
  SimConfig sim;
  WaveState init;
  bool allow_nonsymmetrizable_B = false;
};

/// Grid, time step and the random preset may be overridden before the
/// initial data is resolved.
struct LoadOverrides {
  int J = 0;           // 0 keeps the file value
  double T = 0.0;      // 0 keeps the file value
  double dt = 0.0;     // 0 keeps the file value
  double cfl = 0.0;    // dt = cfl * h when > 0
  std::uint64_t seed = 0;
};

/// Throws InputError with the offending field (or line and column for
/// malformed JSON).
ProblemFile load_problem(const std::string& path, const LoadOverrides& overrides = {});

/// Schedule CSV with header "t,m,value", one row per (time level, control).
void write_schedule_csv(const std::string& path, const ControlSchedule& ctrl);
ControlSchedule read_schedule_csv(const std::string& path, Eigen::Index m, const SimConfig& cfg);

/// Entry point shared by the executable and the tests; args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wavesync::cli

#endif  // WAVESYNC_CLI_HPP
