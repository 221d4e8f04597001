// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_CONTROL_HPP
#define WAVESYNC_CONTROL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavesync/syncalg.hpp"
#include "wavesync/wavesim.hpp"

namespace wavesync {

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Target { Null, Sync };

struct ControlObjective {
  Target target = Target::Null;
  double epsilon = 1e-2;
  void validate() const;
};

/// Rows that are driven to zero at time T: I_N for Target::Null, C_p for
/// Target::Sync.
Mat target_matrix(const SyncProblem& problem, Target target);

struct SolverBudget {
  int max_iters = 400;
  double gtol = 1e-7;    // relative to the first gradient norm
  double ftol = 1e-13;   // relative objective decrease
  int restart_every = 50;
  double armijo_c1 = 1e-4;
};

struct SynthesisResult {
  ControlSchedule schedule;
  double objective = 0.0;
  double terminal_dev = 0.0;   // ||C U(T)||^2 + ||C V(T)||^2
  double full_energy = 0.0;    // ||U(T)||^2 + ||V(T)||^2
  double control_energy = 0.0; // sum_n w_n |H_n|^2
  int iterations = 0;
  bool converged = false;
  double epsilon = 0.0;
};

struct ObjectiveValue {
  double value = 0.0;
  Mat gradient;  // d value / d H_n, same shape as the schedule
};

/// J_eps(H) = 1/2 ||C U(T)||^2 + 1/2 ||C V(T)||^2 + eps/2 sum_n w_n |H_n|^2.
///
/// The gradient comes from one forward run and one backward run of the
/// adjoint system from Phi(T) = C^T C V(T), Phi'(T) = -C^T C U(T); it is
/// w_n (D^T Phi_n(1) + eps H_n), the exact derivative of the discrete map.
ObjectiveValue objective_and_gradient(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                      const WaveState& init, const ControlSchedule& ctrl,
                                      const ControlObjective& obj);

/// Terminal deviation ||C U(T)||^2 + ||C V(T)||^2 of an uncontrolled run.
double uncontrolled_deviation(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                              const WaveState& init, Target target);

/// Conjugate gradient (Polak-Ribiere+, restarted) on J_eps in the
/// trapezoid-weighted control metric. Line search is Armijo backtracking
/// started from the exact minimizer along the direction. Reported values
/// come from a separate forward simulation of the final schedule.
SynthesisResult synthesize_control(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                   const WaveState& init, const ControlObjective& obj,
                                                  const SolverBudget& budget = {},
                                   const ControlSchedule* warm_start = nullptr);

/// One synthesis per epsilon (strictly decreasing), each warm-started from
/// the previous schedule.
std::vector<SynthesisResult> epsilon_sweep(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                           const WaveState& init, Target target,
                                           const std::vector<double>& epsilons, const SolverBudget& budget = {});

struct SyncMetrics {
  double pairwise_dev = 0.0;        // max ||u_k - u_l|| over [T, T + post]
  std::vector<Mat> pinned_state;    // per group: (#window samples) x (J + 1)
  std::vector<double> pin_residual; // per group: max ||u_k - u_r||
  std::vector<double> window_t;
};

/// Window is every stored state with t >= T. When `E_vectors` is given
/// (one per group, bi-orthonormal to e_r) the pinned states (E_r, U) are
/// reported too.
SyncMetrics sync_metrics(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                         const WaveTrajectory& traj, const std::optional<std::vector<Vec>>& E_vectors,
                         bool require_pinning = false);

/// ||Q^T U(T)||^2 + ||Q^T V(T)||^2 of the homogeneous system restricted to
/// an invariant subspace with orthonormal basis Q (A^T Q ⊆ Q, B^T Q ⊆ Q),
/// simulated on its own as a d-component system.
double closed_subsystem_energy(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                               const WaveState& init, const SubspaceBasis& Q);

/// Reduced system (A_p, B_p, C_p D) and initial data C_p U_0, C_p U_1.
struct ReducedSystem {
  SyncProblem problem;
  WaveState init;
};
ReducedSystem reduce_system(const SyncProblem& problem, const Grid1D& grid, const WaveState& init,
                            const Tolerances& tol = {});

struct AugmentedControlReport {
  bool preconditions_ok = false;
  std::string message;
  std::vector<SynthesisResult> sweep;
  double uncontrolled_full_energy = 0.0;
  double uncontrolled_sync_dev = 0.0;
  double full_energy_ratio = 0.0;  // at the last epsilon
  double sync_dev_ratio = 0.0;     // ||C_p U(T)||^2 + ||C_p V(T)||^2 ratio, last epsilon
  bool null_controlled = false;    // full_energy_ratio <= 0.1
};

/// Null-target sweep for a C_p-compatible system whose control range
/// contains every e_r. Precondition failures are reported, not thrown.
AugmentedControlReport augmented_control_scenario(const SyncProblem& problem, const Grid1D& grid,
                                                  const SimConfig& cfg, const WaveState& init,
                                                  const std::vector<double>& epsilons,
                                                  const SolverBudget& budget = {}, const Tolerances& tol = {});

}  // namespace wavesync

#endif  // WAVESYNC_CONTROL_HPP
