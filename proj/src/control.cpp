// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wavesync {

namespace {

// Terminal state of the forward system; no trajectory is kept.
WaveState terminal_state(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                         const WaveState& init, const Mat& H) {
  const int steps = cfg.steps();
  WaveStepper stepper(problem.A, problem.B, problem.D, grid, cfg.backend);
  WaveState s = init;
  Vec hn = H.col(0);
  stepper.start(s, &hn);
  for (int n = 0; n < steps; ++n) {
    hn = H.col(n + 1);
    stepper.step(s, &hn, cfg.dt);
  }
  if (!s.U.allFinite() || !s.V.allFinite()) {
    throw InstabilityError("unstable: non-finite terminal state (reduce dt)");
  }
  return s;
}

// D^T Phi_n(1), n = 0..steps, for the adjoint system run backward from
// (Phi, Phi') at time T.
Mat adjoint_boundary_trace(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg, WaveState phi) {
  const int steps = cfg.steps();
  const Mat At = problem.A.transpose();
  const Mat Bt = problem.B.transpose();
  WaveStepper stepper(At, Bt, Mat::Zero(problem.N(), 1), grid, cfg.backend);
  const Mat Dt = problem.D.transpose();
  Mat trace(problem.M(), steps + 1);
  stepper.start(phi, nullptr);
  trace.col(steps) = Dt * phi.U.col(grid.J);
  for (int n = steps; n > 0; --n) {
    stepper.step(phi, nullptr, -cfg.dt);
    trace.col(n - 1) = Dt * phi.U.col(grid.J);
  }
  if (!trace.allFinite()) throw InstabilityError("unstable: non-finite adjoint state (reduce dt)");
  return trace;
}

double terminal_part(const Mat& C, const WaveState& s, const Grid1D& grid) {
  return 0.5 * (norm2_M(C * s.U, grid) + norm2_M(C * s.V, grid));
}

// <X, Y>_w = sum_n w_n X_n . Y_n
double weighted_dot(const Mat& X, const Mat& Y, const Vec& w) {
  double s = 0.0;
  for (Eigen::Index n = 0; n < X.cols(); ++n) s += w(n) * X.col(n).dot(Y.col(n));
  return s;
}

Mat divide_columns(const Mat& g, const Vec& w) {
  Mat r = g;
  for (Eigen::Index n = 0; n < g.cols(); ++n) r.col(n) /= w(n);
  return r;
}

// Euclidean gradient from the terminal state.
Mat gradient_from_terminal(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg, const Mat& CtC,
                           const WaveState& terminal, const Mat& H, double epsilon, const Vec& w) {
  WaveState phi{CtC * terminal.V, -(CtC * terminal.U)};
  Mat g = adjoint_boundary_trace(problem, grid, cfg, std::move(phi));
  g += epsilon * H;
  for (Eigen::Index n = 0; n < g.cols(); ++n) g.col(n) *= w(n);
  return g;
}

struct TerminalMetrics {
  double dev = 0.0;
  double full = 0.0;
};

TerminalMetrics measure(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg, const WaveState& init,
                        const ControlSchedule& ctrl, const Mat& C) {
  SimConfig plain = cfg;
  plain.post_window = 0.0;
  plain.stride = cfg.steps();
  const WaveTrajectory traj = simulate(problem, grid, plain, init, ctrl);
  const WaveState& s = traj.states.back();
  return {norm2_M(C * s.U, grid) + norm2_M(C * s.V, grid), norm2_M(s.U, grid) + norm2_M(s.V, grid)};
}

}  // namespace

void ControlObjective::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("penalty epsilon must be positive");
}

Mat target_matrix(const SyncProblem& problem, Target target) {
  if (target == Target::Null) return Mat::Identity(problem.N(), problem.N());
  return build_Cp(problem.partition);
}

ObjectiveValue objective_and_gradient(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                      const WaveState& init, const ControlSchedule& ctrl,
                                      const ControlObjective& obj) {
  obj.validate();
  cfg.validate(grid);
  init.validate(problem.N(), grid);
  ctrl.validate(problem.M(), cfg);
  const Mat C = target_matrix(problem, obj.target);
  const Mat CtC = C.transpose() * C;
  const Vec w = trapezoid_weights(cfg.steps(), cfg.dt);

  const WaveState term = terminal_state(problem, grid, cfg, init, ctrl.H);
  ObjectiveValue out;
  out.value = terminal_part(C, term, grid) + 0.5 * obj.epsilon * weighted_dot(ctrl.H, ctrl.H, w);
  out.gradient = gradient_from_terminal(problem, grid, cfg, CtC, term, ctrl.H, obj.epsilon, w);
  return out;
}

double uncontrolled_deviation(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                              const WaveState& init, Target target) {
  cfg.validate(grid);
  init.validate(problem.N(), grid);
  const Mat C = target_matrix(problem, target);
  return measure(problem, grid, cfg, init, ControlSchedule::zero(problem.M(), cfg), C).dev;
}

SynthesisResult synthesize_control(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                   const WaveState& init, const ControlObjective& obj, const SolverBudget& budget,
                                   const ControlSchedule* warm_start) {
  obj.validate();
  cfg.validate(grid);
  init.validate(problem.N(), grid);
  if (budget.max_iters < 1) throw InputError("solver budget needs max_iters >= 1");
  if (budget.restart_every < 1) throw InputError("solver budget needs restart_every >= 1");

  const Mat C = target_matrix(problem, obj.target);
  const Mat CtC = C.transpose() * C;
  const Vec w = trapezoid_weights(cfg.steps(), cfg.dt);
  const double eps = obj.epsilon;
  const WaveState zero_init = WaveState::zero(problem.N(), grid);

  ControlSchedule ctrl = warm_start != nullptr ? *warm_start : ControlSchedule::zero(problem.M(), cfg);
  ctrl.validate(problem.M(), cfg);

  WaveState term = terminal_state(problem, grid, cfg, init, ctrl.H);
  auto objective = [&](const WaveState& t, const Mat& H) {
    return terminal_part(C, t, grid) + 0.5 * eps * weighted_dot(H, H, w);
  };
  double J = objective(term, ctrl.H);
  Mat g = gradient_from_terminal(problem, grid, cfg, CtC, term, ctrl.H, eps, w);
  Mat r = divide_columns(g, w);
  double rr = weighted_dot(r, r, w);
  const double rr0 = rr;
  Mat d = -r;

  SynthesisResult result;
  result.epsilon = eps;
  int failed_searches = 0;
  int since_restart = 0;
  int it = 0;
  const double gtol2 = budget.gtol * budget.gtol;
  if (rr0 == 0.0) result.converged = true;

  for (; it < budget.max_iters && !result.converged; ++it) {
    double gd = weighted_dot(r, d, w);
    if (gd >= 0.0) {
      d = -r;
      gd = -rr;
      since_restart = 0;
    }
    // J is quadratic in the control: J(H + a d) = J + a gd + a^2 curv.
    const WaveState dir = terminal_state(problem, grid, cfg, zero_init, d);
    const double curv = terminal_part(C, dir, grid) + 0.5 * eps * weighted_dot(d, d, w);
    if (!(curv > 0.0)) throw OptimizationError("non-positive curvature along the search direction");
    double alpha = -gd / (2.0 * curv);

    WaveState trial{term.U + alpha * dir.U, term.V + alpha * dir.V};
    Mat H_trial = ctrl.H + alpha * d;
    double J_trial = objective(trial, H_trial);
    int halvings = 0;
    while (J_trial > J + budget.armijo_c1 * alpha * gd && halvings < 30) {
      alpha *= 0.5;
      trial = {term.U + alpha * dir.U, term.V + alpha * dir.V};
      H_trial = ctrl.H + alpha * d;
      J_trial = objective(trial, H_trial);
      ++halvings;
    }
    if (J_trial > J) {
      if (++failed_searches >= 3) {
        throw OptimizationError("objective increased over 3 consecutive line searches");
      }
      d = -r;
      since_restart = 0;
      continue;
    }
    failed_searches = 0;

    const double decrease = J - J_trial;
    ctrl.H = std::move(H_trial);
    term = std::move(trial);
    J = J_trial;

    const Mat g_new = gradient_from_terminal(problem, grid, cfg, CtC, term, ctrl.H, eps, w);
    const Mat r_new = divide_columns(g_new, w);
    const double rr_new = weighted_dot(r_new, r_new, w);
    if (rr_new <= gtol2 * rr0 || decrease <= budget.ftol * std::max(J, std::numeric_limits<double>::min())) {
      result.converged = true;
    }
    ++since_restart;
    double beta = 0.0;
    if (since_restart < budget.restart_every) {
      beta = std::max(0.0, (rr_new - weighted_dot(r_new, r, w)) / rr);
    } else {
      since_restart = 0;
    }
    r = r_new;
    rr = rr_new;
    d = -r + beta * d;
  }

  const TerminalMetrics m = measure(problem, grid, cfg, init, ctrl, C);
  result.schedule = std::move(ctrl);
  result.terminal_dev = m.dev;
  result.full_energy = m.full;
  result.control_energy = weighted_dot(result.schedule.H, result.schedule.H, w);
  result.objective = 0.5 * m.dev + 0.5 * eps * result.control_energy;
  result.iterations = it;
  return result;
}

std::vector<SynthesisResult> epsilon_sweep(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                           const WaveState& init, Target target,
                                           const std::vector<double>& epsilons, const SolverBudget& budget) {
  if (epsilons.empty()) throw InputError("epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InputError("epsilon values must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InputError("epsilon values must be strictly decreasing");
  }
  std::vector<SynthesisResult> out;
  const ControlSchedule* warm = nullptr;
  for (double eps : epsilons) {
    out.push_back(synthesize_control(problem, grid, cfg, init, {target, eps}, budget, warm));
    warm = &out.back().schedule;
  }
  return out;
}

SyncMetrics sync_metrics(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                         const WaveTrajectory& traj, const std::optional<std::vector<Vec>>& E_vectors,
                         bool require_pinning) {
  const GroupPartition& part = problem.partition;
  if (require_pinning && !E_vectors) throw InputError("pinned states requested but no E vectors were given");
  if (E_vectors && static_cast<int>(E_vectors->size()) != part.p()) {
    throw InputError("need one E vector per group (" + std::to_string(part.p()) + ")");
  }
  const double t0 = cfg.T * (1.0 - 1e-12);
  SyncMetrics out;
  std::vector<const WaveState*> window;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (traj.t[i] >= t0) {
      window.push_back(&traj.states[i]);
      out.window_t.push_back(traj.t[i]);
    }
  }
  auto l2 = [&](const Eigen::RowVectorXd& row) { return std::sqrt(norm2_M(row, grid)); };

  for (const WaveState* s : window) {
    for (int r = 0; r < part.p(); ++r) {
      const auto [begin, end] = part.group(r);
      for (int k = begin; k < end; ++k) {
        for (int l = k + 1; l < end; ++l) {
          out.pairwise_dev = std::max(out.pairwise_dev, l2(s->U.row(k) - s->U.row(l)));
        }
      }
    }
  }

  if (E_vectors) {
    for (int r = 0; r < part.p(); ++r) {
      const Vec& E = (*E_vectors)[static_cast<std::size_t>(r)];
      if (E.size() != problem.N()) throw InputError("E vector has the wrong dimension");
      Mat pinned(static_cast<Eigen::Index>(window.size()), grid.nodes());
      double residual = 0.0;
      const auto [begin, end] = part.group(r);
      for (std::size_t i = 0; i < window.size(); ++i) {
        const Eigen::RowVectorXd u_r = E.transpose() * window[i]->U;
        pinned.row(static_cast<Eigen::Index>(i)) = u_r;
        for (int k = begin; k < end; ++k) residual = std::max(residual, l2(window[i]->U.row(k) - u_r));
      }
      out.pinned_state.push_back(std::move(pinned));
      out.pin_residual.push_back(residual);
    }
  }
  return out;
}

double closed_subsystem_energy(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                               const WaveState& init, const SubspaceBasis& Q) {
  if (Q.ambient_dim() != problem.N()) throw InputError("closed subsystem basis has the wrong ambient dimension");
  if (Q.empty()) return 0.0;
  const Mat& q = Q.matrix();
  const Eigen::Index d = q.cols();
  SyncProblem sub;
  sub.A = q.transpose() * problem.A * q;
  sub.B = q.transpose() * problem.B * q;
  sub.D = Mat::Zero(d, 1);
  std::vector<int> cuts(static_cast<std::size_t>(d + 1));
  for (Eigen::Index i = 0; i <= d; ++i) cuts[static_cast<std::size_t>(i)] = static_cast<int>(i);
  sub.partition = GroupPartition(cuts);
  const WaveState sub_init{q.transpose() * init.U, q.transpose() * init.V};
  SimConfig plain = cfg;
  plain.post_window = 0.0;
  plain.stride = cfg.steps();
  const WaveTrajectory traj = simulate(sub, grid, plain, sub_init, ControlSchedule::zero(1, cfg));
  const WaveState& s = traj.states.back();
  return norm2_M(s.U, grid) + norm2_M(s.V, grid);
}

ReducedSystem reduce_system(const SyncProblem& problem, const Grid1D& grid, const WaveState& init,
                            const Tolerances& tol) {
  const GroupPartition& part = problem.partition;
  const int m = part.N() - part.p();
  if (m < 1) throw PreconditionError("p = N leaves an empty reduced system");
  const Mat c = build_Cp(part);
  ReducedSystem out;
  out.problem.A = reduced_matrix(problem.A, part, tol);
  out.problem.B = reduced_matrix(problem.B, part, tol);
  out.problem.D = c * problem.D;
  std::vector<int> cuts(static_cast<std::size_t>(m + 1));
  for (int i = 0; i <= m; ++i) cuts[static_cast<std::size_t>(i)] = i;
  out.problem.partition = GroupPartition(cuts);
  out.init = {c * init.U, c * init.V};
  (void)grid;
  return out;
}

AugmentedControlReport augmented_control_scenario(const SyncProblem& problem, const Grid1D& grid,
                                                  const SimConfig& cfg, const WaveState& init,
                                                  const std::vector<double>& epsilons,
                                                  const SolverBudget& budget, const Tolerances& tol) {
  AugmentedControlReport rep;
  const GroupPartition& part = problem.partition;
  if (!is_cp_compatible(problem.A, part, tol) || !is_cp_compatible(problem.B, part, tol)) {
    rep.message = "A and B must both be C_p-compatible";
    return rep;
  }
  const Eigen::Index rank_d = rank_of(problem.D, tol);
  const Mat e = indicator_matrix(part);
  for (Eigen::Index r = 0; r < e.cols(); ++r) {
    Mat aug(problem.N(), problem.M() + 1);
    aug << problem.D, e.col(r);
    if (rank_of(aug, tol) != rank_d) {
      rep.message = "e_" + std::to_string(r + 1) + " is not in Im(D)";
      return rep;
    }
  }
  rep.preconditions_ok = true;
  rep.message = "ok";

  const Mat c = build_Cp(part);
  const TerminalMetrics free_run = measure(problem, grid, cfg, init, ControlSchedule::zero(problem.M(), cfg), c);
  rep.uncontrolled_full_energy = free_run.full;
  rep.uncontrolled_sync_dev = free_run.dev;
  rep.sweep = epsilon_sweep(problem, grid, cfg, init, Target::Null, epsilons, budget);
  const SynthesisResult& last = rep.sweep.back();
  const TerminalMetrics final_run = measure(problem, grid, cfg, init, last.schedule, c);
  if (rep.uncontrolled_full_energy > 0.0) {
    rep.full_energy_ratio = final_run.full / rep.uncontrolled_full_energy;
  }
  if (rep.uncontrolled_sync_dev > 0.0) rep.sync_dev_ratio = final_run.dev / rep.uncontrolled_sync_dev;
  rep.null_controlled = rep.full_energy_ratio <= 0.1;
  return rep;
}

}  // namespace wavesync
