// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/wavesim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wavesync/kernels.hpp"

namespace wavesync {

namespace {

constexpr double kGrowthLimit = 10.0;

int checked_step_count(double span, double dt, const char* what) {
  const double q = span / dt;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, q)) {
    throw InputError(std::string(what) + " is not an integer multiple of dt");
  }
  return static_cast<int>(r);
}

// 1/2 ||V||_M^2 + 1/2 sum |U_{j+1} - U_j|^2 / h: positive definite and
// independent of A and B, used only to detect blow-up.
double guard_energy(const WaveState& s, const Grid1D& grid) {
  const double h = grid.h();
  double grad = 0.0;
  for (int j = 0; j < grid.J; ++j) grad += (s.U.col(j + 1) - s.U.col(j)).squaredNorm();
  return 0.5 * norm2_M(s.V, grid) + 0.5 * grad / h;
}

class BlowUpGuard {
 public:
  BlowUpGuard(const Grid1D& grid, double dt) : grid_(grid), injection_(std::sqrt(2.0 * dt * dt / grid.h())) {}

  void reset(const WaveState& s) { emax_ = guard_energy(s, grid_); }

  // Each step may add at most what a boundary impulse of size |g| injects;
  // anything beyond kGrowthLimit times that is treated as instability.
  void check(const WaveState& s, double g_norm, int step) {
    if (!s.U.allFinite() || !s.V.allFinite()) {
      throw InstabilityError("unstable: non-finite state at step " + std::to_string(step) +
                             " (reduce dt; CFL requires dt <= 0.9 h)");
    }
    const double e = guard_energy(s, grid_);
    const double allowance = std::sqrt(emax_) + injection_ * g_norm;
    if (e > kGrowthLimit * allowance * allowance && e > 0.0) {
      throw InstabilityError("unstable: energy grew by more than a factor " + std::to_string(kGrowthLimit) +
                             " in one step at step " + std::to_string(step) +
                             " (reduce dt; CFL requires dt <= 0.9 h)");
    }
    emax_ = std::max(emax_, e);
  }

 private:
  Grid1D grid_;
  double injection_;
  double emax_ = 0.0;
};

}  // namespace

void Grid1D::validate() const {
  if (J < 8) throw InputError("grid needs J >= 8, got " + std::to_string(J));
}

SimConfig SimConfig::with_cfl(const Grid1D& grid, double T, double ratio) {
  SimConfig cfg;
  cfg.T = T;
  cfg.dt = ratio * grid.h();
  return cfg;
}

int SimConfig::steps() const { return checked_step_count(T, dt, "T"); }

int SimConfig::post_steps() const { return post_window > 0.0 ? checked_step_count(post_window, dt, "post_window") : 0; }

void SimConfig::validate(const Grid1D& grid) const {
  grid.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be positive");
  if (post_window < 0.0) throw InputError("post_window must be non-negative");
  if (stride < 1) throw InputError("stride must be >= 1");
  if (dt > cfl_max * grid.h() * (1.0 + 1e-12)) {
    throw InstabilityError("unstable: dt/h = " + std::to_string(dt / grid.h()) + " exceeds the CFL limit " +
                           std::to_string(cfl_max));
  }
  (void)steps();
  (void)post_steps();
}

WaveState WaveState::zero(Eigen::Index n, const Grid1D& grid) {
  return {Mat::Zero(n, grid.nodes()), Mat::Zero(n, grid.nodes())};
}

void WaveState::validate(Eigen::Index n, const Grid1D& grid) const {
  if (U.rows() != n || V.rows() != n || U.cols() != grid.nodes() || V.cols() != grid.nodes()) {
    throw InputError("state must be " + std::to_string(n) + " x " + std::to_string(grid.nodes()));
  }
  require_finite(U, "state U");
  require_finite(V, "state V");
  if (U.col(0).norm() != 0.0 || V.col(0).norm() != 0.0) {
    throw InputError("state violates the Dirichlet condition at x = 0");
  }
}

ControlSchedule ControlSchedule::zero(Eigen::Index m, const SimConfig& cfg) {
  return {Mat::Zero(m, cfg.steps() + 1), cfg.dt};
}

void ControlSchedule::validate(Eigen::Index m, const SimConfig& cfg) const {
  if (H.rows() != m || H.cols() != cfg.steps() + 1) {
    throw InputError("control schedule must be " + std::to_string(m) + " x " + std::to_string(cfg.steps() + 1));
  }
  if (std::abs(dt - cfg.dt) > 1e-12 * cfg.dt) throw InputError("control schedule dt differs from the simulation dt");
  require_finite(H, "control schedule");
}

WaveStepper::WaveStepper(const Mat& A, const Mat& B, const Mat& D, const Grid1D& grid, Backend backend)
    : A_(A), B_(B), D_(D), grid_(grid), backend_(backend), acc_(Mat::Zero(A.rows(), grid.nodes())),
      g_(Vec::Zero(A.rows())) {}

void WaveStepper::acceleration(const Mat& U, const Vec* h, Mat& out) {
  kernels::OperatorView op{static_cast<int>(A_.rows()), grid_.J, grid_.h(), A_.data(), B_.data()};
  const double* g = nullptr;
  if (h != nullptr) {
    g_.noalias() = D_ * (*h);
    g = g_.data();
  }
  if (backend_ == Backend::OpenMP) {
    kernels::acceleration_omp(op, U.data(), g, out.data());
  } else {
    kernels::acceleration_serial(op, U.data(), g, out.data());
  }
}

void WaveStepper::start(const WaveState& s, const Vec* h) { acceleration(s.U, h, acc_); }

void WaveStepper::step(WaveState& s, const Vec* h_next, double dt) {
  const int len = static_cast<int>(s.U.size());
  auto axpy = backend_ == Backend::OpenMP ? kernels::axpy_omp : kernels::axpy_serial;
  axpy(len, 0.5 * dt, acc_.data(), s.V.data());
  axpy(len, dt, s.V.data(), s.U.data());
  acceleration(s.U, h_next, acc_);
  axpy(len, 0.5 * dt, acc_.data(), s.V.data());
}

double inner_M(const Mat& X, const Mat& Y, const Grid1D& grid) {
  const int J = grid.J;
  double s = 0.0;
  for (int j = 1; j < J; ++j) s += X.col(j).dot(Y.col(j));
  s += 0.5 * X.col(J).dot(Y.col(J));
  return grid.h() * s;
}

double norm2_M(const Mat& X, const Grid1D& grid) { return inner_M(X, X, grid); }

double discrete_energy(const Mat& A, const Mat& B, const WaveState& s, const Grid1D& grid) {
  const double h = grid.h();
  double grad = 0.0;
  for (int j = 0; j < grid.J; ++j) grad += (s.U.col(j + 1) - s.U.col(j)).squaredNorm();
  const Vec uJ = s.U.col(grid.J);
  return 0.5 * norm2_M(s.V, grid) + 0.5 * grad / h + 0.5 * inner_M(s.U, A * s.U, grid) + 0.5 * uJ.dot(B * uJ);
}

WaveState sample_state(Eigen::Index n, const Grid1D& grid, const std::function<double(int, double)>& u0,
                       const std::function<double(int, double)>& u1) {
  WaveState s = WaveState::zero(n, grid);
  for (int k = 0; k < n; ++k) {
    for (int j = 1; j <= grid.J; ++j) {
      s.U(k, j) = u0 ? u0(k, grid.x(j)) : 0.0;
      s.V(k, j) = u1 ? u1(k, grid.x(j)) : 0.0;
    }
  }
  return s;
}

Mat standing_modes(const Grid1D& grid, const Mat& amplitudes) {
  Mat out = Mat::Zero(amplitudes.rows(), grid.nodes());
  for (Eigen::Index k = 0; k < amplitudes.rows(); ++k) {
    for (Eigen::Index m = 0; m < amplitudes.cols(); ++m) {
      const double freq = (static_cast<double>(m) + 0.5) * std::numbers::pi;
      for (int j = 1; j <= grid.J; ++j) out(k, j) += amplitudes(k, m) * std::sin(freq * grid.x(j));
    }
  }
  return out;
}

WaveState step_forward(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                       const WaveState& state, const Vec& h_now, const Vec& h_next) {
  cfg.validate(grid);
  state.validate(problem.N(), grid);
  WaveStepper stepper(problem.A, problem.B, problem.D, grid, cfg.backend);
  WaveState s = state;
  BlowUpGuard guard(grid, cfg.dt);
  guard.reset(s);
  stepper.start(s, &h_now);
  stepper.step(s, &h_next, cfg.dt);
  guard.check(s, (problem.D * h_next).norm(), 1);
  return s;
}

namespace {

WaveTrajectory run(const Mat& A, const Mat& B, const Mat& D, const Grid1D& grid, const SimConfig& cfg,
                   const WaveState& init, const Mat* H) {
  const int steps = cfg.steps();
  const int total = steps + cfg.post_steps();
  WaveStepper stepper(A, B, D, grid, cfg.backend);
  BlowUpGuard guard(grid, cfg.dt);
  WaveState s = init;
  guard.reset(s);

  WaveTrajectory traj;
  traj.trace = Mat::Zero(A.rows(), total + 1);
  traj.trace_t.reserve(static_cast<std::size_t>(total + 1));
  auto record = [&](int n) {
    const double t = n * cfg.dt;
    traj.trace.col(n) = s.U.col(grid.J);
    traj.trace_t.push_back(t);
    if (n % cfg.stride == 0 || n == steps || n == total) {
      traj.t.push_back(t);
      traj.states.push_back(s);
    }
  };

  Vec h0;
  if (H != nullptr) h0 = H->col(0);
  stepper.start(s, H != nullptr ? &h0 : nullptr);
  record(0);
  Vec hn;
  for (int n = 0; n < total; ++n) {
    const bool controlled = H != nullptr && n + 1 <= steps;
    if (controlled) hn = H->col(n + 1);
    stepper.step(s, controlled ? &hn : nullptr, cfg.dt);
    guard.check(s, controlled ? (D * hn).norm() : 0.0, n + 1);
    record(n + 1);
  }
  return traj;
}

}  // namespace

WaveTrajectory simulate(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                        const WaveState& init, const ControlSchedule& ctrl) {
  cfg.validate(grid);
  init.validate(problem.N(), grid);
  ctrl.validate(problem.M(), cfg);
  return run(problem.A, problem.B, problem.D, grid, cfg, init, &ctrl.H);
}

WaveTrajectory simulate_adjoint(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                const WaveState& init) {
  cfg.validate(grid);
  init.validate(problem.N(), grid);
  const Mat At = problem.A.transpose();
  const Mat Bt = problem.B.transpose();
  return run(At, Bt, Mat::Zero(problem.N(), 1), grid, cfg, init, nullptr);
}

Vec trapezoid_weights(int steps, double dt) {
  Vec w = Vec::Constant(steps + 1, dt);
  w(0) = 0.5 * dt;
  w(steps) = 0.5 * dt;
  return w;
}

double duality_defect(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                      const WaveState& init_fwd, const ControlSchedule& ctrl, const WaveState& init_adj) {
  SimConfig plain = cfg;
  plain.post_window = 0.0;
  plain.stride = cfg.steps();
  const WaveTrajectory fwd = simulate(problem, grid, plain, init_fwd, ctrl);
  const WaveTrajectory adj = simulate_adjoint(problem, grid, plain, init_adj);
  const WaveState& u_end = fwd.states.back();
  const WaveState& phi_end = adj.states.back();

  const double p0 = inner_M(init_fwd.V, init_adj.U, grid) - inner_M(init_fwd.U, init_adj.V, grid);
  const double pT = inner_M(u_end.V, phi_end.U, grid) - inner_M(u_end.U, phi_end.V, grid);
  const Vec w = trapezoid_weights(plain.steps(), plain.dt);
  double boundary = 0.0;
  for (int n = 0; n <= plain.steps(); ++n) {
    boundary += w(n) * (problem.D * ctrl.H.col(n)).dot(adj.trace.col(n));
  }
  return std::abs(pT - p0 - boundary);
}

}  // namespace wavesync
