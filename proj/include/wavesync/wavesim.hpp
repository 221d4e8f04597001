// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_WAVESIM_HPP
#define WAVESYNC_WAVESIM_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "wavesync/linalg.hpp"
#include "wavesync/syncalg.hpp"

// Semi-discrete coupled wave system on (0, 1):
//
//   U'' - U_xx + A U = 0,   U(t, 0) = 0,   U_x(t, 1) + B U(t, 1) = D H(t),
//
// second-order finite differences on x_j = j h, a ghost node closing the
// Robin end, and velocity-Verlet (leapfrog) in time. The adjoint system uses
// A^T, B^T and no control.
//
// Discrete inner products are weighted with the trapezoidal mass
// m_j = h (0 < j < J), m_J = h / 2; the node x = 0 carries no weight.

namespace wavesync {

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Grid1D {
  int J = 100;

  double h() const { return 1.0 / J; }
  double x(int j) const { return static_cast<double>(j) / J; }
  int nodes() const { return J + 1; }
  void validate() const;
};

enum class Backend { Serial, OpenMP };

struct SimConfig {
  double T = 4.0;
  double dt = 0.005;
  double cfl_max = 0.9;
  /// Extra homogeneous evolution after T (control switched off).
  double post_window = 0.0;
  /// Store every `stride`-th state in trajectories.
  int stride = 1;
  Backend backend = Backend::OpenMP;

  /// dt = ratio * h, T unchanged.
  static SimConfig with_cfl(const Grid1D& grid, double T, double ratio);

  int steps() const;       // T / dt
  int post_steps() const;  // post_window / dt
  void validate(const Grid1D& grid) const;
};

/// U and V are N x (J + 1); column j is node j.
struct WaveState {
  Mat U;
  Mat V;

  static WaveState zero(Eigen::Index n, const Grid1D& grid);
  Eigen::Index components() const { return U.rows(); }
  void validate(Eigen::Index n, const Grid1D& grid) const;
};

/// Boundary control samples H(t_n), t_n = n dt, n = 0..steps; M x (steps + 1).
struct ControlSchedule {
  Mat H;
  double dt = 0.0;

  static ControlSchedule zero(Eigen::Index m, const SimConfig& cfg);
  int steps() const { return static_cast<int>(H.cols()) - 1; }
  void validate(Eigen::Index m, const SimConfig& cfg) const;
};

struct WaveTrajectory {
  std::vector<double> t;          // times of stored states
  std::vector<WaveState> states;  // strided
  std::vector<double> trace_t;    // every step
  Mat trace;                      // N x (#steps + 1), U at x = 1
};

/// Coefficients of one system (forward or adjoint) plus scratch space.
class WaveStepper {
 public:
  WaveStepper(const Mat& A, const Mat& B, const Mat& D, const Grid1D& grid, Backend backend);

  /// Must be called once before step(); caches the acceleration.
  void start(const WaveState& s, const Vec* h);
  /// One Verlet step of size dt (negative dt runs backward in time).
  /// `h_next` is the control sample at the new time level, or null.
  void step(WaveState& s, const Vec* h_next, double dt);

 private:
  void acceleration(const Mat& U, const Vec* h, Mat& out);

  Mat A_;
  Mat B_;
  Mat D_;
  Grid1D grid_;
  Backend backend_;
  Mat acc_;
  Vec g_;
};

double inner_M(const Mat& X, const Mat& Y, const Grid1D& grid);
double norm2_M(const Mat& X, const Grid1D& grid);

/// 1/2 ||V||^2 + 1/2 sum |U_{j+1} - U_j|^2 / h + 1/2 <U, A U> + 1/2 U_J . B U_J.
/// Conserved by the semi-discrete homogeneous flow when A and B are
/// symmetric.
double discrete_energy(const Mat& A, const Mat& B, const WaveState& s, const Grid1D& grid);

/// Initial data sampled from per-component functions of x; the Dirichlet
/// node is forced to zero.
WaveState sample_state(Eigen::Index n, const Grid1D& grid, const std::function<double(int, double)>& u0,
                       const std::function<double(int, double)>& u1);

/// sum_m a_{k,m} sin((m - 1/2) pi x) per component: eigenmodes of the
/// uncoupled Dirichlet / Neumann problem.
Mat standing_modes(const Grid1D& grid, const Mat& amplitudes);

WaveState step_forward(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                       const WaveState& state, const Vec& h_now, const Vec& h_next);

WaveTrajectory simulate(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                        const WaveState& init, const ControlSchedule& ctrl);

WaveTrajectory simulate_adjoint(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                                const WaveState& init);

/// |P(T) - P(0) - sum_n w_n (D H_n) . Phi_n(1)| with the pairing
/// P(t) = <V, Phi>_M - <U, Phi'>_M and trapezoid weights w_n.
double duality_defect(const SyncProblem& problem, const Grid1D& grid, const SimConfig& cfg,
                      const WaveState& init_fwd, const ControlSchedule& ctrl, const WaveState& init_adj);

/// Trapezoid weights w_n over steps + 1 samples.
Vec trapezoid_weights(int steps, double dt);

}  // namespace wavesync

#endif  // WAVESYNC_WAVESIM_HPP
