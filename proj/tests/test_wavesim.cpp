// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "wavesync/kernels.hpp"
#include "wavesync/reachability.hpp"
#include "wavesync/wavesim.hpp"

namespace wavesync {
namespace {

using testing::Rng;

SyncProblem scalar_problem(double a, double b) {
  SyncProblem p;
  p.A = Mat::Constant(1, 1, a);
  p.B = Mat::Constant(1, 1, b);
  p.D = Mat::Identity(1, 1);
  p.partition = GroupPartition::single(1);
  return p;
}

WaveState quarter_sine(const Grid1D& grid) {
  return sample_state(
      1, grid, [](int, double x) { return std::sin(0.5 * std::numbers::pi * x); }, nullptr);
}

// Max-norm error over one period of the standing mode
// u = cos(pi t / 2) sin(pi x / 2), taken over every stored state.
double period_error(int J) {
  const Grid1D grid{J};
  const SimConfig cfg = SimConfig::with_cfl(grid, 4.0, 0.5);
  const WaveState init = quarter_sine(grid);
  const WaveTrajectory traj =
      simulate(scalar_problem(0.0, 0.0), grid, cfg, init, ControlSchedule::zero(1, cfg));
  double err = 0.0;
  for (std::size_t n = 0; n < traj.states.size(); ++n) {
    const double c = std::cos(0.5 * std::numbers::pi * traj.t[n]);
    err = std::max(err, (traj.states[n].U - c * init.U).cwiseAbs().maxCoeff());
  }
  return err;
}

// Smallest kappa in (pi/2, pi) with kappa cos(kappa) + beta sin(kappa) = 0,
// so sin(kappa x) satisfies u_x(1) + beta u(1) = 0.
double robin_wavenumber(double beta) {
  double lo = 0.5 * std::numbers::pi;
  double hi = std::numbers::pi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::cos(mid) + beta * std::sin(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double relative_energy_drift(int J, double beta) {
  const Grid1D grid{J};
  SimConfig cfg = SimConfig::with_cfl(grid, 4.0, 0.5);
  const SyncProblem p = scalar_problem(0.0, beta);
  const double kappa = robin_wavenumber(beta);
  const WaveState init = sample_state(1, grid, [kappa](int, double x) { return std::sin(kappa * x); }, nullptr);
  const WaveTrajectory traj = simulate(p, grid, cfg, init, ControlSchedule::zero(1, cfg));
  const double e0 = discrete_energy(p.A, p.B, traj.states.front(), grid);
  double drift = 0.0;
  for (const WaveState& s : traj.states) drift = std::max(drift, std::abs(discrete_energy(p.A, p.B, s, grid) - e0));
  return drift / e0;
}

TEST(Grid, ValidationAndCfl) {
  EXPECT_THROW((Grid1D{4}).validate(), InputError);
  const Grid1D grid{100};
  EXPECT_DOUBLE_EQ(grid.h(), 0.01);
  const SimConfig ok = SimConfig::with_cfl(grid, 4.0, 0.5);
  EXPECT_EQ(ok.steps(), 800);
  EXPECT_NO_THROW(ok.validate(grid));
  SimConfig too_big = SimConfig::with_cfl(grid, 4.0, 1.2);
  EXPECT_THROW(too_big.validate(grid), InstabilityError);
  SimConfig ragged = ok;
  ragged.T = 4.003;
  EXPECT_THROW(ragged.validate(grid), InputError);
}

TEST(State, DirichletNodeAndShapes) {
  const Grid1D grid{10};
  WaveState s = WaveState::zero(2, grid);
  EXPECT_NO_THROW(s.validate(2, grid));
  EXPECT_THROW(s.validate(3, grid), InputError);
  s.U(1, 0) = 1.0;
  EXPECT_THROW(s.validate(2, grid), InputError);
}

TEST(Simulate, ZeroStaysZero) {
  const Grid1D grid{20};
  const SimConfig cfg = SimConfig::with_cfl(grid, 1.0, 0.5);
  const SyncProblem p = testing::pair_problem();
  const WaveTrajectory traj = simulate(p, grid, cfg, WaveState::zero(2, grid), ControlSchedule::zero(1, cfg));
  for (const WaveState& s : traj.states) {
    EXPECT_EQ(s.U.norm(), 0.0);
    EXPECT_EQ(s.V.norm(), 0.0);
  }
  EXPECT_EQ(traj.trace.norm(), 0.0);
}

TEST(Simulate, TrajectorySamplingAndPostWindow) {
  const Grid1D grid{20};
  SimConfig cfg = SimConfig::with_cfl(grid, 1.0, 0.5);
  cfg.post_window = 0.5;
  cfg.stride = 7;
  const WaveTrajectory traj =
      simulate(testing::pair_problem(), grid, cfg, testing::pair_init(grid), ControlSchedule::zero(1, cfg));
  EXPECT_EQ(traj.trace.cols(), cfg.steps() + cfg.post_steps() + 1);
  EXPECT_EQ(traj.trace_t.size(), static_cast<std::size_t>(traj.trace.cols()));
  EXPECT_DOUBLE_EQ(traj.t.front(), 0.0);
  EXPECT_NEAR(traj.t.back(), 1.5, 1e-12);
  bool has_T = false;
  for (double t : traj.t) has_T = has_T || std::abs(t - 1.0) < 1e-12;
  EXPECT_TRUE(has_T);
}

TEST(Simulate, StandingModeIsSecondOrder) {
  const double e50 = period_error(50);
  const double e100 = period_error(100);
  const double e200 = period_error(200);
  EXPECT_NEAR(std::log2(e50 / e100), 2.0, 0.3);
  EXPECT_NEAR(std::log2(e100 / e200), 2.0, 0.3);
}

TEST(Simulate, RobinEnergyDriftSmallAndShrinking) {
  const double d100 = relative_energy_drift(100, 1.0);
  const double d200 = relative_energy_drift(200, 1.0);
  EXPECT_LE(d200, 1e-4);
  EXPECT_LT(d200, d100);
}

TEST(Simulate, EnergyConservedForSymmetricCoupledSystem) {
  const Grid1D grid{100};
  const SimConfig cfg = SimConfig::with_cfl(grid, 4.0, 0.5);
  const SyncProblem p = testing::pair_problem();
  const WaveTrajectory traj = simulate(p, grid, cfg, testing::pair_init(grid), ControlSchedule::zero(1, cfg));
  const double e0 = discrete_energy(p.A, p.B, traj.states.front(), grid);
  for (const WaveState& s : traj.states) ASSERT_NEAR(discrete_energy(p.A, p.B, s, grid), e0, 1e-3 * e0);
}

TEST(Simulate, LinearInDataAndControlJointly) {
  Rng rng(41);
  const Grid1D grid{40};
  const SimConfig cfg = SimConfig::with_cfl(grid, 2.0, 0.5);
  SyncProblem p = testing::pair_problem();
  p.D = Mat::Identity(2, 2);
  const WaveState init = testing::random_state(rng, 2, grid);
  const ControlSchedule c1 = testing::random_schedule(rng, 2, cfg);
  const ControlSchedule c2 = testing::random_schedule(rng, 2, cfg);
  ControlSchedule sum = c1;
  sum.H += c2.H;
  const WaveState a = simulate(p, grid, cfg, init, sum).states.back();
  const WaveState b = simulate(p, grid, cfg, init, c1).states.back();
  const WaveState c = simulate(p, grid, cfg, WaveState::zero(2, grid), c2).states.back();
  const double scale = a.U.cwiseAbs().maxCoeff() + a.V.cwiseAbs().maxCoeff();
  EXPECT_LE((a.U - b.U - c.U).cwiseAbs().maxCoeff(), 1e-12 * scale);
  EXPECT_LE((a.V - b.V - c.V).cwiseAbs().maxCoeff(), 1e-12 * scale);
}

TEST(Simulate, ScalarSuperposition) {
  Rng rng(42);
  const Grid1D grid{30};
  const SimConfig cfg = SimConfig::with_cfl(grid, 1.0, 0.5);
  const SyncProblem p = scalar_problem(0.0, 0.0);
  const WaveState init = quarter_sine(grid);
  const ControlSchedule c1 = testing::random_schedule(rng, 1, cfg);
  const ControlSchedule c2 = testing::random_schedule(rng, 1, cfg);
  ControlSchedule sum = c1;
  sum.H += c2.H;
  const Mat a = simulate(p, grid, cfg, init, sum).trace;
  const Mat b = simulate(p, grid, cfg, init, c1).trace;
  const Mat c = simulate(p, grid, cfg, WaveState::zero(1, grid), c2).trace;
  EXPECT_LE((a - b - c).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
}

// Projections onto Ker(R^T) evolve in a closed system that the controls
// never reach.
TEST(Simulate, ProjectionOntoKernelIsControlInvariant) {
  Rng rng(43);
  const Grid1D grid{40};
  const SimConfig cfg = SimConfig::with_cfl(grid, 2.0, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = testing::uniform_int(rng, 2, 4);
    const int d = testing::uniform_int(rng, 1, n - 1);
    const testing::DeficientTriple t = testing::random_deficient_triple(rng, n, n - d, d);
    SyncProblem p;
    p.A = t.A;
    p.B = t.B;
    p.D = t.D;
    p.partition = GroupPartition::single(n);
    const SubspaceBasis k = word_span(p.A, p.B, p.D).ker_RT;
    ASSERT_EQ(k.dim(), d);
    const WaveState init = testing::random_state(rng, n, grid);
    const WaveTrajectory a = simulate(p, grid, cfg, init, testing::random_schedule(rng, n - d, cfg));
    const WaveTrajectory b = simulate(p, grid, cfg, init, testing::random_schedule(rng, n - d, cfg));
    ASSERT_EQ(a.states.size(), b.states.size());
    const Mat Qt = k.matrix().transpose();
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      scale = std::max(scale, (Qt * a.states[i].U).cwiseAbs().maxCoeff());
      diff = std::max(diff, (Qt * (a.states[i].U - b.states[i].U)).cwiseAbs().maxCoeff());
    }
    ASSERT_GT(scale, 0.0);
    EXPECT_LE(diff, 1e-10 * scale);
  }
}

TEST(Simulate, BackendsAreBitwiseIdentical) {
  Rng rng(44);
  const Grid1D grid{64};
  SimConfig cfg = SimConfig::with_cfl(grid, 1.0, 0.5);
  SyncProblem p;
  p.A = testing::random_matrix(rng, 3, 3);
  p.B = Mat::Identity(3, 3);
  p.D = testing::random_matrix(rng, 3, 2);
  p.partition = GroupPartition::single(3);
  const WaveState init = testing::random_state(rng, 3, grid);
  const ControlSchedule c = testing::random_schedule(rng, 2, cfg);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  cfg.backend = Backend::OpenMP;
  const WaveTrajectory par = simulate(p, grid, cfg, init, c);
  omp_set_num_threads(saved);
  cfg.backend = Backend::Serial;
  const WaveTrajectory ser = simulate(p, grid, cfg, init, c);
  ASSERT_EQ(par.states.size(), ser.states.size());
  for (std::size_t i = 0; i < par.states.size(); ++i) {
    ASSERT_TRUE((par.states[i].U.array() == ser.states[i].U.array()).all());
    ASSERT_TRUE((par.states[i].V.array() == ser.states[i].V.array()).all());
  }
}

TEST(Kernels, AccelerationMatchesAcrossThreadCounts) {
  Rng rng(45);
  const int n = 4;
  const int J = 257;
  const Mat A = testing::random_matrix(rng, n, n);
  const Mat B = testing::random_matrix(rng, n, n);
  Mat U = testing::random_matrix(rng, n, J + 1);
  U.col(0).setZero();
  const Vec g = testing::random_matrix(rng, n, 1);
  const kernels::OperatorView op{n, J, 1.0 / J, A.data(), B.data()};
  Mat ser(n, J + 1);
  kernels::acceleration_serial(op, U.data(), g.data(), ser.data());
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 5}) {
    omp_set_num_threads(threads);
    Mat par(n, J + 1);
    kernels::acceleration_omp(op, U.data(), g.data(), par.data());
    EXPECT_TRUE((par.array() == ser.array()).all()) << threads << " threads";
  }
  omp_set_num_threads(saved);
  // Interior rows agree with the three-point formula.
  const double h2 = 1.0 / (static_cast<double>(J) * J);
  const Vec expect = (U.col(6) - 2.0 * U.col(5) + U.col(4)) / h2 - A * U.col(5);
  EXPECT_LE((ser.col(5) - expect).norm(), 1e-9 * expect.norm());
  EXPECT_EQ(ser.col(0).norm(), 0.0);
}

TEST(Adjoint, SelfAdjointScalarMatchesForward) {
  const Grid1D grid{50};
  const SimConfig cfg = SimConfig::with_cfl(grid, 2.0, 0.5);
  const SyncProblem p = scalar_problem(0.7, 1.3);
  const WaveState init = quarter_sine(grid);
  const WaveTrajectory fwd = simulate(p, grid, cfg, init, ControlSchedule::zero(1, cfg));
  const WaveTrajectory adj = simulate_adjoint(p, grid, cfg, init);
  ASSERT_EQ(fwd.states.size(), adj.states.size());
  for (std::size_t i = 0; i < fwd.states.size(); ++i) {
    ASSERT_TRUE((fwd.states[i].U.array() == adj.states[i].U.array()).all());
  }
  const WaveTrajectory zero = simulate_adjoint(p, grid, cfg, WaveState::zero(1, grid));
  EXPECT_EQ(zero.states.back().U.norm(), 0.0);
}

TEST(Adjoint, AdjointEnergyConservedForSymmetricData) {
  const Grid1D grid{100};
  const SimConfig cfg = SimConfig::with_cfl(grid, 4.0, 0.5);
  const SyncProblem p = testing::pair_problem();
  const WaveTrajectory adj = simulate_adjoint(p, grid, cfg, testing::pair_init(grid));
  const double e0 = discrete_energy(p.A, p.B, adj.states.front(), grid);
  for (const WaveState& s : adj.states) ASSERT_NEAR(discrete_energy(p.A, p.B, s, grid), e0, 1e-3 * e0);
}

// The discrete pairing <V, Phi> - <U, Phi'> changes exactly by the
// trapezoid-weighted boundary work, so the defect sits at round-off.
TEST(Duality, DefectAtRoundOffForRandomNonsymmetricData) {
  Rng rng(46);
  for (int J : {25, 50, 100}) {
    const Grid1D grid{J};
    const SimConfig cfg = SimConfig::with_cfl(grid, 2.0, 0.5);
    SyncProblem p;
    p.A = testing::random_matrix(rng, 3, 3);
    p.B = testing::random_matrix(rng, 3, 3);
    p.D = testing::random_matrix(rng, 3, 2);
    p.partition = GroupPartition::single(3);
    const WaveState u0 = testing::random_state(rng, 3, grid);
    const WaveState phi0 = testing::random_state(rng, 3, grid);
    const ControlSchedule c = testing::random_schedule(rng, 2, cfg);
    const double defect = duality_defect(p, grid, cfg, u0, c, phi0);
    EXPECT_LE(defect, 1e-9) << "J = " << J;
  }
}

TEST(Duality, HomogeneousAndZeroAdjoint) {
  const Grid1D grid{200};
  const SimConfig cfg = SimConfig::with_cfl(grid, 4.0, 0.5);
  const SyncProblem p = testing::pair_problem();
  const ControlSchedule none = ControlSchedule::zero(1, cfg);
  EXPECT_LE(duality_defect(p, grid, cfg, testing::pair_init(grid), none, testing::pair_init(grid)), 1e-6);
  Rng rng(47);
  const ControlSchedule c = testing::random_schedule(rng, 1, cfg);
  EXPECT_EQ(duality_defect(p, grid, cfg, testing::pair_init(grid), c, WaveState::zero(2, grid)), 0.0);
}

TEST(Guard, ExplicitInstabilityIsCaught) {
  const Grid1D grid{40};
  SimConfig cfg = SimConfig::with_cfl(grid, 3.0, 1.5);
  cfg.cfl_max = 2.0;
  const SyncProblem p = scalar_problem(0.0, 0.0);
  EXPECT_THROW(simulate(p, grid, cfg, quarter_sine(grid), ControlSchedule::zero(1, cfg)), InstabilityError);
}

TEST(Guard, LargeControlIsNotMistakenForInstability) {
  const Grid1D grid{40};
  const SimConfig cfg = SimConfig::with_cfl(grid, 1.8, 0.9);
  ControlSchedule c = ControlSchedule::zero(1, cfg);
  c.H.setConstant(1e6);
  EXPECT_NO_THROW(simulate(scalar_problem(0.0, 0.0), grid, cfg, WaveState::zero(1, grid), c));
}

TEST(Schedule, ShapeValidation) {
  const Grid1D grid{20};
  const SimConfig cfg = SimConfig::with_cfl(grid, 1.0, 0.5);
  ControlSchedule c = ControlSchedule::zero(1, cfg);
  EXPECT_THROW(c.validate(2, cfg), InputError);
  c.dt *= 2.0;
  EXPECT_THROW(c.validate(1, cfg), InputError);
}

TEST(Weights, TrapezoidSumsToHorizon) {
  const Vec w = trapezoid_weights(8, 0.25);
  EXPECT_DOUBLE_EQ(w.sum(), 2.0);
  EXPECT_DOUBLE_EQ(w(0), 0.125);
}

}  // namespace
}  // namespace wavesync
