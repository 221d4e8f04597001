// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/kernels.hpp"

namespace wavesync::kernels {

namespace {

inline void interior_node(const OperatorView& op, const double* U, double* acc, int j, double inv_h2) {
  const int n = op.n;
  const double* um = U + static_cast<long>(j - 1) * n;
  const double* u = um + n;
  const double* up = u + n;
  double* a = acc + static_cast<long>(j) * n;
  for (int k = 0; k < n; ++k) {
    double s = (up[k] - 2.0 * u[k] + um[k]) * inv_h2;
    for (int l = 0; l < n; ++l) s -= op.A[k + l * n] * u[l];
    a[k] = s;
  }
}

inline void boundary_node(const OperatorView& op, const double* U, const double* g, double* acc) {
  const int n = op.n;
  const int J = op.J;
  const double* um = U + static_cast<long>(J - 1) * n;
  const double* u = um + n;
  double* a = acc + static_cast<long>(J) * n;
  const double inv_h2 = 1.0 / (op.h * op.h);
  const double two_over_h = 2.0 / op.h;
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * (um[k] - u[k]) * inv_h2;
    for (int l = 0; l < n; ++l) s -= (op.A[k + l * n] + two_over_h * op.B[k + l * n]) * u[l];
    if (g != nullptr) s += two_over_h * g[k];
    a[k] = s;
  }
}

}  // namespace

void acceleration_serial(const OperatorView& op, const double* U, const double* boundary, double* acc) {
  for (int k = 0; k < op.n; ++k) acc[k] = 0.0;
  const double inv_h2 = 1.0 / (op.h * op.h);
  for (int j = 1; j < op.J; ++j) interior_node(op, U, acc, j, inv_h2);
  boundary_node(op, U, boundary, acc);
}

void acceleration_omp(const OperatorView& op, const double* U, const double* boundary, double* acc) {
  for (int k = 0; k < op.n; ++k) acc[k] = 0.0;
  const double inv_h2 = 1.0 / (op.h * op.h);
#pragma omp parallel for schedule(static)
  for (int j = 1; j < op.J; ++j) interior_node(op, U, acc, j, inv_h2);
  boundary_node(op, U, boundary, acc);
}

void axpy_serial(int len, double a, const double* x, double* y) {
  for (int i = 0; i < len; ++i) y[i] += a * x[i];
}

void axpy_omp(int len, double a, const double* x, double* y) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < len; ++i) y[i] += a * x[i];
}

}  // namespace wavesync::kernels
