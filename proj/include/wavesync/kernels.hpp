// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_KERNELS_HPP
#define WAVESYNC_KERNELS_HPP

// Inner loops of the wave stepper. Every array is node-major: entry k of
// node j lives at [j * n + k], nodes 0..J. Each output entry depends only
// on inputs, so the OpenMP variants are bitwise identical to the serial
// ones for any thread count.

namespace wavesync::kernels {

struct OperatorView {
  int n = 0;               // components
  int J = 0;               // last node index
  double h = 0.0;
  const double* A = nullptr;  // n x n, column-major
  const double* B = nullptr;  // n x n, column-major
};

/// acc = (U_{j+1} - 2 U_j + U_{j-1}) / h^2 - A U_j on interior nodes; the
/// boundary node uses the ghost value U_{J+1} = U_{J-1} + 2h (g - B U_J),
/// where g = D H is passed in `boundary` (may be null for g = 0).
/// acc at node 0 is zero.
void acceleration_serial(const OperatorView& op, const double* U, const double* boundary, double* acc);
void acceleration_omp(const OperatorView& op, const double* U, const double* boundary, double* acc);

/// y += a * x over `len` entries.
void axpy_serial(int len, double a, const double* x, double* y);
void axpy_omp(int len, double a, const double* x, double* y);

}  // namespace wavesync::kernels

#endif  // WAVESYNC_KERNELS_HPP
