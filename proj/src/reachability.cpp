// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/reachability.hpp"

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wavesync {

namespace {

void check_system(const Mat& A, const Mat& B, const Mat& D) {
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(D, "D");
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n) {
    throw InputError("A and B must be square of the same order");
  }
  if (D.rows() != n) {
    throw InputError("D must have " + std::to_string(n) + " rows, got " + std::to_string(D.rows()));
  }
}

// Distinct eigenvalues, merged when closer than `gap`.
std::vector<std::complex<double>> distinct_eigenvalues(const Mat& m, double gap) {
  Eigen::EigenSolver<Mat> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("eigen-solver failed to converge");
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const std::complex<double>& w) { return std::abs(w - z) <= gap; });
    if (!seen) out.push_back(z);
  }
  return out;
}

}  // namespace

ReachabilityReport word_span(const Mat& A, const Mat& B, const Mat& D, const Tolerances& tol) {
  check_system(A, B, D);
  const Eigen::Index n = A.rows();

  SubspaceBasis span = SubspaceBasis::span_of(D, tol);
  int depth = 0;
  while (span.dim() < n && !span.empty()) {
    const Mat& s = span.matrix();
    Mat grown(n, 3 * s.cols());
    grown << s, A * s, B * s;
    SubspaceBasis next = SubspaceBasis::span_of(grown, tol);
    ++depth;
    if (next.dim() == span.dim()) break;
    span = std::move(next);
  }

  ReachabilityReport report;
  report.rank_R = span.dim();
  report.ker_RT = orth_complement(span, tol);
  report.im_R = std::move(span);
  report.word_depth_used = depth;
  return report;
}

SubspaceBasis largest_invariant_in_kernel(const Mat& At, const Mat& Bt, const SubspaceBasis& K,
                                          const Tolerances& tol) {
  require_finite(At, "At");
  require_finite(Bt, "Bt");
  const Eigen::Index n = K.ambient_dim();
  if (At.rows() != n || At.cols() != n || Bt.rows() != n || Bt.cols() != n) {
    throw InputError("largest_invariant_in_kernel: shape mismatch");
  }
  SubspaceBasis v = K;
  for (Eigen::Index step = 0; step <= n && !v.empty(); ++step) {
    SubspaceBasis next = intersect(v, intersect(preimage(At, v, tol), preimage(Bt, v, tol), tol), tol);
    if (next.dim() == v.dim()) return next;
    v = std::move(next);
  }
  return v;
}

Mat classical_kalman(const Mat& A, const Mat& D) {
  require_finite(A, "A");
  require_finite(D, "D");
  const Eigen::Index n = A.rows();
  if (A.cols() != n || D.rows() != n) throw InputError("classical_kalman: shape mismatch");
  const Eigen::Index m = D.cols();
  Mat out(n, n * m);
  if (m == 0) return out;
  out.leftCols(m) = D;
  for (Eigen::Index i = 1; i < n; ++i) {
    out.middleCols(i * m, m) = A * out.middleCols((i - 1) * m, m);
  }
  return out;
}

Eigen::Index mu_common_eigen(const Mat& A, const Mat& B, const Tolerances& tol) {
  check_system(A, B, Mat(A.rows(), 0));
  const Eigen::Index n = A.rows();
  if (n == 0) return 0;
  const Mat At = A.transpose();
  const Mat Bt = B.transpose();
  const double scale = std::max({norm2(A), norm2(B), 1.0});
  // Eigenvalues of non-normal matrices are only accurate to ~sqrt(eps), so
  // the kernel test uses a looser floor than plain rank decisions.
  const double floor = std::max(tol.residual_abs, 1e-8) * scale;

  using CMat = Eigen::MatrixXcd;
  const CMat id = CMat::Identity(n, n);
  Eigen::Index mu = 0;
  for (const auto& alpha : distinct_eigenvalues(At, floor)) {
    for (const auto& beta : distinct_eigenvalues(Bt, floor)) {
      CMat stacked(2 * n, n);
      stacked.topRows(n) = At.cast<std::complex<double>>() - alpha * id;
      stacked.bottomRows(n) = Bt.cast<std::complex<double>>() - beta * id;
      Eigen::JacobiSVD<CMat> svd(stacked);
      const auto& sigma = svd.singularValues();
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > floor) ++rank;
      }
      mu = std::max(mu, n - rank);
    }
  }
  return mu;
}

}  // namespace wavesync
