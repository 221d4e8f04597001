// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wavesync {

namespace {

struct Svd {
  Vec sigma;
  Mat u;
  Mat v;
};

Svd full_svd(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

// Number of singular values strictly above max(rank_rel * sigma_max, floor).
Eigen::Index count_above(const Vec& sigma, double rank_rel, double floor) {
  if (sigma.size() == 0) return 0;
  const double cutoff = std::max(rank_rel * sigma(0), floor);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++r;
  }
  return r;
}

SubspaceBasis kernel_with_floor(const Mat& m, const Tolerances& tol, double floor) {
  const Eigen::Index n = m.cols();
  if (n == 0) return SubspaceBasis::zero(0);
  if (m.rows() == 0) return SubspaceBasis::full(n);
  const Svd s = full_svd(m);
  const Eigen::Index r = count_above(s.sigma, tol.rank_rel, floor);
  Mat k = s.v.rightCols(n - r);
  canonicalize_signs(k);
  return SubspaceBasis(n, std::move(k));
}

}  // namespace

void Tolerances::validate() const {
  auto ok = [](double x) { return std::isfinite(x) && x > 0.0 && x < 1.0; };
  if (!ok(rank_rel) || !ok(residual_abs)) {
    throw InputError("tolerances must lie in (0, 1)");
  }
}

SubspaceBasis::SubspaceBasis(Eigen::Index ambient_dim) : ambient_(ambient_dim), q_(ambient_dim, 0) {}

SubspaceBasis::SubspaceBasis(Eigen::Index ambient_dim, Mat columns)
    : ambient_(ambient_dim), q_(std::move(columns)) {
  if (q_.rows() != ambient_) {
    throw InputError("subspace basis rows (" + std::to_string(q_.rows()) +
                     ") differ from ambient dimension (" + std::to_string(ambient_) + ")");
  }
  if (q_.cols() > ambient_) throw InputError("more basis vectors than ambient dimension");
  require_finite(q_, "subspace basis");
  if (q_.cols() == 0) return;
  const Mat gram = q_.transpose() * q_;
  const double err = (gram - Mat::Identity(q_.cols(), q_.cols())).cwiseAbs().maxCoeff();
  if (err > kOrthTol) {
    throw InputError("subspace basis is not orthonormal (Gram error " + std::to_string(err) + ")");
  }
}

SubspaceBasis SubspaceBasis::full(Eigen::Index ambient_dim) {
  return SubspaceBasis(ambient_dim, Mat::Identity(ambient_dim, ambient_dim));
}

SubspaceBasis SubspaceBasis::span_of(const Mat& m, const Tolerances& tol) {
  require_finite(m, "matrix");
  const Eigen::Index n = m.rows();
  if (m.cols() == 0 || n == 0) return SubspaceBasis::zero(n);
  const Svd s = full_svd(m);
  const Eigen::Index r = count_above(s.sigma, tol.rank_rel, 0.0);
  Mat q = s.u.leftCols(r);
  canonicalize_signs(q);
  return SubspaceBasis(n, std::move(q));
}

std::vector<Vec> SubspaceBasis::vectors() const {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(q_.cols()));
  for (Eigen::Index i = 0; i < q_.cols(); ++i) out.emplace_back(q_.col(i));
  return out;
}

Mat SubspaceBasis::projector() const { return q_ * q_.transpose(); }

double SubspaceBasis::residual(const Vec& x) const {
  if (x.size() != ambient_) throw InputError("vector dimension mismatch");
  return (x - q_ * (q_.transpose() * x)).norm();
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + " has non-finite entries");
}

double norm2(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

std::vector<double> singular_values(const Mat& m) {
  require_finite(m, "matrix");
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

Eigen::Index rank_of(const Mat& m, const Tolerances& tol) {
  require_finite(m, "matrix");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  return count_above(svd.singularValues(), tol.rank_rel, 0.0);
}

SubspaceBasis right_kernel(const Mat& m, const Tolerances& tol) {
  require_finite(m, "matrix");
  return kernel_with_floor(m, tol, 0.0);
}

SubspaceBasis orth_complement(const SubspaceBasis& b, const Tolerances& tol) {
  if (b.empty()) return SubspaceBasis::full(b.ambient_dim());
  if (b.dim() == b.ambient_dim()) return SubspaceBasis::zero(b.ambient_dim());
  return kernel_with_floor(b.matrix().transpose(), tol, tol.residual_abs);
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, const Tolerances& tol) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw InputError("intersect: ambient dimensions differ (" + std::to_string(a.ambient_dim()) +
                     " vs " + std::to_string(b.ambient_dim()) + ")");
  }
  const Eigen::Index n = a.ambient_dim();
  if (a.empty() || b.empty()) return SubspaceBasis::zero(n);
  Mat stacked(2 * n, n);
  const Mat id = Mat::Identity(n, n);
  stacked.topRows(n) = id - a.projector();
  stacked.bottomRows(n) = id - b.projector();
  return kernel_with_floor(stacked, tol, tol.residual_abs);
}

SubspaceBasis preimage(const Mat& m, const SubspaceBasis& v, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() != v.ambient_dim()) {
    throw InputError("preimage: shape mismatch");
  }
  const Eigen::Index n = m.rows();
  const Mat rejected = (Mat::Identity(n, n) - v.projector()) * m;
  return kernel_with_floor(rejected, tol, tol.residual_abs * std::max(1.0, norm2(m)));
}

double max_principal_angle(const SubspaceBasis& a, const SubspaceBasis& b) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return 1.0;
  if (a.empty()) return 0.0;
  const Mat r = b.matrix() - a.matrix() * (a.matrix().transpose() * b.matrix());
  return std::min(1.0, norm2(r));
}

bool is_similar_to_symmetric(const Mat& m, const Tolerances& tol) {
  require_finite(m, "matrix");
  if (m.rows() != m.cols()) throw InputError("is_similar_to_symmetric: matrix must be square");
  const Eigen::Index n = m.rows();
  if (n == 0) return true;
  Eigen::EigenSolver<Mat> es(m, false);
  if (es.info() != Eigen::Success) throw NumericError("eigen-solver failed to converge");
  const double scale = norm2(m);
  const double gap = tol.residual_abs * scale;

  std::vector<double> lambda;
  lambda.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (std::abs(z.imag()) > gap) return false;
    lambda.push_back(z.real());
  }
  std::sort(lambda.begin(), lambda.end());

  std::size_t start = 0;
  while (start < lambda.size()) {
    std::size_t end = start + 1;
    while (end < lambda.size() && lambda[end] - lambda[end - 1] <= gap) ++end;
    const auto algebraic = static_cast<Eigen::Index>(end - start);
    double mean = 0.0;
    for (std::size_t i = start; i < end; ++i) mean += lambda[i];
    mean /= static_cast<double>(algebraic);
    const Mat shifted = m - mean * Mat::Identity(n, n);
    const Eigen::Index geometric =
        kernel_with_floor(shifted, tol, tol.residual_abs * std::max(scale, 1e-300)).dim();
    if (geometric != algebraic) return false;
    start = end;
  }
  return true;
}

void canonicalize_signs(Mat& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      if (std::abs(columns(r, c)) > 1e-12) {
        if (columns(r, c) < 0.0) columns.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace wavesync
