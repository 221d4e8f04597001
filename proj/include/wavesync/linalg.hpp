// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_LINALG_HPP
#define WAVESYNC_LINALG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wavesync {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Malformed input: non-finite entries, shape mismatches, bad partitions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (eigen-solver did not converge, etc).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside of its mathematical domain.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Tolerances {
  double rank_rel = 1e-10;     // singular value cutoff relative to sigma_max
  double residual_abs = 1e-9;  // absolute residual bound

  void validate() const;
};

/// Orthonormal basis of a subspace of R^n, stored as the columns of an
/// n x k matrix. k == 0 encodes the zero subspace.
class SubspaceBasis {
 public:
  static constexpr double kOrthTol = 1e-10;

  explicit SubspaceBasis(Eigen::Index ambient_dim = 0);
  /// Columns must already be orthonormal (checked within kOrthTol).
  SubspaceBasis(Eigen::Index ambient_dim, Mat columns);

  static SubspaceBasis zero(Eigen::Index ambient_dim) { return SubspaceBasis(ambient_dim); }
  static SubspaceBasis full(Eigen::Index ambient_dim);
  /// Orthonormal basis of the column span of m.
  static SubspaceBasis span_of(const Mat& m, const Tolerances& tol = {});

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dim() const { return q_.cols(); }
  bool empty() const { return q_.cols() == 0; }
  const Mat& matrix() const { return q_; }
  Vec vector(Eigen::Index i) const { return q_.col(i); }
  std::vector<Vec> vectors() const;

  /// Orthogonal projector onto the subspace.
  Mat projector() const;
  /// Distance of x from the subspace, ||(I - P) x||.
  double residual(const Vec& x) const;

 private:
  Eigen::Index ambient_;
  Mat q_;
};

void require_finite(const Mat& m, const char* what);

/// 2-norm (largest singular value); 0 for empty matrices.
double norm2(const Mat& m);

std::vector<double> singular_values(const Mat& m);

Eigen::Index rank_of(const Mat& m, const Tolerances& tol = {});

/// Orthonormal basis of {x : m x = 0}.
SubspaceBasis right_kernel(const Mat& m, const Tolerances& tol = {});

SubspaceBasis orth_complement(const SubspaceBasis& b, const Tolerances& tol = {});

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b,
                        const Tolerances& tol = {});

/// {x : m x in v}, for square m.
SubspaceBasis preimage(const Mat& m, const SubspaceBasis& v, const Tolerances& tol = {});

/// Sine of the largest principal angle between two subspaces; 1 when the
/// dimensions differ.
double max_principal_angle(const SubspaceBasis& a, const SubspaceBasis& b);

/// True iff m has real spectrum and every eigenvalue cluster has geometric
/// multiplicity equal to its algebraic multiplicity.
bool is_similar_to_symmetric(const Mat& m, const Tolerances& tol = {});

/// Flips each column so its first entry with |x| > 1e-12 is positive.
void canonicalize_signs(Mat& columns);

}  // namespace wavesync

#endif  // WAVESYNC_LINALG_HPP
