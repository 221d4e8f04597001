// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_EXACT_JORDAN_HPP
#define WAVESYNC_EXACT_JORDAN_HPP

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wavesync/linalg.hpp"
#include "wavesync/syncalg.hpp"

namespace wavesync::exact {

using Rational = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rational>;

/// Dense rational matrix, row-major.
class RatMat {
 public:
  RatMat() = default;
  RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

  static RatMat from_integer_matrix(const Mat& m);
  static RatMat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int r, int c) { return a_[static_cast<std::size_t>(r * cols_ + c)]; }
  const Rational& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r * cols_ + c)]; }

  RatMat operator*(const RatMat& o) const;
  RatVec operator*(const RatVec& v) const;
  RatMat operator-(const RatMat& o) const;
  RatMat transpose() const;

  /// Basis of the right null space (reduced row echelon form).
  std::vector<RatVec> kernel() const;
  int rank() const;
  /// Some solution of this * x = b, or empty when inconsistent.
  std::vector<RatVec> solve(const RatVec& b) const;
  RatMat inverse() const;
  Mat to_double() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> a_;
};

Vec to_double(const RatVec& v);

/// A Jordan chain x_1, ..., x_r of A with A x_l = lambda x_l + x_{l+1},
/// x_{r+1} = 0, together with its projection C_p x_l, which is a Jordan
/// chain of the reduced matrix (the projected entries become zero once the
/// chain enters Ker(C_p)).
struct RootChain {
  Rational eigenvalue;
  std::vector<RatVec> chain;      // root vectors of A
  std::vector<RatVec> projected;  // C_p x_l, l = 1..(reduced chain length)
};

struct ExactProjection {
  RatMat reduced;  // reduced matrix, exact
  std::vector<RootChain> chains;
};

/// Exact-arithmetic version of project_eigenvectors for defective matrices.
///
/// A must have integer entries and order <= 6, and every eigenvalue of the
/// reduced matrix must be rational. A Jordan basis of the reduced matrix is
/// built and every reduced chain is lifted to a Jordan chain of A whose C_p
/// image it is. Throws PreconditionError for incompatible A and
/// UnsupportedError for non-integer input or irrational spectrum.
ExactProjection project_root_vectors_exact(const Mat& A, const GroupPartition& partition);

/// Exact eigenvalues with algebraic multiplicities; throws UnsupportedError
/// if part of the spectrum is irrational or complex.
std::vector<std::pair<Rational, int>> rational_eigenvalues(const RatMat& m);

}  // namespace wavesync::exact

#endif  // WAVESYNC_EXACT_JORDAN_HPP
