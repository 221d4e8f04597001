// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_SYNCALG_HPP
#define WAVESYNC_SYNCALG_HPP

#include <complex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wavesync/linalg.hpp"
#include "wavesync/reachability.hpp"

namespace wavesync {

/// Requested computation is outside what the numerics can do reliably.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cut points 0 = n_0 < n_1 < ... < n_p = N splitting the N state
/// components into p consecutive groups.
class GroupPartition {
 public:
  explicit GroupPartition(std::vector<int> cut_points);

  /// Single group (p = 1).
  static GroupPartition single(int n) { return GroupPartition({0, n}); }

  int N() const { return cuts_.back(); }
  int p() const { return static_cast<int>(cuts_.size()) - 1; }
  const std::vector<int>& cut_points() const { return cuts_; }
  /// Half-open component range [begin, end) of group r (0-based).
  std::pair<int, int> group(int r) const { return {cuts_[r], cuts_[r + 1]}; }
  int group_size(int r) const { return cuts_[r + 1] - cuts_[r]; }

 private:
  std::vector<int> cuts_;
};

/// (N - p) x N block-diagonal matrix of the bands S_r with rows (1, -1).
Mat build_Cp(const GroupPartition& partition);

struct KerCp {
  std::vector<Vec> indicators;  // e_r, (e_r)_j = 1 on group r
  SubspaceBasis orthonormal;
};

KerCp ker_Cp_vectors(const GroupPartition& partition);

/// Indicator vectors e_r as the columns of an N x p matrix.
Mat indicator_matrix(const GroupPartition& partition);

/// M Ker(C_p) ⊆ Ker(C_p), tested as ||C_p M e_r|| / ||e_r|| <= residual_abs ||M||.
bool is_cp_compatible(const Mat& M, const GroupPartition& partition, const Tolerances& tol = {});

/// C_p M C_p^T (C_p C_p^T)^{-1}; throws PreconditionError when M is not
/// C_p-compatible.
Mat reduced_matrix(const Mat& M, const GroupPartition& partition, const Tolerances& tol = {});

/// Gram matrix (E_r, e_s) equals the identity within residual_abs.
bool check_biorthonormal(const std::vector<Vec>& E, const std::vector<Vec>& e, const Tolerances& tol = {});

/// Rebase span(E_basis) so that (E_r, e_s) = delta_rs. Throws
/// PreconditionError when the Gram system is singular, which happens
/// exactly when span(E_basis) meets span(e)^perp.
std::vector<Vec> normalize_biorthonormal(const SubspaceBasis& E_basis, const std::vector<Vec>& e,
                                         const Tolerances& tol = {});

/// Control matrix with Im(D) = V^perp (N x (N - dim V), orthonormal columns).
Mat synthesize_D(const SubspaceBasis& V, const Tolerances& tol = {});

struct ProjectedEigenpair {
  std::complex<double> eigenvalue;
  Eigen::VectorXcd eigenvector;  // eigenvector x of A
  Eigen::VectorXcd reduced;      // C_p x, an eigenvector of the reduced matrix
};

/// For a C_p-compatible diagonalizable A, the eigenvectors of A projected by
/// C_p. Each eigenspace is split into its part inside Ker(C_p) (dropped)
/// and a complement (kept), so exactly N - p reduced vectors come back.
/// Defective matrices throw UnsupportedError; see exact_jordan.hpp.
std::vector<ProjectedEigenpair> project_eigenvectors(const Mat& A, const GroupPartition& partition,
                                                     const Tolerances& tol = {});

struct SyncProblem {
  Mat A;
  Mat B;
  Mat D;
  GroupPartition partition = GroupPartition::single(1);

  Eigen::Index N() const { return A.rows(); }
  Eigen::Index M() const { return D.cols(); }

  /// Shapes, finiteness, full column rank of D and (unless waived) B similar
  /// to a symmetric matrix.
  void validate(const Tolerances& tol = {}, bool allow_nonsymmetrizable_B = false) const;
};

struct SyncAnalysis {
  Eigen::Index N = 0;
  int p = 0;
  Eigen::Index rank_R = 0;
  Eigen::Index dim_ker_RT = 0;
  SubspaceBasis ker_RT;
  bool cp_compatible_A = false;
  bool cp_compatible_B = false;
  std::optional<Mat> reduced_A;
  std::optional<Mat> reduced_B;
  Eigen::Index rank_CpR = 0;
  bool biorthonormal = false;
  std::vector<Vec> E_vectors;  // ker_RT rebased against e_r when biorthonormal
  bool necessary_ok = false;   // rank_R >= N - p
};

SyncAnalysis analyze(const SyncProblem& problem, const Tolerances& tol = {});

}  // namespace wavesync

#endif  // WAVESYNC_SYNCALG_HPP
