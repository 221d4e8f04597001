// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef WAVESYNC_REACHABILITY_HPP
#define WAVESYNC_REACHABILITY_HPP

#include "wavesync/linalg.hpp"

namespace wavesync {

/// Column span of the enlarged matrix built from all words A^p B^q ... D,
/// and the kernel of its transpose.
struct ReachabilityReport {
  Eigen::Index rank_R = 0;
  SubspaceBasis ker_RT;
  SubspaceBasis im_R;
  int word_depth_used = 0;
};

/// Smallest subspace containing Im(D) and invariant under A and B.
///
/// Grown as S_0 = Im(D), S_{k+1} = span(S_k, A S_k, B S_k) with
/// re-orthonormalization each step; stops once the dimension is stable,
/// which happens after at most N steps. The word matrix itself is never
/// formed.
ReachabilityReport word_span(const Mat& A, const Mat& B, const Mat& D, const Tolerances& tol = {});

/// Largest subspace of K invariant under At and Bt, by the fixed point
/// V_{k+1} = V_k ∩ At^{-1} V_k ∩ Bt^{-1} V_k started from V_0 = K.
///
/// With K = Ker(D^T) this is an independent route to Ker(R^T).
SubspaceBasis largest_invariant_in_kernel(const Mat& At, const Mat& Bt, const SubspaceBasis& K,
                                          const Tolerances& tol = {});

/// (D, AD, ..., A^{N-1} D).
Mat classical_kalman(const Mat& A, const Mat& D);

/// max over complex (alpha, beta) of dim Ker([A^T - alpha I; B^T - beta I]).
/// Only eigenvalue pairs can give a nonzero kernel, so the sweep runs over
/// eig(A^T) x eig(B^T) in complex arithmetic.
Eigen::Index mu_common_eigen(const Mat& A, const Mat& B, const Tolerances& tol = {});

}  // namespace wavesync

#endif  // WAVESYNC_REACHABILITY_HPP
