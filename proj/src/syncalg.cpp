// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/syncalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wavesync {

GroupPartition::GroupPartition(std::vector<int> cut_points) : cuts_(std::move(cut_points)) {
  if (cuts_.size() < 2) throw InputError("partition needs at least two cut points (p >= 1)");
  if (cuts_.front() != 0) throw InputError("partition must start at 0");
  for (std::size_t i = 1; i < cuts_.size(); ++i) {
    if (cuts_[i] <= cuts_[i - 1]) {
      throw InputError("partition cut points must be strictly increasing (at index " +
                       std::to_string(i) + ")");
    }
  }
}

Mat build_Cp(const GroupPartition& partition) {
  const int n = partition.N();
  Mat c = Mat::Zero(n - partition.p(), n);
  int row = 0;
  for (int r = 0; r < partition.p(); ++r) {
    const auto [begin, end] = partition.group(r);
    for (int j = begin; j + 1 < end; ++j, ++row) {
      c(row, j) = 1.0;
      c(row, j + 1) = -1.0;
    }
  }
  return c;
}

Mat indicator_matrix(const GroupPartition& partition) {
  Mat e = Mat::Zero(partition.N(), partition.p());
  for (int r = 0; r < partition.p(); ++r) {
    const auto [begin, end] = partition.group(r);
    e.col(r).segment(begin, end - begin).setOnes();
  }
  return e;
}

KerCp ker_Cp_vectors(const GroupPartition& partition) {
  const Mat e = indicator_matrix(partition);
  KerCp out{{}, SubspaceBasis::zero(partition.N())};
  Mat q(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.cols(); ++r) {
    out.indicators.emplace_back(e.col(r));
    q.col(r) = e.col(r).normalized();
  }
  out.orthonormal = SubspaceBasis(partition.N(), std::move(q));
  return out;
}

bool is_cp_compatible(const Mat& M, const GroupPartition& partition, const Tolerances& tol) {
  require_finite(M, "matrix");
  if (M.rows() != partition.N() || M.cols() != partition.N()) {
    throw InputError("compatibility test: matrix order " + std::to_string(M.rows()) +
                     " does not match partition N = " + std::to_string(partition.N()));
  }
  const Mat c = build_Cp(partition);
  if (c.rows() == 0) return true;
  const Mat e = indicator_matrix(partition);
  const Mat residual = c * M * e;
  const double bound = tol.residual_abs * norm2(M);
  for (Eigen::Index r = 0; r < e.cols(); ++r) {
    if (residual.col(r).norm() / e.col(r).norm() > bound) return false;
  }
  return true;
}

Mat reduced_matrix(const Mat& M, const GroupPartition& partition, const Tolerances& tol) {
  if (!is_cp_compatible(M, partition, tol)) {
    throw PreconditionError("matrix is not C_p-compatible; the reduced matrix is not defined");
  }
  const Mat c = build_Cp(partition);
  if (c.rows() == 0) return Mat(0, 0);
  const Mat gram = c * c.transpose();
  // (C M C^T) G^{-1} = ((G^{-1})^T (C M C^T)^T)^T and G is symmetric.
  return gram.llt().solve((c * M * c.transpose()).transpose()).transpose();
}

bool check_biorthonormal(const std::vector<Vec>& E, const std::vector<Vec>& e, const Tolerances& tol) {
  if (E.size() != e.size()) {
    throw InputError("bi-orthonormality needs equal counts, got " + std::to_string(E.size()) + " and " +
                     std::to_string(e.size()));
  }
  for (std::size_t r = 0; r < E.size(); ++r) {
    for (std::size_t s = 0; s < e.size(); ++s) {
      if (E[r].size() != e[s].size()) throw InputError("bi-orthonormality: ambient dimension mismatch");
      const double want = (r == s) ? 1.0 : 0.0;
      if (std::abs(E[r].dot(e[s]) - want) > tol.residual_abs) return false;
    }
  }
  return true;
}

std::vector<Vec> normalize_biorthonormal(const SubspaceBasis& E_basis, const std::vector<Vec>& e,
                                         const Tolerances& tol) {
  const auto p = static_cast<Eigen::Index>(e.size());
  if (E_basis.dim() != p) {
    throw InputError("normalize_biorthonormal: subspace dimension " + std::to_string(E_basis.dim()) +
                     " differs from " + std::to_string(p) + " target vectors");
  }
  std::vector<Vec> out;
  if (p == 0) return out;
  Mat e_mat(E_basis.ambient_dim(), p);
  for (Eigen::Index s = 0; s < p; ++s) {
    if (e[s].size() != E_basis.ambient_dim()) throw InputError("normalize_biorthonormal: dimension mismatch");
    e_mat.col(s) = e[s];
  }
  const Mat& q = E_basis.matrix();
  const Mat gram = q.transpose() * e_mat;  // (q_i, e_s)
  Eigen::JacobiSVD<Mat> svd(gram);
  const double smin = svd.singularValues()(p - 1);
  if (smin <= tol.residual_abs * std::max(1.0, e_mat.norm())) {
    throw PreconditionError("not bi-orthonormalizable: the subspace meets the orthogonal complement of span{e_r}");
  }
  // E = Q X with X^T gram = I.
  const Mat x = gram.transpose().fullPivLu().solve(Mat::Identity(p, p));
  const Mat e_new = q * x;
  for (Eigen::Index r = 0; r < p; ++r) out.emplace_back(e_new.col(r));
  return out;
}

Mat synthesize_D(const SubspaceBasis& V, const Tolerances& tol) {
  if (V.dim() == V.ambient_dim()) {
    throw PreconditionError("V is the whole space; its orthogonal complement leaves no control directions");
  }
  return orth_complement(V, tol).matrix();
}

std::vector<ProjectedEigenpair> project_eigenvectors(const Mat& A, const GroupPartition& partition,
                                                     const Tolerances& tol) {
  if (!is_cp_compatible(A, partition, tol)) {
    throw PreconditionError("project_eigenvectors: A is not C_p-compatible");
  }
  using CMat = Eigen::MatrixXcd;
  using Cplx = std::complex<double>;
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Mat> es(A, false);
  if (es.info() != Eigen::Success) throw NumericError("eigen-solver failed to converge");
  const double scale = std::max(norm2(A), 1e-300);
  const double gap = tol.residual_abs * scale;

  // Cluster eigenvalues (with multiplicity) in the complex plane.
  std::vector<std::pair<Cplx, int>> clusters;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cplx z = es.eigenvalues()(i);
    auto it = std::find_if(clusters.begin(), clusters.end(),
                           [&](const auto& c) { return std::abs(c.first - z) <= std::max(gap, 1e-300); });
    if (it == clusters.end()) {
      clusters.emplace_back(z, 1);
    } else {
      it->first = (it->first * static_cast<double>(it->second) + z) / static_cast<double>(it->second + 1);
      ++it->second;
    }
  }
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) {
    return a.first.real() != b.first.real() ? a.first.real() < b.first.real() : a.first.imag() < b.first.imag();
  });

  const CMat c = build_Cp(partition).cast<Cplx>();
  const CMat ac = A.cast<Cplx>();
  std::vector<ProjectedEigenpair> out;
  for (const auto& [lambda, multiplicity] : clusters) {
    const CMat shifted = ac - lambda * CMat::Identity(n, n);
    Eigen::JacobiSVD<CMat> svd(shifted, Eigen::ComputeFullV);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (svd.singularValues()(i) > gap) ++rank;
    }
    if (n - rank != multiplicity) {
      throw UnsupportedError("project_eigenvectors: A is defective in floating point; use the exact path");
    }
    const CMat eigvecs = svd.matrixV().rightCols(n - rank);
    if (c.rows() == 0) continue;
    const CMat projected = c * eigvecs;
    Eigen::JacobiSVD<CMat> psvd(projected, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double pmax = psvd.singularValues().size() ? psvd.singularValues()(0) : 0.0;
    for (Eigen::Index k = 0; k < psvd.singularValues().size(); ++k) {
      const double sigma = psvd.singularValues()(k);
      if (sigma <= std::max(tol.rank_rel * pmax, tol.residual_abs)) continue;
      // eigvecs * v_k / sigma_k maps onto the unit vector u_k.
      Eigen::VectorXcd x = eigvecs * psvd.matrixV().col(k) / sigma;
      out.push_back({lambda, x, c * x});
    }
  }
  return out;
}

void SyncProblem::validate(const Tolerances& tol, bool allow_nonsymmetrizable_B) const {
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(D, "D");
  const Eigen::Index n = A.rows();
  if (n < 1 || A.cols() != n) throw InputError("A must be square with N >= 1");
  if (B.rows() != n || B.cols() != n) throw InputError("B must be square of order N = " + std::to_string(n));
  if (D.rows() != n) throw InputError("D must have N = " + std::to_string(n) + " rows");
  if (D.cols() < 1 || D.cols() > n) throw InputError("D must have 1 <= M <= N columns");
  if (partition.N() != n) {
    throw InputError("partition covers " + std::to_string(partition.N()) + " components but N = " +
                     std::to_string(n));
  }
  if (rank_of(D, tol) != D.cols()) throw InputError("D is not of full column rank");
  if (!allow_nonsymmetrizable_B && !is_similar_to_symmetric(B, tol)) {
    throw InputError("B is not similar to a symmetric matrix");
  }
}

SyncAnalysis analyze(const SyncProblem& problem, const Tolerances& tol) {
  const GroupPartition& part = problem.partition;
  SyncAnalysis out;
  out.N = problem.N();
  out.p = part.p();

  ReachabilityReport rep = word_span(problem.A, problem.B, problem.D, tol);
  out.rank_R = rep.rank_R;
  out.dim_ker_RT = rep.ker_RT.dim();
  out.ker_RT = rep.ker_RT;

  out.cp_compatible_A = is_cp_compatible(problem.A, part, tol);
  out.cp_compatible_B = is_cp_compatible(problem.B, part, tol);
  if (out.cp_compatible_A) out.reduced_A = reduced_matrix(problem.A, part, tol);
  if (out.cp_compatible_B) out.reduced_B = reduced_matrix(problem.B, part, tol);

  const Mat c = build_Cp(part);
  if (out.reduced_A && out.reduced_B) {
    // Words in the reduced matrices applied to C_p D are C_p times the
    // original words, so this is rank(C_p R).
    out.rank_CpR = word_span(*out.reduced_A, *out.reduced_B, c * problem.D, tol).rank_R;
  } else {
    out.rank_CpR = c.rows() == 0 ? 0 : rank_of(c * rep.im_R.matrix(), tol);
  }

  if (out.dim_ker_RT == part.p()) {
    const KerCp ker = ker_Cp_vectors(part);
    try {
      out.E_vectors = normalize_biorthonormal(rep.ker_RT, ker.indicators, tol);
      out.biorthonormal = check_biorthonormal(out.E_vectors, ker.indicators, tol);
    } catch (const PreconditionError&) {
      out.biorthonormal = false;
      out.E_vectors.clear();
    }
  }
  out.necessary_ok = out.rank_R >= out.N - part.p();
  return out;
}

}  // namespace wavesync
