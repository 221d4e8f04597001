// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "wavesync/exact_jordan.hpp"

namespace wavesync::exact {
namespace {

Mat rows(std::initializer_list<std::initializer_list<double>> r) {
  Mat m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index k = 0;
    for (double x : row) m(i, k++) = x;
    ++i;
  }
  return m;
}

RatVec shifted(const RatMat& m, const RatVec& x, const Rational& lambda) {
  RatVec y = m * x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= lambda * x[i];
  return y;
}

bool is_zero(const RatVec& v) {
  for (const Rational& x : v) {
    if (x != 0) return false;
  }
  return true;
}

// Every chain satisfies A x_l = lambda x_l + x_{l+1} exactly, its C_p image
// is a chain of the reduced matrix, and the reduced heads and tails together
// form a basis of the reduced space.
void check_projection(const Mat& A, const GroupPartition& part) {
  const ExactProjection proj = project_root_vectors_exact(A, part);
  const RatMat a = RatMat::from_integer_matrix(A);
  const RatMat c = RatMat::from_integer_matrix(build_Cp(part));
  int total = 0;
  for (const RootChain& rc : proj.chains) {
    ASSERT_FALSE(rc.chain.empty());
    for (std::size_t l = 0; l < rc.chain.size(); ++l) {
      const RatVec lhs = shifted(a, rc.chain[l], rc.eigenvalue);
      if (l + 1 < rc.chain.size()) {
        EXPECT_EQ(lhs, rc.chain[l + 1]);
      } else {
        EXPECT_TRUE(is_zero(lhs));
      }
    }
    for (std::size_t l = 0; l < rc.projected.size(); ++l) {
      EXPECT_EQ(rc.projected[l], c * rc.chain[l]);
      const RatVec lhs = shifted(proj.reduced, rc.projected[l], rc.eigenvalue);
      if (l + 1 < rc.projected.size()) {
        EXPECT_EQ(lhs, rc.projected[l + 1]);
      } else {
        EXPECT_TRUE(is_zero(lhs));
      }
    }
    total += static_cast<int>(rc.projected.size());
  }
  EXPECT_EQ(total, part.N() - part.p());
  // The exact reduced matrix matches the floating-point one.
  EXPECT_TRUE(proj.reduced.to_double().isApprox(reduced_matrix(A, part), 1e-12));
}

TEST(ExactJordan, SingleGroupWithReducedJordanBlock) {
  const Mat A = rows({{2, 1, 0}, {0, 2, 1}, {0, 0, 3}});
  const GroupPartition part = GroupPartition::single(3);
  const ExactProjection proj = project_root_vectors_exact(A, part);
  ASSERT_EQ(proj.chains.size(), 1u);
  EXPECT_EQ(proj.chains[0].eigenvalue, 2);
  EXPECT_EQ(proj.chains[0].projected.size(), 2u);
  check_projection(A, part);
}

TEST(ExactJordan, TwoGroupsChainCrossesIntoKernel) {
  // Eigenvalue 2 with Jordan blocks of sizes 3 and 1; the long chain of A
  // ends inside Ker(C_p).
  const Mat A = rows({{3, -1, 1, -1}, {1, 1, -1, 1}, {0, 0, 2, 0}, {0, 0, 0, 2}});
  check_projection(A, GroupPartition({0, 2, 4}));
}

TEST(ExactJordan, DiagonalizableInputAgreesWithFloatingPoint) {
  const Mat A = rows({{2, -1}, {-1, 2}});
  const GroupPartition part = GroupPartition::single(2);
  const ExactProjection proj = project_root_vectors_exact(A, part);
  ASSERT_EQ(proj.chains.size(), 1u);
  EXPECT_EQ(proj.chains[0].eigenvalue, 3);
  check_projection(A, part);
}

TEST(ExactJordan, EveryStateItsOwnGroup) {
  const ExactProjection proj = project_root_vectors_exact(rows({{1, 2}, {3, 4}}), GroupPartition({0, 1, 2}));
  EXPECT_EQ(proj.reduced.rows(), 0);
  EXPECT_TRUE(proj.chains.empty());
}

TEST(ExactJordan, Guards) {
  EXPECT_THROW(project_root_vectors_exact(rows({{1, 0}, {1, 1}}), GroupPartition::single(2)), PreconditionError);
  EXPECT_THROW(project_root_vectors_exact(rows({{0.5, 0.5}, {0.5, 0.5}}), GroupPartition::single(2)),
               UnsupportedError);
  EXPECT_THROW(project_root_vectors_exact(Mat::Identity(7, 7), GroupPartition::single(7)), UnsupportedError);
  // Cyclic permutation: reduced spectrum is the complex cube roots of unity.
  EXPECT_THROW(project_root_vectors_exact(rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}), GroupPartition::single(3)),
               UnsupportedError);
  EXPECT_THROW(project_root_vectors_exact(Mat::Identity(3, 3), GroupPartition::single(2)), InputError);
}

TEST(RationalEigenvalues, Multiplicities) {
  const auto jordan = rational_eigenvalues(RatMat::from_integer_matrix(rows({{2, 1}, {0, 2}})));
  ASSERT_EQ(jordan.size(), 1u);
  EXPECT_EQ(jordan[0].first, 2);
  EXPECT_EQ(jordan[0].second, 2);

  const auto swap = rational_eigenvalues(RatMat::from_integer_matrix(rows({{0, 1}, {1, 0}})));
  ASSERT_EQ(swap.size(), 2u);
  EXPECT_EQ(swap[0].first + swap[1].first, 0);

  // Half-integer eigenvalues come through the rational root theorem.
  RatMat half(1, 1);
  half(0, 0) = Rational(3, 2);
  const auto h = rational_eigenvalues(half);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].first, Rational(3, 2));

  EXPECT_THROW(rational_eigenvalues(RatMat::from_integer_matrix(rows({{0, -1}, {1, 0}}))), UnsupportedError);
  EXPECT_THROW(rational_eigenvalues(RatMat::from_integer_matrix(rows({{0, 2}, {1, 0}}))), UnsupportedError);
}

TEST(RatMat, KernelRankInverse) {
  const RatMat m = RatMat::from_integer_matrix(rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}}));
  EXPECT_EQ(m.rank(), 2);
  const auto k = m.kernel();
  ASSERT_EQ(k.size(), 1u);
  EXPECT_TRUE(is_zero(m * k[0]));

  const RatMat inv_in = RatMat::from_integer_matrix(rows({{2, 1}, {1, 1}}));
  const RatMat prod = inv_in * inv_in.inverse();
  EXPECT_EQ(prod(0, 0), 1);
  EXPECT_EQ(prod(0, 1), 0);
  EXPECT_EQ(prod(1, 0), 0);
  EXPECT_EQ(prod(1, 1), 1);

  EXPECT_TRUE(m.solve({Rational(1), Rational(0), Rational(0)}).empty());
  EXPECT_FALSE(m.solve({Rational(1), Rational(2), Rational(1)}).empty());
}

}  // namespace
}  // namespace wavesync::exact
