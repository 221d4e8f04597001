// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "wavesync/linalg.hpp"

namespace wavesync {
namespace {

using testing::random_matrix;
using testing::Rng;

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat unit_columns(int n, std::initializer_list<int> idx) {
  Mat m = Mat::Zero(n, static_cast<Eigen::Index>(idx.size()));
  int c = 0;
  for (int i : idx) m(i, c++) = 1.0;
  return m;
}

TEST(Rank, IdentityZeroAndProportionalRows) {
  EXPECT_EQ(rank_of(Mat::Identity(3, 3)), 3);
  EXPECT_EQ(rank_of(Mat::Zero(2, 2)), 0);
  Mat m(2, 2);
  m << 1, 2, 2, 4;
  EXPECT_EQ(rank_of(m), 1);
}

TEST(Rank, CutoffIsRelativeToLargestSingularValue) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 1e8;
  m(1, 1) = 1e-1;
  EXPECT_EQ(rank_of(m), 2);
  m(1, 1) = 1e-4;
  EXPECT_EQ(rank_of(m), 1);
  EXPECT_EQ(rank_of(1e-30 * Mat::Identity(3, 3)), 3);
}

TEST(Rank, NonFiniteEntriesAreRejected) {
  Mat m = Mat::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rank_of(m), InputError);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(right_kernel(m), InputError);
}

TEST(Tolerances, BoundsAreChecked) {
  EXPECT_NO_THROW(Tolerances{}.validate());
  EXPECT_THROW((Tolerances{0.0, 1e-9}.validate()), InputError);
  EXPECT_THROW((Tolerances{1e-10, 1.0}.validate()), InputError);
}

TEST(RightKernel, HandExamples) {
  Mat c(1, 2);
  c << 1, -1;
  const SubspaceBasis k = right_kernel(c);
  ASSERT_EQ(k.dim(), 1);
  EXPECT_NEAR(k.matrix()(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(k.matrix()(1, 0), 1.0 / std::sqrt(2.0), 1e-15);

  EXPECT_TRUE(right_kernel(Mat::Identity(2, 2)).empty());
  EXPECT_EQ(right_kernel(Mat::Zero(1, 3)).dim(), 3);
}

TEST(RightKernel, RankNullityOnRandomLowRankMatrices) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = testing::uniform_int(rng, 1, 7);
    const int cols = testing::uniform_int(rng, 1, 7);
    const int r = testing::uniform_int(rng, 0, std::min(rows, cols));
    const Mat m = random_matrix(rng, rows, r) * random_matrix(rng, r, cols);
    const SubspaceBasis k = right_kernel(m);
    ASSERT_EQ(rank_of(m) + k.dim(), cols);
    ASSERT_EQ(rank_of(m), r);
    if (!k.empty()) {
      ASSERT_LE((m * k.matrix()).norm(), 1e-9 * std::max(1.0, norm2(m)));
    }
  }
}

TEST(RightKernel, SignConventionFirstNonzeroPositive) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SubspaceBasis k = right_kernel(random_matrix(rng, 2, 5));
    for (Eigen::Index c = 0; c < k.dim(); ++c) {
      for (Eigen::Index i = 0; i < k.ambient_dim(); ++i) {
        const double x = k.matrix()(i, c);
        if (std::abs(x) > 1e-12) {
          EXPECT_GT(x, 0.0);
          break;
        }
      }
    }
  }
}

TEST(SubspaceBasis, RejectsNonOrthonormalColumns) {
  Mat bad(2, 1);
  bad << 1, 1;
  EXPECT_THROW(SubspaceBasis(2, bad), InputError);
  EXPECT_THROW(SubspaceBasis(3, Mat::Identity(2, 2)), InputError);
  EXPECT_NO_THROW(SubspaceBasis(2, Mat::Identity(2, 2)));
  EXPECT_TRUE(SubspaceBasis::zero(4).empty());
  EXPECT_EQ(SubspaceBasis::full(4).dim(), 4);
}

TEST(SubspaceBasis, SpanOfDropsDependentColumns) {
  Mat m(3, 3);
  m << 1, 2, 0, 1, 2, 0, 0, 0, 0;
  const SubspaceBasis s = SubspaceBasis::span_of(m);
  EXPECT_EQ(s.dim(), 1);
  EXPECT_NEAR(s.residual(m.col(1)), 0.0, 1e-14);
}

TEST(OrthComplement, HandExamples) {
  const SubspaceBasis b(2, vec2(1, 1) / std::sqrt(2.0));
  const SubspaceBasis c = orth_complement(b);
  ASSERT_EQ(c.dim(), 1);
  EXPECT_NEAR(std::abs(c.matrix()(0, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c.matrix()(0, 0), -c.matrix()(1, 0), 1e-15);
  EXPECT_EQ(orth_complement(SubspaceBasis::zero(3)).dim(), 3);
  EXPECT_TRUE(orth_complement(SubspaceBasis::full(2)).empty());
}

TEST(OrthComplement, DimensionsAddUpAndVectorsAreOrthogonal) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 1, 7);
    const int d = testing::uniform_int(rng, 0, n);
    const SubspaceBasis b = SubspaceBasis::span_of(random_matrix(rng, n, d));
    const SubspaceBasis c = orth_complement(b);
    ASSERT_EQ(b.dim() + c.dim(), n);
    if (!b.empty() && !c.empty()) {
      ASSERT_LE((b.matrix().transpose() * c.matrix()).norm(), 1e-9);
    }
  }
}

TEST(Intersect, HandExamples) {
  const SubspaceBasis a(3, unit_columns(3, {0, 1}));
  const SubspaceBasis b(3, unit_columns(3, {1, 2}));
  const SubspaceBasis i = intersect(a, b);
  ASSERT_EQ(i.dim(), 1);
  EXPECT_NEAR(std::abs(i.matrix()(1, 0)), 1.0, 1e-14);
  EXPECT_EQ(intersect(a, a).dim(), 2);
  EXPECT_TRUE(intersect(a, SubspaceBasis::zero(3)).empty());
  EXPECT_THROW(intersect(a, SubspaceBasis::zero(2)), InputError);
}

TEST(Intersect, ResultLiesInBothOperands) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 2, 7);
    // Plant a common part of dimension c.
    const int c = testing::uniform_int(rng, 0, n / 2);
    const Mat common = random_matrix(rng, n, c);
    const int ea = testing::uniform_int(rng, 0, (n - c) / 2);
    const int eb = testing::uniform_int(rng, 0, (n - c) / 2);
    Mat ma(n, c + ea);
    ma << common, random_matrix(rng, n, ea);
    Mat mb(n, c + eb);
    mb << common, random_matrix(rng, n, eb);
    const SubspaceBasis a = SubspaceBasis::span_of(ma);
    const SubspaceBasis b = SubspaceBasis::span_of(mb);
    const SubspaceBasis i = intersect(a, b);
    // ea + eb <= n - c keeps the extras independent, so the common part is all.
    ASSERT_EQ(i.dim(), c);
    for (const Vec& v : i.vectors()) {
      ASSERT_LE(a.residual(v), 1e-9);
      ASSERT_LE(b.residual(v), 1e-9);
    }
  }
}

TEST(Preimage, MapsIntoTarget) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::uniform_int(rng, 1, 6);
    const Mat m = random_matrix(rng, n, n);
    const SubspaceBasis v = SubspaceBasis::span_of(random_matrix(rng, n, testing::uniform_int(rng, 0, n)));
    const SubspaceBasis pre = preimage(m, v);
    for (const Vec& x : pre.vectors()) ASSERT_LE(v.residual(m * x), 1e-9 * std::max(1.0, norm2(m)));
    // A random invertible m: the preimage has the same dimension as v.
    ASSERT_EQ(pre.dim(), v.dim());
  }
}

TEST(PrincipalAngle, EqualAndDifferentSubspaces) {
  const SubspaceBasis a(2, vec2(1, 0));
  const SubspaceBasis b(2, vec2(0, 1));
  EXPECT_NEAR(max_principal_angle(a, a), 0.0, 1e-15);
  EXPECT_NEAR(max_principal_angle(a, b), 1.0, 1e-15);
  EXPECT_EQ(max_principal_angle(a, SubspaceBasis::full(2)), 1.0);
  EXPECT_EQ(max_principal_angle(SubspaceBasis::zero(2), SubspaceBasis::zero(2)), 0.0);
}

TEST(SimilarToSymmetric, HandExamples) {
  Mat s(2, 2);
  s << 2, -1, -1, 2;
  EXPECT_TRUE(is_similar_to_symmetric(s));
  Mat jordan(2, 2);
  jordan << 0, 1, 0, 0;
  EXPECT_FALSE(is_similar_to_symmetric(jordan));
  EXPECT_TRUE(is_similar_to_symmetric(Vec(vec2(1, 2)).asDiagonal().toDenseMatrix()));
  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  EXPECT_FALSE(is_similar_to_symmetric(rot));
  EXPECT_THROW(is_similar_to_symmetric(Mat::Zero(2, 3)), InputError);
}

TEST(SimilarToSymmetric, ConjugatedSymmetricMatrices) {
  Rng rng(15);
  int checked = 0;
  while (checked < 200) {
    const int n = testing::uniform_int(rng, 1, 6);
    Mat s = random_matrix(rng, n, n);
    s = (s + s.transpose()).eval();
    const Mat p = Mat::Identity(n, n) + 0.5 * random_matrix(rng, n, n);
    const std::vector<double> sv = singular_values(p);
    if (sv.back() <= 0.0 || sv.front() / sv.back() > 1e3) continue;
    ASSERT_TRUE(is_similar_to_symmetric(p * s * p.inverse()));
    ++checked;
  }
}

TEST(SimilarToSymmetric, RepeatedEigenvalueDiagonalizableVersusDefective) {
  EXPECT_TRUE(is_similar_to_symmetric(3.0 * Mat::Identity(3, 3)));
  Mat m = 3.0 * Mat::Identity(3, 3);
  m(0, 2) = 1.0;
  EXPECT_FALSE(is_similar_to_symmetric(m));
}

}  // namespace
}  // namespace wavesync
