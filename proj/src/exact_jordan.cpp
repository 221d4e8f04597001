// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/exact_jordan.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace wavesync::exact {

namespace {

using boost::multiprecision::cpp_int;

constexpr int kMaxOrder = 6;

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RatMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int sel = -1;
    for (int r = row; r < m.rows(); ++r) {
      if (m(r, col) != 0) {
        sel = r;
        break;
      }
    }
    if (sel < 0) continue;
    if (sel != row) {
      for (int c = 0; c < m.cols(); ++c) std::swap(m(sel, c), m(row, c));
    }
    const Rational piv = m(row, col);
    for (int c = 0; c < m.cols(); ++c) m(row, c) /= piv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == 0) continue;
      const Rational f = m(r, col);
      for (int c = 0; c < m.cols(); ++c) m(r, c) -= f * m(row, c);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

bool is_zero(const RatVec& v) {
  for (const auto& x : v) {
    if (x != 0) return false;
  }
  return true;
}

RatMat columns_to_matrix(const std::vector<RatVec>& cols, int n) {
  RatMat m(n, static_cast<int>(cols.size()));
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < n; ++r) m(r, c) = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  }
  return m;
}

RatMat power(const RatMat& m, int k) {
  RatMat out = RatMat::identity(m.rows());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

// Coefficients c_0..c_n of det(x I - m), by Faddeev-LeVerrier.
std::vector<Rational> characteristic_polynomial(const RatMat& m) {
  const int n = m.rows();
  std::vector<Rational> c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(n)] = 1;
  RatMat mk(n, n);  // M_0 = 0
  for (int k = 1; k <= n; ++k) {
    RatMat next = m * mk;
    for (int i = 0; i < n; ++i) next(i, i) += c[static_cast<std::size_t>(n - k + 1)];
    mk = std::move(next);
    const RatMat amk = m * mk;
    Rational trace = 0;
    for (int i = 0; i < n; ++i) trace += amk(i, i);
    c[static_cast<std::size_t>(n - k)] = -trace / k;
  }
  return c;
}

Rational evaluate(const std::vector<Rational>& poly, const Rational& x) {
  Rational acc = 0;
  for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Divide by (x - root); assumes root is a root.
std::vector<Rational> deflate(const std::vector<Rational>& poly, const Rational& root) {
  const std::size_t deg = poly.size() - 1;
  std::vector<Rational> q(deg);
  Rational carry = 0;
  for (std::size_t i = deg; i-- > 0;) {
    carry = poly[i + 1] + carry * root;
    q[i] = carry;
  }
  return q;
}

std::vector<cpp_int> positive_divisors(cpp_int v) {
  if (v < 0) v = -v;
  if (v > cpp_int(100000000000000LL)) {
    throw UnsupportedError("exact eigenvalue search: characteristic polynomial coefficients too large");
  }
  std::vector<cpp_int> small;
  std::vector<cpp_int> large;
  for (cpp_int d = 1; d * d <= v; ++d) {
    if (v % d == 0) {
      small.push_back(d);
      if (d * d != v) large.push_back(v / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace

RatMat RatMat::from_integer_matrix(const Mat& m) {
  RatMat out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      const double x = m(r, c);
      if (!std::isfinite(x) || x != std::round(x) || std::abs(x) > 1e9) {
        throw UnsupportedError("exact path needs small integer entries; got " + std::to_string(x));
      }
      out(r, c) = Rational(static_cast<long long>(x));
    }
  }
  return out;
}

RatMat RatMat::identity(int n) {
  RatMat out(n, n);
  for (int i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

RatMat RatMat::operator*(const RatMat& o) const {
  RatMat out(rows_, o.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(r, k);
      if (a == 0) continue;
      for (int c = 0; c < o.cols_; ++c) out(r, c) += a * o(k, c);
    }
  }
  return out;
}

RatVec RatMat::operator*(const RatVec& v) const {
  RatVec out(static_cast<std::size_t>(rows_));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out[static_cast<std::size_t>(r)] += (*this)(r, c) * v[static_cast<std::size_t>(c)];
  }
  return out;
}

RatMat RatMat::operator-(const RatMat& o) const {
  RatMat out(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] - o.a_[i];
  return out;
}

RatMat RatMat::transpose() const {
  RatMat out(cols_, rows_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

std::vector<RatVec> RatMat::kernel() const {
  RatMat m = *this;
  const std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols_), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<RatVec> basis;
  for (int free = 0; free < cols_; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    RatVec v(static_cast<std::size_t>(cols_));
    v[static_cast<std::size_t>(free)] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      v[static_cast<std::size_t>(pivots[i])] = -m(static_cast<int>(i), free);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

int RatMat::rank() const {
  RatMat m = *this;
  return static_cast<int>(rref(m).size());
}

std::vector<RatVec> RatMat::solve(const RatVec& b) const {
  RatMat aug(rows_, cols_ + 1);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
    aug(r, cols_) = b[static_cast<std::size_t>(r)];
  }
  const std::vector<int> pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == cols_) return {};
  RatVec x(static_cast<std::size_t>(cols_));
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    x[static_cast<std::size_t>(pivots[i])] = aug(static_cast<int>(i), cols_);
  }
  return {x};
}

RatMat RatMat::inverse() const {
  if (rows_ != cols_) throw InputError("inverse of a non-square matrix");
  RatMat aug(rows_, 2 * cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) aug(r, c) = (*this)(r, c);
    aug(r, cols_ + r) = 1;
  }
  const std::vector<int> pivots = rref(aug);
  if (static_cast<int>(pivots.size()) < rows_ || (rows_ > 0 && pivots.back() >= cols_)) {
    throw NumericError("exact inverse: matrix is singular");
  }
  RatMat out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(r, c) = aug(r, cols_ + c);
  }
  return out;
}

Mat RatMat::to_double() const {
  Mat out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) out(r, c) = static_cast<double>((*this)(r, c));
  }
  return out;
}

Vec to_double(const RatVec& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = static_cast<double>(v[i]);
  return out;
}

std::vector<std::pair<Rational, int>> rational_eigenvalues(const RatMat& m) {
  std::vector<Rational> poly = characteristic_polynomial(m);
  std::vector<std::pair<Rational, int>> roots;
  auto add_root = [&](const Rational& r) {
    for (auto& [value, mult] : roots) {
      if (value == r) {
        ++mult;
        return;
      }
    }
    roots.emplace_back(r, 1);
  };
  while (poly.size() > 1 && poly.front() == 0) {
    add_root(Rational(0));
    poly.erase(poly.begin());
  }
  bool progress = true;
  while (poly.size() > 1 && progress) {
    progress = false;
    // Clear denominators, then apply the rational root theorem.
    cpp_int lcm = 1;
    for (const auto& c : poly) {
      const cpp_int d = boost::multiprecision::denominator(c);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    const cpp_int a0 = boost::multiprecision::numerator(Rational(poly.front() * lcm));
    const cpp_int an = boost::multiprecision::numerator(Rational(poly.back() * lcm));
    for (const cpp_int& num : positive_divisors(a0)) {
      for (const cpp_int& den : positive_divisors(an)) {
        for (int sign : {1, -1}) {
          const Rational cand = Rational(num * sign, den);
          if (evaluate(poly, cand) == 0) {
            add_root(cand);
            poly = deflate(poly, cand);
            progress = true;
            break;
          }
        }
        if (progress) break;
      }
      if (progress) break;
    }
  }
  if (poly.size() > 1) {
    throw UnsupportedError("exact path: part of the spectrum is irrational or complex");
  }
  return roots;
}

ExactProjection project_root_vectors_exact(const Mat& A, const GroupPartition& partition) {
  const int n = partition.N();
  if (A.rows() != n || A.cols() != n) throw InputError("project_root_vectors_exact: shape mismatch");
  if (n > kMaxOrder) {
    throw UnsupportedError("exact path supports order <= " + std::to_string(kMaxOrder));
  }
  const RatMat a = RatMat::from_integer_matrix(A);
  const RatMat c = RatMat::from_integer_matrix(build_Cp(partition));
  const RatMat e = RatMat::from_integer_matrix(indicator_matrix(partition));
  const RatMat residual = c * a * e;
  for (int r = 0; r < residual.rows(); ++r) {
    for (int s = 0; s < residual.cols(); ++s) {
      if (residual(r, s) != 0) throw PreconditionError("A is not C_p-compatible");
    }
  }

  ExactProjection out;
  const int m = c.rows();
  if (m == 0) {
    out.reduced = RatMat(0, 0);
    return out;
  }
  out.reduced = c * a * c.transpose() * (c * c.transpose()).inverse();
  const RatMat& abar = out.reduced;

  for (const auto& [lambda, multiplicity] : rational_eigenvalues(abar)) {
    RatMat shift_bar = abar;
    for (int i = 0; i < m; ++i) shift_bar(i, i) -= lambda;

    // Kernels of (Abar - lambda)^k until they reach the full multiplicity.
    std::vector<std::vector<RatVec>> kernels{{}};
    while (static_cast<int>(kernels.back().size()) < multiplicity) {
      kernels.push_back(power(shift_bar, static_cast<int>(kernels.size())).kernel());
    }
    const int top = static_cast<int>(kernels.size()) - 1;

    // Chains from the highest level down; each level adds heads that are
    // independent of the lower kernel and of the existing chains' entries.
    std::vector<std::vector<RatVec>> reduced_chains;
    for (int level = top; level >= 1; --level) {
      std::vector<RatVec> span = kernels[static_cast<std::size_t>(level - 1)];
      for (const auto& ch : reduced_chains) {
        const int head_level = static_cast<int>(ch.size());
        span.push_back(ch[static_cast<std::size_t>(head_level - level)]);
      }
      int current_rank = span.empty() ? 0 : columns_to_matrix(span, m).rank();
      for (const RatVec& b : kernels[static_cast<std::size_t>(level)]) {
        span.push_back(b);
        const int next_rank = columns_to_matrix(span, m).rank();
        if (next_rank == current_rank) {
          span.pop_back();
          continue;
        }
        current_rank = next_rank;
        std::vector<RatVec> chain{b};
        for (int l = 1; l < level; ++l) chain.push_back(shift_bar * chain.back());
        reduced_chains.push_back(std::move(chain));
      }
    }

    // Lift every reduced chain to a chain of A inside its generalized eigenspace.
    RatMat shift = a;
    for (int i = 0; i < n; ++i) shift(i, i) -= lambda;
    const std::vector<RatVec> gen_space = power(shift, n).kernel();
    const RatMat g = columns_to_matrix(gen_space, n);
    const RatMat cg = c * g;
    for (auto& ybar : reduced_chains) {
      const auto coeffs = cg.solve(ybar.front());
      if (coeffs.empty()) throw NumericError("exact path: reduced chain head has no preimage");
      RootChain rc;
      rc.eigenvalue = lambda;
      rc.chain.push_back(g * coeffs.front());
      while (true) {
        RatVec next = shift * rc.chain.back();
        if (is_zero(next)) break;
        rc.chain.push_back(std::move(next));
      }
      for (std::size_t l = 0; l < ybar.size(); ++l) {
        RatVec proj = c * rc.chain[l];
        if (proj != ybar[l]) throw NumericError("exact path: projection mismatch");
        rc.projected.push_back(std::move(proj));
      }
      out.chains.push_back(std::move(rc));
    }
  }
  return out;
}

}  // namespace wavesync::exact
