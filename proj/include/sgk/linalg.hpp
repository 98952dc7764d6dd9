#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

#include "sgk/rational.hpp"

namespace sgk {

using Vec3Q = Eigen::Matrix<Rational, 3, 1>;
using Mat3Q = Eigen::Matrix<Rational, 3, 3>;
using Vec2Q = Eigen::Matrix<Rational, 2, 1>;
using Mat2Q = Eigen::Matrix<Rational, 2, 2>;
using VecXQ = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using MatXQ = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

/// Exact in-place Gaussian elimination with first-nonzero pivoting.
/// Throws std::domain_error on a singular system.
template <typename Derived, typename RhsDerived>
VecXQ solve_exact(const Eigen::MatrixBase<Derived>& a_in,
                  const Eigen::MatrixBase<RhsDerived>& b_in) {
  MatXQ a = a_in;
  VecXQ b = b_in;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.size() != n)
    throw std::invalid_argument("solve_exact: shape mismatch");

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    while (piv < n && a(piv, col).is_zero()) ++piv;
    if (piv == n) throw std::domain_error("solve_exact: singular system");
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      std::swap(b(piv), b(col));
    }
    const Rational inv = Rational(1) / a(col, col);
    for (Eigen::Index row = col + 1; row < n; ++row) {
      if (a(row, col).is_zero()) continue;
      const Rational f = a(row, col) * inv;
      for (Eigen::Index j = col; j < n; ++j) a(row, j) -= f * a(col, j);
      b(row) -= f * b(col);
    }
  }
  VecXQ x(n);
  for (Eigen::Index row = n - 1; row >= 0; --row) {
    Rational s = b(row);
    for (Eigen::Index j = row + 1; j < n; ++j) s -= a(row, j) * x(j);
    x(row) = s / a(row, row);
  }
  return x;
}

/// Rank of a rational matrix by exact elimination.
template <typename Derived>
Eigen::Index rank_exact(const Eigen::MatrixBase<Derived>& a_in) {
  MatXQ a = a_in;
  const Eigen::Index rows = a.rows(), cols = a.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < cols && rank < rows; ++col) {
    Eigen::Index piv = rank;
    while (piv < rows && a(piv, col).is_zero()) ++piv;
    if (piv == rows) continue;
    if (piv != rank) a.row(piv).swap(a.row(rank));
    const Rational inv = Rational(1) / a(rank, col);
    for (Eigen::Index row = rank + 1; row < rows; ++row) {
      if (a(row, col).is_zero()) continue;
      const Rational f = a(row, col) * inv;
      for (Eigen::Index j = col; j < cols; ++j) a(row, j) -= f * a(rank, j);
    }
    ++rank;
  }
  return rank;
}

/// Coefficients (c0, c1, c2, c3) of det(x*I - M) = c3 x^3 + c2 x^2 + c1 x + c0.
inline std::array<Rational, 4> char_poly_3x3(const Mat3Q& m) {
  const Rational tr = m(0, 0) + m(1, 1) + m(2, 2);
  const Rational det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                       m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                       m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  // Sum of principal 2x2 minors.
  const Rational m2 = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) +
                      (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) +
                      (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  return {-det, m2, -tr, Rational(1)};
}

template <int R, int C>
Eigen::Matrix<double, R, C> to_double(const Eigen::Matrix<Rational, R, C>& m) {
  Eigen::Matrix<double, R, C> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_double();
  return out;
}

inline Rational dot_q(const Vec3Q& a, const Vec3Q& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

/// Quadratic form value v^T G v.
inline Rational quad_form(const Mat3Q& g, const Vec3Q& v) {
  return dot_q(v, g * v);
}

}  // namespace sgk
