#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sgk/harmonic.hpp"
#include "sgk/qsqrt3.hpp"

namespace sgk {

inline constexpr int kMaxWordDepth = 32;

/// Exact energy-measure vector of a cell: nu_j(F_w K) for the standard
/// harmonic basis h_0, h_1, h_2. Three normalizations are in use and all
/// carried here explicitly:
///   total_std  = nu_0+nu_1+nu_2        (mass 6 on the whole gasket),
///   total_prime = total_std/3          (orthonormal-pair normalization, mass 2),
///   prob        = total_std/6          (probability normalization).
struct MeasureVector {
  Word word;
  Vec3Q nu;

  Rational total_std() const { return nu(0) + nu(1) + nu(2); }
  Rational total_prime() const { return total_std() / Rational(3); }
  Rational prob() const { return total_std() / Rational(6); }
};

/// nu_j(F_w K) = r^{-m} (B_w e_j)^T gram0 (B_w e_j), exact.
inline MeasureVector energy_cell_vector(const HarmonicStructure& hs, const Word& w) {
  if (w.size() > kMaxWordDepth)
    throw std::domain_error("energy_cell_vector: word depth cap exceeded");
  w.validate(hs.params.d);
  const Mat3Q bw = hs.restriction(w);
  const Rational scale = pow(Rational(1) / hs.r, w.size());
  MeasureVector mv;
  mv.word = w;
  for (int j = 0; j < 3; ++j) {
    Vec3Q col = bw.col(j);
    mv.nu(j) = scale * quad_form(hs.gram0, col);
    if (mv.nu(j) < Rational(0)) throw std::logic_error("energy vector: negative mass");
  }
  return mv;
}

/// Radon-Nikodym approximant at cylinder resolution:
/// R_i(w) = nu_i(F_w K) / (nu_0+nu_1+nu_2)(F_w K); entries sum to 1.
inline Vec3Q radon_nikodym_approx(const HarmonicStructure& hs, const Word& w) {
  MeasureVector mv = energy_cell_vector(hs, w);
  Vec3Q out;
  const Rational total = mv.total_std();
  for (int i = 0; i < 3; ++i) out(i) = mv.nu(i) / total;
  return out;
}

/// Harmonic energy coordinates: the fixed orthonormal pair
///   u_1 = (h_1 - h_2)/sqrt(6),   u_2 = (2h_0 - h_1 - h_2)/sqrt(18)
/// of harmonic functions modulo constants (orthonormal for gram0, orthogonal
/// to constants, first nonzero coefficient positive), and the matrices
/// A_n = (1/sqrt(r)) * (matrix of h -> h o F_n in that basis).
/// Exactly, A_n = W_n / sqrt(r) with W_n over Q[sqrt(3)].
struct EnergyCoordinates {
  int k = 0;
  Rational r;
  std::array<Vec3Q, 2> basis_raw;
  std::array<Rational, 2> basis_norm2;
  std::vector<std::array<std::array<QSqrt3, 2>, 2>> W;  // W[n][row][col]
  std::vector<Eigen::Matrix2d> A;

  Eigen::Matrix2d word_matrix(const Word& w) const {
    Eigen::Matrix2d acc = Eigen::Matrix2d::Identity();
    for (int i = 0; i < w.size(); ++i) acc = A[static_cast<std::size_t>(w[i])] * acc;
    return acc;
  }
};

inline EnergyCoordinates energy_orthobasis(const HarmonicStructure& hs) {
  EnergyCoordinates ec;
  ec.k = hs.params.k;
  ec.r = hs.r;
  ec.basis_raw[0] << Rational(0), Rational(1), Rational(-1);
  ec.basis_raw[1] << Rational(2), Rational(-1), Rational(-1);
  for (int i = 0; i < 2; ++i)
    ec.basis_norm2[static_cast<std::size_t>(i)] =
        quad_form(hs.gram0, ec.basis_raw[static_cast<std::size_t>(i)]);
  // gram0-orthogonality of the pair (Gram-Schmidt has nothing to subtract)
  // and the norms behind the fixed normalizers below: 1/sqrt(6*18) = sqrt(3)/18.
  if (dot_q(ec.basis_raw[0], hs.gram0 * ec.basis_raw[1]) != Rational(0))
    throw std::logic_error("energy basis: pair not orthogonal");
  if (ec.basis_norm2[0] != Rational(6) || ec.basis_norm2[1] != Rational(18))
    throw std::logic_error("energy basis: unexpected norms");

  const double sqrt_r = std::sqrt(ec.r.to_double());
  ec.W.resize(static_cast<std::size_t>(hs.params.d));
  ec.A.resize(static_cast<std::size_t>(hs.params.d));
  for (int n = 0; n < hs.params.d; ++n) {
    for (int row = 0; row < 2; ++row)
      for (int col = 0; col < 2; ++col) {
        const Rational c = dot_q(ec.basis_raw[static_cast<std::size_t>(row)],
                                 hs.gram0 * (hs.B[static_cast<std::size_t>(n)] *
                                             ec.basis_raw[static_cast<std::size_t>(col)]));
        // 1/sqrt(norm2_row * norm2_col) is 1/6, 1/18 or sqrt(3)/18.
        QSqrt3 entry;
        if (row == col)
          entry = QSqrt3(c / ec.basis_norm2[static_cast<std::size_t>(row)]);
        else
          entry = QSqrt3(Rational(0), c / Rational(18));
        ec.W[static_cast<std::size_t>(n)][static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = entry;
      }
    for (int row = 0; row < 2; ++row)
      for (int col = 0; col < 2; ++col)
        ec.A[static_cast<std::size_t>(n)](row, col) =
            ec.W[static_cast<std::size_t>(n)][static_cast<std::size_t>(row)][static_cast<std::size_t>(col)]
                .to_double() /
            sqrt_r;
  }

  // Partition of energy: sum_n W_n^T W_n = r * I over Q[sqrt(3)], exactly.
  std::array<std::array<QSqrt3, 2>, 2> acc{};
  for (int n = 0; n < hs.params.d; ++n)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l)
          acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
              ec.W[static_cast<std::size_t>(n)][static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] *
              ec.W[static_cast<std::size_t>(n)][static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const QSqrt3 expect = (i == j) ? QSqrt3(ec.r) : QSqrt3(Rational(0));
      if (acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != expect)
        throw std::logic_error("energy basis: partition identity violated");
    }
  return ec;
}

/// nu_prob([w]) = ||A_w||_F^2 / 2 via the 2x2 float route.
inline double kusuoka_cylinder(const EnergyCoordinates& ec, const Word& w) {
  if (w.size() > kMaxWordDepth)
    throw std::domain_error("kusuoka_cylinder: word depth cap exceeded");
  return ec.word_matrix(w).squaredNorm() / 2.0;
}

/// Max Frobenius deviation of sum_{|w|=m} A_w^T A_w from the identity.
inline double partition_identity_check(const EnergyCoordinates& ec, int m) {
  const int d = static_cast<int>(ec.A.size());
  Eigen::Matrix2d sum = Eigen::Matrix2d::Zero();
  auto recurse = [&](auto&& self, int depth, const Eigen::Matrix2d& prod) -> void {
    if (depth == m) {
      sum += prod.transpose() * prod;
      return;
    }
    for (int s = 0; s < d; ++s)
      self(self, depth + 1, Eigen::Matrix2d(ec.A[static_cast<std::size_t>(s)] * prod));
  };
  recurse(recurse, 0, Eigen::Matrix2d::Identity());
  return (sum - Eigen::Matrix2d::Identity()).norm();
}

/// One row of the cylinder decay table: the largest nu_prob over words of a
/// given length, its (first) attaining word, and the r^{-m}-scaled value.
struct DecayRow {
  int level = 0;
  Rational max_prob;
  Word argmax;
  Rational scaled;  // max_prob * r^{-level}
};

/// Exhaustive exact scan of max_{|w|=m} nu_prob(F_w K) for m = 1..m_max.
/// Subtrees are pruned with the exact bounds nu(w.n) <= nu(w) and
/// nu(w.n) <= ||A_n||_F^2 nu(w); ties keep the first (lexicographic) word,
/// so a constant word is reported whenever a constant word attains the max.
inline std::vector<DecayRow> decay_scan(const HarmonicStructure& hs, int m_max) {
  if (m_max < 1 || m_max > kMaxWordDepth)
    throw std::domain_error("decay_scan: level out of range");
  const int d = hs.params.d;

  // Per-symbol exact growth bound: nu_std((n))/3 = ||A_n||_F^2 >= sigma_max^2.
  Rational kappa(0);
  for (int n = 0; n < d; ++n) {
    Rational mass = energy_cell_vector(hs, Word{n}).total_std() / Rational(3);
    kappa = std::max(kappa, mass);
  }

  std::vector<Rational> best(static_cast<std::size_t>(m_max) + 1, Rational(0));
  std::vector<Word> arg(static_cast<std::size_t>(m_max) + 1);
  const Rational inv_r = Rational(1) / hs.r;

  Word path;
  auto recurse = [&](auto&& self, int depth, const Mat3Q& bw, const Rational& scale) -> void {
    if (depth > 0) {
      Rational raw(0);
      for (int j = 0; j < 3; ++j) {
        Vec3Q col = bw.col(j);
        raw += quad_form(hs.gram0, col);
      }
      const Rational prob = scale * raw / Rational(6);
      if (prob > best[static_cast<std::size_t>(depth)]) {
        best[static_cast<std::size_t>(depth)] = prob;
        arg[static_cast<std::size_t>(depth)] = path;
      }
      if (depth == m_max) return;
      // Prune if no descendant can beat a current per-level best.
      Rational bound = prob;
      bool useful = false;
      for (int j = depth + 1; j <= m_max; ++j) {
        bound *= kappa;
        if (bound > best[static_cast<std::size_t>(j)]) {
          useful = true;
          break;
        }
      }
      if (!useful) return;
    }
    for (int s = 0; s < d; ++s) {
      path.append(s);
      self(self, depth + 1, Mat3Q(hs.B[static_cast<std::size_t>(s)] * bw), scale * inv_r);
      path = path.prefix(depth);
    }
  };
  recurse(recurse, 0, Mat3Q::Identity(), Rational(1));

  std::vector<DecayRow> rows;
  rows.reserve(static_cast<std::size_t>(m_max));
  for (int m = 1; m <= m_max; ++m) {
    DecayRow row;
    row.level = m;
    row.max_prob = best[static_cast<std::size_t>(m)];
    row.argmax = arg[static_cast<std::size_t>(m)];
    row.scaled = row.max_prob * pow(inv_r, m);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sgk
