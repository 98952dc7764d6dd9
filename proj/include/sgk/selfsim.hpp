#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgk/laplacian.hpp"
#include "sgk/measures.hpp"

namespace sgk {

/// The transport family for energy-measure vectors: rational 3x3 matrices
/// M_n with (nu_0, nu_1, nu_2)^T(F_n C) = M_n (nu_0, nu_1, nu_2)^T(C) for
/// every cell C, together with the column sums S_i^n.
struct MMatrixFamily {
  int k = 0;
  Rational r;
  std::vector<Mat3Q> M;   // M[n](j, i) = mu_{ji}^n
  std::vector<Vec3Q> S;   // S[n](i) = sum_j mu_{ji}^n
};

/// Builds the family from the extension tensor: with p_i = p_{ni}^j,
///   mu_{j0}^n = (p_0^2 - p_0 p_1 - p_0 p_2 + p_1 p_2)/r,
///   mu_{j1}^n = (p_1^2 - p_0 p_1 + p_0 p_2 - p_1 p_2)/r,
///   mu_{j2}^n = (p_2^2 + p_0 p_1 - p_0 p_2 - p_1 p_2)/r.
inline MMatrixFamily m_matrices(const HarmonicStructure& hs) {
  MMatrixFamily mm;
  mm.k = hs.params.k;
  mm.r = hs.r;
  mm.M.resize(static_cast<std::size_t>(hs.params.d));
  mm.S.resize(static_cast<std::size_t>(hs.params.d));
  for (int n = 0; n < hs.params.d; ++n) {
    Mat3Q& m = mm.M[static_cast<std::size_t>(n)];
    for (int j = 0; j < 3; ++j) {
      const Rational p0 = hs.p(n, 0, j), p1 = hs.p(n, 1, j), p2 = hs.p(n, 2, j);
      m(j, 0) = (p0 * p0 - p0 * p1 - p0 * p2 + p1 * p2) / hs.r;
      m(j, 1) = (p1 * p1 - p0 * p1 + p0 * p2 - p1 * p2) / hs.r;
      m(j, 2) = (p2 * p2 + p0 * p1 - p0 * p2 - p1 * p2) / hs.r;
    }
    for (int i = 0; i < 3; ++i) mm.S[static_cast<std::size_t>(n)](i) = m(0, i) + m(1, i) + m(2, i);
  }
  return mm;
}

/// Outcome of an exhaustive exact identity check; `witness` is the first
/// violating word if any.
struct IdentityReport {
  bool ok = true;
  Word witness;
  int witness_cell = -1;
  std::string detail;
};

/// Checks energy_cell_vector(i.w) == M_i * energy_cell_vector(w), exactly,
/// for every cell i and every word with |w| <= depth.
inline IdentityReport verify_vector_identity(const HarmonicStructure& hs,
                                             const MMatrixFamily& mm, int depth) {
  const int d = hs.params.d;
  Word path;
  IdentityReport report;
  auto recurse = [&](auto&& self, int len) -> bool {
    const MeasureVector parent = energy_cell_vector(hs, path);
    for (int i = 0; i < d; ++i) {
      const Vec3Q transported = mm.M[static_cast<std::size_t>(i)] * parent.nu;
      const MeasureVector child = energy_cell_vector(hs, prepend(i, path));
      if (child.nu != transported) {
        report.ok = false;
        report.witness = path;
        report.witness_cell = i;
        report.detail = "vector identity fails at cell " + std::to_string(i) +
                        " over word '" + path.str() + "'";
        return false;
      }
    }
    if (len == depth) return true;
    for (int s = 0; s < d; ++s) {
      path.append(s);
      if (!self(self, len + 1)) return false;
      path = path.prefix(len);
    }
    return true;
  };
  recurse(recurse, 0);
  return report;
}

/// Variable weights Q_j = sum_i S_i^j R_i for a Radon-Nikodym approximant;
/// rejects inputs that do not sum to 1.
inline VecXQ weights_q(const MMatrixFamily& mm, const Vec3Q& rn) {
  if (rn(0) + rn(1) + rn(2) != Rational(1))
    throw std::domain_error("weights_q: Radon-Nikodym vector must sum to 1");
  VecXQ q(static_cast<Eigen::Index>(mm.M.size()));
  for (std::size_t n = 0; n < mm.M.size(); ++n)
    q(static_cast<Eigen::Index>(n)) = dot_q(mm.S[n], rn);
  return q;
}

/// Checks the variable-weight identity nu_std(F_n F_u K) = Q_n(u) nu_std(F_u K)
/// with Q_n(u) built from the cylinder Radon-Nikodym approximant at u,
/// exactly, for all cells n and |u| <= depth.
inline IdentityReport weighted_identity_check(const HarmonicStructure& hs,
                                              const MMatrixFamily& mm, int depth) {
  const int d = hs.params.d;
  Word path;
  IdentityReport report;
  auto recurse = [&](auto&& self, int len) -> bool {
    const MeasureVector parent = energy_cell_vector(hs, path);
    const Rational total = parent.total_std();
    Vec3Q rn;
    for (int i = 0; i < 3; ++i) rn(i) = parent.nu(i) / total;
    const VecXQ q = weights_q(mm, rn);
    for (int n = 0; n < d; ++n) {
      const Rational child_total = energy_cell_vector(hs, prepend(n, path)).total_std();
      if (child_total != q(n) * total) {
        report.ok = false;
        report.witness = path;
        report.witness_cell = n;
        report.detail = "weighted identity fails at cell " + std::to_string(n) +
                        " over word '" + path.str() + "'";
        return false;
      }
    }
    if (len == depth) return true;
    for (int s = 0; s < d; ++s) {
      path.append(s);
      if (!self(self, len + 1)) return false;
      path = path.prefix(len);
    }
    return true;
  };
  recurse(recurse, 0);
  return report;
}

/// Cylinder-resolution value of the iterated weight Q_w at the cell u,
/// through the composition rule
///   Q_w = Q_{w_m} (Q_{w_{m-1}} o F_{w_m}) ... (Q_{w_1} o F_{w_2} ... F_{w_m});
/// telescopes to nu_std(F_w F_u K) / nu_std(F_u K).
inline Rational q_word_product(const HarmonicStructure& hs, const MMatrixFamily& mm,
                               const Word& w, const Word& u) {
  if (w.empty()) throw std::domain_error("q_word_product: |w| must be >= 1");
  Rational product(1);
  Word suffix = u;
  for (int t = w.size() - 1; t >= 0; --t) {
    const Vec3Q rn = radon_nikodym_approx(hs, suffix);
    product *= dot_q(mm.S[static_cast<std::size_t>(w[t])], rn);
    suffix = prepend(w[t], suffix);
  }
  return product;
}

/// Convergence report for the pointwise scaling law of the energy Laplacian
/// under a cell map: with u = h_1^2 + h_2^2 (so Delta_nu u = 2),
///   Delta_nu (u o F_j)(x)  vs  r * Q_j(cell of resolution L at F_j x) * 2.
/// For the rotation-invariant middle cell (k = 3l+1) the right side is the
/// constant (1/2) E(h_1 o F_c) * 2, with no Radon-Nikodym factor.
struct ScalingReport {
  int cell = -1;
  bool middle_cell = false;
  std::vector<double> lhs;        // estimator of Delta_nu (u o F_j)(x), per L
  std::vector<double> rhs;        // r Q_j(resolution-L cell) * 2, per L
  std::vector<double> deviation;  // |lhs - rhs|
};

inline ScalingReport laplacian_scaling_experiment(const HarmonicStructure& hs,
                                                  const MMatrixFamily& mm, int cell,
                                                  const JunctionPoint& x, int levels) {
  if (cell < 0 || cell >= hs.params.d)
    throw std::domain_error("laplacian_scaling_experiment: cell out of range");
  ScalingReport report;
  report.cell = cell;

  // Middle cell: exists only for k = 3l+1, fixed under the rotation.
  {
    LevelGraph g1 = build_level_graph(hs.params, 1);
    report.middle_cell = hs.params.k % 3 == 1 && rotate_cell(hs.params, g1, cell) == cell;
  }

  const HarmonicForm pair = HarmonicForm::energy_pair_square();
  const HarmonicForm composed = pair.composed_with_cell(hs, cell);

  // One estimator sequence of Delta_nu (u o F_j) at x, evaluated deep.
  const int m0 = x.cell.size();
  LaplacianSequence lhs_seq = delta_nu_estimate(hs, composed, x, m0 + levels);

  // Right side at cylinder resolution L. The weight Q_j lives on the
  // preimage side, so its Radon-Nikodym approximant localizes at x itself.
  detail::JunctionNeighborhood nbh(hs, x);
  for (int step = 0; step < levels; ++step) {
    const int idx = std::min<int>(step + 1, static_cast<int>(lhs_seq.estimate.size()) - 1);
    report.lhs.push_back(lhs_seq.estimate[static_cast<std::size_t>(idx)].to_double());
    Rational rhs;
    if (report.middle_cell) {
      // (1/2) E(h_1 o F_c) * 2; the harmonic function h_1 o F_c has energy
      // equal to the boundary Gram form of its corner values.
      Vec3Q h1;
      h1 << Rational(0), Rational(1), Rational(0);
      Vec3Q restricted = hs.B[static_cast<std::size_t>(cell)] * h1;
      rhs = quad_form(hs.gram0, restricted);
    } else {
      // Union Radon-Nikodym approximant over the cells containing x.
      Vec3Q mass = Vec3Q::Zero();
      for (const Word& wcell : nbh.cell_words()) mass += energy_cell_vector(hs, wcell).nu;
      const Rational total = mass(0) + mass(1) + mass(2);
      Vec3Q rn;
      for (int i = 0; i < 3; ++i) rn(i) = mass(i) / total;
      rhs = hs.r * dot_q(mm.S[static_cast<std::size_t>(cell)], rn) * Rational(2);
    }
    report.rhs.push_back(rhs.to_double());
    report.deviation.push_back(std::abs(report.lhs.back() - report.rhs.back()));
    nbh.refine();
  }
  return report;
}

}  // namespace sgk
