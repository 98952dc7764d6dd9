#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sgk/measures.hpp"

namespace sgk {

/// A_w = A_{w_m} ... A_{w_1} in the energy coordinates (float route).
inline Eigen::Matrix2d word_matrix(const EnergyCoordinates& ec, const Word& w) {
  return ec.word_matrix(w);
}

/// The trace-preserving map M(B) = sum_s A_s B A_s^T on symmetric 2x2
/// matrices, represented on coordinates (a, b, c) of [[a, b], [b, c]].
/// The representation is assembled exactly over Q[sqrt(3)] (the sqrt(3)
/// parts cancel in the sum) and mirrored as a double matrix.
struct SymOperator {
  int k = 0;
  Mat3Q rep_exact;
  Eigen::Matrix3d rep;
  std::array<std::complex<double>, 3> spectrum;  // sorted by modulus, descending

  Eigen::Vector3d apply_coords(const Eigen::Vector3d& coords) const { return rep * coords; }

  Eigen::Matrix2d apply(const Eigen::Matrix2d& b) const {
    Eigen::Vector3d c = apply_coords(Eigen::Vector3d(b(0, 0), b(0, 1), b(1, 1)));
    Eigen::Matrix2d out;
    out << c(0), c(1), c(1), c(2);
    return out;
  }
};

inline SymOperator transfer_operator_matrix(const EnergyCoordinates& ec) {
  const std::size_t d = ec.W.size();
  SymOperator op;
  op.k = ec.k;

  // Images of the basis matrices E_a=[[1,0],[0,0]], E_b=[[0,1],[1,0]],
  // E_c=[[0,0],[0,1]] under B -> (1/r) sum_s W_s B W_s^T.
  const std::array<std::array<std::array<Rational, 2>, 2>, 3> basis = {{
      {{{Rational(1), Rational(0)}, {Rational(0), Rational(0)}}},
      {{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}}},
      {{{Rational(0), Rational(0)}, {Rational(0), Rational(1)}}},
  }};
  for (int col = 0; col < 3; ++col) {
    std::array<std::array<QSqrt3, 2>, 2> acc{};
    for (std::size_t s = 0; s < d; ++s) {
      const auto& w = ec.W[s];
      // p = W_s * E * W_s^T
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          QSqrt3 sum;
          for (int u = 0; u < 2; ++u)
            for (int v = 0; v < 2; ++v)
              sum += w[static_cast<std::size_t>(i)][static_cast<std::size_t>(u)] *
                     QSqrt3(basis[static_cast<std::size_t>(col)][static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) *
                     w[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)];
          acc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += sum;
        }
    }
    if (acc[0][1] != acc[1][0])
      throw std::logic_error("transfer operator: image not symmetric");
    const std::array<QSqrt3, 3> coords = {acc[0][0], acc[0][1], acc[1][1]};
    for (int row = 0; row < 3; ++row) {
      if (!coords[static_cast<std::size_t>(row)].b.is_zero())
        throw std::logic_error("transfer operator: sqrt(3) part did not cancel");
      op.rep_exact(row, col) = coords[static_cast<std::size_t>(row)].a / ec.r;
    }
  }
  op.rep = to_double<3, 3>(op.rep_exact);

  Eigen::EigenSolver<Eigen::Matrix3d> es(op.rep);
  std::array<std::complex<double>, 3> ev = {es.eigenvalues()(0), es.eigenvalues()(1),
                                            es.eigenvalues()(2)};
  std::sort(ev.begin(), ev.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  op.spectrum = ev;
  return op;
}

/// Singular-value tail of the prefix products A_{[x]_n}, n = 1..|prefix|.
/// Convergence is reported through the gauge-free projectors
/// P_n = Q_n^T Q_n = A_n^T A_n / ||A_n||_F^2.
struct SvdTail {
  Word prefix;
  std::vector<std::array<double, 2>> singular_values;  // descending per n
  std::vector<Eigen::Matrix2d> projector;              // P_n per n
  std::vector<double> distance_to_final;               // ||P_n - P_N||_F
};

inline SvdTail svd_tail(const EnergyCoordinates& ec, const Word& prefix) {
  if (prefix.empty()) throw std::domain_error("svd_tail: prefix must be nonempty");
  SvdTail tail;
  tail.prefix = prefix;
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (int n = 1; n <= prefix.size(); ++n) {
    prod = ec.A[static_cast<std::size_t>(prefix[n - 1])] * prod;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(prod);
    tail.singular_values.push_back({svd.singularValues()(0), svd.singularValues()(1)});
    tail.projector.push_back(prod.transpose() * prod / prod.squaredNorm());
  }
  for (const auto& p : tail.projector)
    tail.distance_to_final.push_back((p - tail.projector.back()).norm());
  return tail;
}

/// Conditional cylinder measures nu(s | [x]_n) = ||A_{[x]_n} A_s||^2 / ||A_{[x]_n}||^2
/// for n = 0..|prefix|; the n -> infinity limit is the g-function at s.x.
inline std::vector<double> g_function_estimate(const EnergyCoordinates& ec, int s,
                                               const Word& prefix) {
  if (s < 0 || s >= static_cast<int>(ec.A.size()))
    throw std::domain_error("g_function_estimate: bad symbol");
  std::vector<double> out;
  Eigen::Matrix2d prod = Eigen::Matrix2d::Identity();
  for (int n = 0; n <= prefix.size(); ++n) {
    if (n > 0) prod = ec.A[static_cast<std::size_t>(prefix[n - 1])] * prod;
    out.push_back((prod * ec.A[static_cast<std::size_t>(s)]).squaredNorm() /
                  prod.squaredNorm());
  }
  return out;
}

enum class CorrelationMethod { kBrute, kOperator };

/// Correlation nu(T^{-(n+|a|)}[a] cap [b]) - nu([a]) nu([b]) of the shift on
/// the Kusuoka measure. The gap word length is n + |a| - |b|; both methods
/// must agree (brute sums all gap cylinders, operator iterates M).
inline double correlation_exact(const EnergyCoordinates& ec, const Word& a,
                                const Word& b, int n, CorrelationMethod method) {
  const int gap = n + a.size() - b.size();
  if (gap < 0) throw std::domain_error("correlation_exact: negative gap");
  const int d = static_cast<int>(ec.A.size());
  const Eigen::Matrix2d wa = ec.word_matrix(a);
  const Eigen::Matrix2d wb = ec.word_matrix(b);
  const double product_term = (wa.squaredNorm() / 2.0) * (wb.squaredNorm() / 2.0);

  if (method == CorrelationMethod::kBrute) {
    double joint = 0.0;
    auto recurse = [&](auto&& self, int depth, const Eigen::Matrix2d& p) -> void {
      if (depth == gap) {
        joint += (wa * p).squaredNorm() / 2.0;
        return;
      }
      for (int s = 0; s < d; ++s)
        self(self, depth + 1, Eigen::Matrix2d(ec.A[static_cast<std::size_t>(s)] * p));
    };
    recurse(recurse, 0, wb);
    return joint - product_term;
  }

  Eigen::Matrix2d state = wb * wb.transpose();
  for (int i = 0; i < gap; ++i) {
    Eigen::Matrix2d next = Eigen::Matrix2d::Zero();
    for (int s = 0; s < d; ++s)
      next += ec.A[static_cast<std::size_t>(s)] * state *
              ec.A[static_cast<std::size_t>(s)].transpose();
    state = next;
  }
  return (wa * state * wa.transpose()).trace() / 2.0 - product_term;
}

/// Least-squares fit of log|correlation| against n over [n_lo, n_hi].
struct RateFit {
  double rate = 0.0;            // fitted decay rate per step
  double constant = 0.0;        // sup |corr_n| / reference_rate^n
  double reference_rate = 0.0;  // modulus of the operator's second eigenvalue
  int points_used = 0;
};

inline RateFit mixing_rate_fit(const EnergyCoordinates& ec, const Word& a,
                               const Word& b, int n_lo, int n_hi) {
  if (n_lo > n_hi) throw std::invalid_argument("mixing_rate_fit: empty range");
  RateFit fit;
  fit.reference_rate = std::abs(transfer_operator_matrix(ec).spectrum[1]);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double corr = correlation_exact(ec, a, b, n, CorrelationMethod::kOperator);
    if (std::abs(corr) < 1e-300) continue;
    const double y = std::log(std::abs(corr));
    sx += n;
    sy += y;
    sxx += static_cast<double>(n) * n;
    sxy += n * y;
    fit.constant = std::max(fit.constant,
                            std::abs(corr) / std::pow(fit.reference_rate, n));
    ++fit.points_used;
  }
  if (fit.points_used < 2) return fit;  // all-zero correlations: exactly mixing
  const double den = fit.points_used * sxx - sx * sx;
  fit.rate = std::exp((fit.points_used * sxy - sx * sy) / den);
  return fit;
}

}  // namespace sgk
