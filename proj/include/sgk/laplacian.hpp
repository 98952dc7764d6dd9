#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sgk/measures.hpp"

namespace sgk {

/// Test function with exact rational vertex values:
///   u = (harmonic with boundary `lin`) + sum_t coef_t * (harmonic with boundary b_t)^2.
/// Covers harmonic functions, squares h_i^2, and the energy pair
/// g_1^2 + g_2^2 = (h_1-h_2)^2/6 + (2h_0-h_1-h_2)^2/18.
struct HarmonicForm {
  Vec3Q lin = Vec3Q::Zero();
  std::vector<std::pair<Rational, Vec3Q>> squares;
  std::optional<Rational> delta_nu_reference;  // exact Delta_nu u when constant

  static HarmonicForm harmonic(const Vec3Q& boundary) {
    HarmonicForm f;
    f.lin = boundary;
    f.delta_nu_reference = Rational(0);
    return f;
  }

  static HarmonicForm square(const Vec3Q& boundary, const Rational& coef = Rational(1)) {
    HarmonicForm f;
    f.squares.emplace_back(coef, boundary);
    return f;
  }

  /// g_1^2 + g_2^2 for the fixed energy-orthonormal pair; Delta_nu = 2
  /// exactly (with respect to the mass-2 normalization nu').
  static HarmonicForm energy_pair_square() {
    HarmonicForm f;
    Vec3Q b1, b2;
    b1 << Rational(0), Rational(1), Rational(-1);
    b2 << Rational(2), Rational(-1), Rational(-1);
    f.squares.emplace_back(Rational(1, 6), b1);
    f.squares.emplace_back(Rational(1, 18), b2);
    f.delta_nu_reference = Rational(2);
    return f;
  }

  /// u o F_j: composes every harmonic ingredient with the cell map.
  HarmonicForm composed_with_cell(const HarmonicStructure& hs, int cell) const {
    const Mat3Q& b = hs.B[static_cast<std::size_t>(cell)];
    HarmonicForm f;
    f.lin = b * lin;
    for (const auto& [c, v] : squares) f.squares.emplace_back(c, Vec3Q(b * v));
    if (delta_nu_reference && squares.empty()) f.delta_nu_reference = delta_nu_reference;
    return f;
  }

  /// Value at corner i of the cell with restriction matrix B_w.
  Rational value(const Mat3Q& bw, int corner) const {
    Rational acc(0);
    if (!(lin(0).is_zero() && lin(1).is_zero() && lin(2).is_zero())) {
      Vec3Q v = bw * lin;
      acc += v(corner);
    }
    for (const auto& [c, b] : squares) {
      Vec3Q v = bw * b;
      acc += c * v(corner) * v(corner);
    }
    return acc;
  }

  /// Values at every vertex of a level graph (harmonic extension cellwise).
  std::vector<Rational> grid_values(const HarmonicStructure& hs, const LevelGraph& g) const {
    std::vector<Rational> out(static_cast<std::size_t>(g.n_vertices()), Rational(0));
    const int d = hs.params.d;
    std::size_t cell = 0;
    auto recurse = [&](auto&& self, int depth, const Mat3Q& bw) -> void {
      if (depth == g.level) {
        const auto& tri = g.cell_vertices[cell++];
        for (int i = 0; i < 3; ++i)
          out[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])] = value(bw, i);
        return;
      }
      for (int s = 0; s < d; ++s)
        self(self, depth + 1, Mat3Q(hs.B[static_cast<std::size_t>(s)] * bw));
    };
    recurse(recurse, 0, Mat3Q::Identity());
    return out;
  }
};

/// Graph Laplacian Delta_m u(x) = (1/deg x) sum_{y~x} (u(y) - u(x)).
/// Rejects boundary vertices, where the formula does not apply.
inline Rational graph_laplacian_value(const LevelGraph& g,
                                      const std::vector<Rational>& u, int x) {
  if (g.is_boundary(x))
    throw std::domain_error("graph_laplacian_value: boundary vertex");
  Rational acc(0);
  for (int y : g.adjacency[static_cast<std::size_t>(x)])
    acc += u[static_cast<std::size_t>(y)] - u[static_cast<std::size_t>(x)];
  return acc / Rational(g.degree[static_cast<std::size_t>(x)]);
}

/// A junction point addressed as x = F_cell(q_corner); |cell| >= 1.
struct JunctionPoint {
  Word cell;
  int corner = 0;
};

namespace detail {

/// One containing cell of a junction: the cell word plus the local corner
/// index at which the junction sits.
struct Incidence {
  Word cell;
  int corner;
};

/// All level-|x.cell| cells containing x, with local corner indices.
/// Throws if x is a boundary corner of the gasket.
inline std::vector<Incidence> junction_incidences(const GasketParams& params,
                                                  const JunctionPoint& x) {
  if (x.cell.empty()) throw std::domain_error("junction: empty cell address");
  if (x.corner < 0 || x.corner > 2) throw std::domain_error("junction: bad corner");
  const Point p = affine_map_of_word(params, x.cell)(unit_corners()[static_cast<std::size_t>(x.corner)]);
  for (const Point& q : unit_corners())
    if (p == q) throw std::domain_error("junction: point lies on the gasket boundary V_0");
  LevelGraph g = build_level_graph(params, x.cell.size());
  const int v = g.index_of(p);
  std::vector<Incidence> out;
  for (int c : g.vertex_cells[static_cast<std::size_t>(v)]) {
    Word w = g.cell_word(static_cast<std::size_t>(c));
    const auto& tri = g.cell_vertices[static_cast<std::size_t>(c)];
    for (int i = 0; i < 3; ++i)
      if (tri[static_cast<std::size_t>(i)] == v) out.push_back({w, i});
  }
  return out;
}

/// Per-level local neighborhoods of a junction. Each containing cell refines
/// toward the junction through its corner sub-cell, so Delta_m needs only
/// the restriction matrices of those chains.
class JunctionNeighborhood {
 public:
  JunctionNeighborhood(const HarmonicStructure& hs, const JunctionPoint& x)
      : hs_(&hs), incidences_(junction_incidences(hs.params, x)), level_(x.cell.size()) {
    for (const auto& inc : incidences_) chains_.push_back(hs.restriction(inc.cell));
  }

  int level() const { return level_; }
  int degree() const { return 2 * static_cast<int>(incidences_.size()); }

  /// Sum over neighbors of u(y) - u(x) at the current level; divide by the
  /// degree for Delta_m.
  Rational neighbor_defect(const HarmonicForm& u) const {
    Rational acc(0);
    for (std::size_t t = 0; t < incidences_.size(); ++t) {
      const int i = incidences_[t].corner;
      const Rational ux = u.value(chains_[t], i);
      acc += u.value(chains_[t], (i + 1) % 3) - ux;
      acc += u.value(chains_[t], (i + 2) % 3) - ux;
    }
    return acc;
  }

  Rational laplacian(const HarmonicForm& u) const {
    return neighbor_defect(u) / Rational(degree());
  }

  /// Descends every chain one level (into the corner sub-cell at the junction).
  void refine() {
    for (std::size_t t = 0; t < incidences_.size(); ++t) {
      const int sub = hs_->params.corner_cell(incidences_[t].corner);
      chains_[t] = hs_->B[static_cast<std::size_t>(sub)] * chains_[t];
    }
    ++level_;
  }

  /// Words of the level-m cells currently containing the junction.
  std::vector<Word> cell_words() const {
    std::vector<Word> out;
    for (std::size_t t = 0; t < incidences_.size(); ++t) {
      Word w = incidences_[t].cell;
      for (int j = level_ - incidences_[t].cell.size(); j > 0; --j)
        w.append(hs_->params.corner_cell(incidences_[t].corner));
      out.push_back(std::move(w));
    }
    return out;
  }

 private:
  const HarmonicStructure* hs_;
  std::vector<Incidence> incidences_;
  int level_;
  std::vector<Mat3Q> chains_;
};

}  // namespace detail

enum class LaplacianKind { kStandard, kEnergy };

/// Pointwise estimator sequence at a junction, with the exact prefactors of
/// the two pointwise formulas.
struct LaplacianSequence {
  JunctionPoint point;
  LaplacianKind kind = LaplacianKind::kStandard;
  int m0 = 0;
  std::vector<Rational> raw;       // Delta_m u(x), m = m0 .. m_max
  std::vector<Rational> estimate;  // prefactored estimate per level
  std::vector<double> successive_diff;
};

/// Standard-Laplacian estimator: 6 (H(q1,q2)/2)^m Delta_m u(x).
///
/// For reference, on the classical gasket (k=2) the extension rule refines
/// beyond harmonic functions: if x_0, x_1, x_2 are the level-(m+1) midpoints
/// of a level-m cell with corners y_0, y_1, y_2, then
///   u(x_2) = (2/5)(u(y_0) + u(y_1)) + (1/5) u(y_2)
///          + (2/3) 5^{-m} (-(6/5) D u(x_2) - (2/5) D u(x_1) - (2/5) D u(x_0))
///          + o(5^{-m}),
/// with D the standard Laplacian. This second-order correction is recorded
/// here for orientation only and is not implemented.
inline LaplacianSequence delta_mu_estimate(const HarmonicStructure& hs,
                                           const HarmonicForm& u,
                                           const JunctionPoint& x, int m_max) {
  detail::JunctionNeighborhood nbh(hs, x);
  if (m_max < nbh.level()) throw std::domain_error("delta_mu_estimate: m_max below junction level");
  const Rational half_h = expected_hitting_time(hs.params, 1) / Rational(2);
  LaplacianSequence seq;
  seq.point = x;
  seq.kind = LaplacianKind::kStandard;
  seq.m0 = nbh.level();
  Rational prefactor = Rational(6) * pow(half_h, seq.m0);
  for (int m = seq.m0; m <= m_max; ++m) {
    const Rational raw = nbh.laplacian(u);
    seq.raw.push_back(raw);
    seq.estimate.push_back(prefactor * raw);
    prefactor *= half_h;
    if (m < m_max) nbh.refine();
  }
  for (std::size_t i = 1; i < seq.estimate.size(); ++i)
    seq.successive_diff.push_back(
        std::abs(seq.estimate[i].to_double() - seq.estimate[i - 1].to_double()));
  return seq;
}

/// Energy-Laplacian estimator: 2 Delta_m u(x) / Delta_m (h_1^2 + h_2^2)(x),
/// with (h_1, h_2) the energy-orthonormal pair. The denominator is strictly
/// positive at every junction.
inline LaplacianSequence delta_nu_estimate(const HarmonicStructure& hs,
                                           const HarmonicForm& u,
                                           const JunctionPoint& x, int m_max) {
  detail::JunctionNeighborhood nbh(hs, x);
  if (m_max < nbh.level()) throw std::domain_error("delta_nu_estimate: m_max below junction level");
  const HarmonicForm pair = HarmonicForm::energy_pair_square();
  LaplacianSequence seq;
  seq.point = x;
  seq.kind = LaplacianKind::kEnergy;
  seq.m0 = nbh.level();
  for (int m = seq.m0; m <= m_max; ++m) {
    const Rational num = nbh.neighbor_defect(u);
    const Rational den = nbh.neighbor_defect(pair);
    if (den <= Rational(0))
      throw std::logic_error("delta_nu_estimate: nonpositive denominator");
    seq.raw.push_back(num / Rational(nbh.degree()));
    seq.estimate.push_back(Rational(2) * num / den);
    if (m < m_max) nbh.refine();
  }
  for (std::size_t i = 1; i < seq.estimate.size(); ++i)
    seq.successive_diff.push_back(
        std::abs(seq.estimate[i].to_double() - seq.estimate[i - 1].to_double()));
  return seq;
}

/// Diagnostic remainder Delta_nu u(x) - 2 Delta_m u(x) / Delta_m(h_1^2+h_2^2)(x)
/// for a form with a known exact Delta_nu (harmonic: 0; energy pair: 2).
inline Rational delta_nu_residual(const HarmonicStructure& hs, const HarmonicForm& u,
                                  const JunctionPoint& x, int m) {
  if (!u.delta_nu_reference)
    throw std::domain_error("delta_nu_residual: form has no exact Delta_nu reference");
  LaplacianSequence seq = delta_nu_estimate(hs, u, x, m);
  return *u.delta_nu_reference - seq.estimate.back();
}

/// Integral of the level-m harmonic spline at x against the standard measure:
/// (1/3) (deg(x)/2) (2/(k(k+1)))^m, exact; the values sum to 1 over V_m.
inline Rational spline_integral_mu(const GasketParams& params, const LevelGraph& g, int x) {
  return Rational(g.degree[static_cast<std::size_t>(x)]) / Rational(6) *
         pow(Rational(2, params.k * (params.k + 1)), g.level);
}

/// Integrals of all level-m harmonic splines against nu' (the mass-2 Kusuoka
/// normalization), exact. Interior vertices use
///   (1/2) r^{-m} deg(x) Delta_m (h_1^2+h_2^2)(x);
/// boundary corners use the Gauss-Green form with the exact corner normal
/// derivative of h^2, which for harmonic h is 2 h(q) dh/dn(q) with
/// dh/dn(q_i) = (gram0 b)_i. The values sum to exactly 2.
inline std::vector<Rational> spline_integral_nu_all(const HarmonicStructure& hs,
                                                    const LevelGraph& g) {
  const HarmonicForm pair = HarmonicForm::energy_pair_square();
  const std::vector<Rational> u = pair.grid_values(hs, g);
  const Rational scale = pow(Rational(1) / hs.r, g.level) / Rational(2);
  std::vector<Rational> out(static_cast<std::size_t>(g.n_vertices()), Rational(0));
  for (int x = 0; x < g.n_vertices(); ++x) {
    Rational defect(0);  // sum over neighbors of u(y) - u(x)
    for (int y : g.adjacency[static_cast<std::size_t>(x)])
      defect += u[static_cast<std::size_t>(y)] - u[static_cast<std::size_t>(x)];
    if (!g.is_boundary(x)) {
      out[static_cast<std::size_t>(x)] = scale * defect;
      continue;
    }
    int corner = 0;
    for (int i = 0; i < 3; ++i)
      if (g.boundary_ids[static_cast<std::size_t>(i)] == x) corner = i;
    Rational normal(0);  // d(pair)/dn at q_corner
    for (const auto& [c, b] : pair.squares) {
      Vec3Q gb = hs.gram0 * b;
      normal += Rational(2) * c * b(corner) * gb(corner);
    }
    out[static_cast<std::size_t>(x)] = (normal + Rational(2) * scale * defect) / Rational(2);
  }
  return out;
}

inline Rational spline_integral_nu(const HarmonicStructure& hs, const LevelGraph& g, int x) {
  return spline_integral_nu_all(hs, g)[static_cast<std::size_t>(x)];
}

/// Exact solve of Delta_m u = scaling * f on interior vertices with
/// prescribed values on V_0 (zero by default).
inline std::vector<Rational> discrete_poisson_solve(
    const LevelGraph& g, const std::vector<Rational>& f, const Rational& scaling,
    const std::array<Rational, 3>& boundary = {Rational(0), Rational(0), Rational(0)}) {
  if (f.size() != static_cast<std::size_t>(g.n_vertices()))
    throw std::invalid_argument("discrete_poisson_solve: f size mismatch");
  const int n = g.n_vertices();
  std::vector<int> unknown_of(static_cast<std::size_t>(n), -1);
  std::vector<int> unknowns;
  for (int v = 0; v < n; ++v) {
    if (g.is_boundary(v)) continue;
    unknown_of[static_cast<std::size_t>(v)] = static_cast<int>(unknowns.size());
    unknowns.push_back(v);
  }
  auto boundary_value = [&](int v) {
    for (int i = 0; i < 3; ++i)
      if (g.boundary_ids[static_cast<std::size_t>(i)] == v)
        return boundary[static_cast<std::size_t>(i)];
    throw std::logic_error("not a boundary vertex");
  };
  const auto sz = static_cast<Eigen::Index>(unknowns.size());
  MatXQ a = MatXQ::Zero(sz, sz);
  VecXQ rhs = VecXQ::Zero(sz);
  for (Eigen::Index row = 0; row < sz; ++row) {
    const int v = unknowns[static_cast<std::size_t>(row)];
    const int deg = g.degree[static_cast<std::size_t>(v)];
    a(row, row) = Rational(deg);
    rhs(row) = Rational(-deg) * scaling * f[static_cast<std::size_t>(v)];
    for (int y : g.adjacency[static_cast<std::size_t>(v)]) {
      if (g.is_boundary(y))
        rhs(row) += boundary_value(y);
      else
        a(row, unknown_of[static_cast<std::size_t>(y)]) -= Rational(1);
    }
  }
  VecXQ x = solve_exact(a, rhs);
  std::vector<Rational> out(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v)
    out[static_cast<std::size_t>(v)] = g.is_boundary(v)
                                           ? boundary_value(v)
                                           : x(unknown_of[static_cast<std::size_t>(v)]);
  return out;
}

/// Standard-Laplacian estimator read off a stored grid function: Delta_m at
/// the junction for every m in [x-level, fine.level], looking vertex values
/// up by exact coordinates.
inline std::vector<Rational> delta_mu_estimate_grid(const HarmonicStructure& hs,
                                                    const LevelGraph& fine,
                                                    const std::vector<Rational>& u,
                                                    const JunctionPoint& x) {
  const Rational half_h = expected_hitting_time(hs.params, 1) / Rational(2);
  const Point p = affine_map_of_word(hs.params, x.cell)(
      unit_corners()[static_cast<std::size_t>(x.corner)]);
  std::vector<Rational> estimates;
  for (int m = x.cell.size(); m <= fine.level; ++m) {
    const LevelGraph coarse = (m == fine.level) ? fine : build_level_graph(hs.params, m);
    const int xv = coarse.index_of(p);
    Rational acc(0);
    for (int y : coarse.adjacency[static_cast<std::size_t>(xv)]) {
      const Point py = coarse.vertices[static_cast<std::size_t>(y)];
      acc += u[static_cast<std::size_t>(fine.index_of(py))] -
             u[static_cast<std::size_t>(fine.index_of(p))];
    }
    const Rational raw = acc / Rational(coarse.degree[static_cast<std::size_t>(xv)]);
    estimates.push_back(Rational(6) * pow(half_h, m) * raw);
  }
  return estimates;
}

}  // namespace sgk
