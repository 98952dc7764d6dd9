#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sgk/linalg.hpp"
#include "sgk/topology.hpp"
#include "sgk/word.hpp"

namespace sgk {

/// Exact Dirichlet solve on a level graph: returns the unique function that
/// matches `boundary_values` and satisfies the mean-value property
/// u(x) = (1/deg x) sum_{y~x} u(y) at every other vertex.
inline std::vector<Rational> solve_dirichlet(
    const LevelGraph& g, const std::map<int, Rational>& boundary_values) {
  if (boundary_values.empty())
    throw std::domain_error("solve_dirichlet: empty boundary set");
  const int n = g.n_vertices();
  for (const auto& [v, value] : boundary_values)
    if (v < 0 || v >= n) throw std::domain_error("solve_dirichlet: bad boundary vertex");
  std::vector<int> unknown_of(static_cast<std::size_t>(n), -1);
  std::vector<int> unknowns;
  for (int v = 0; v < n; ++v) {
    if (boundary_values.count(v)) continue;
    unknown_of[static_cast<std::size_t>(v)] = static_cast<int>(unknowns.size());
    unknowns.push_back(v);
  }
  const auto m = static_cast<Eigen::Index>(unknowns.size());
  MatXQ a = MatXQ::Zero(m, m);
  VecXQ b = VecXQ::Zero(m);
  for (Eigen::Index row = 0; row < m; ++row) {
    const int v = unknowns[static_cast<std::size_t>(row)];
    a(row, row) = Rational(g.degree[static_cast<std::size_t>(v)]);
    for (int y : g.adjacency[static_cast<std::size_t>(v)]) {
      auto it = boundary_values.find(y);
      if (it != boundary_values.end())
        b(row) += it->second;
      else
        a(row, unknown_of[static_cast<std::size_t>(y)]) -= Rational(1);
    }
  }
  VecXQ x;
  if (m > 0) x = solve_exact(a, b);  // singular only if the graph is disconnected
  std::vector<Rational> values(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto it = boundary_values.find(v);
    values[static_cast<std::size_t>(v)] =
        (it != boundary_values.end())
            ? it->second
            : x(unknown_of[static_cast<std::size_t>(v)]);
  }
  return values;
}

/// Unit-conductance energy Gram matrix of the boundary triangle:
/// gram0(i,j) = E_0(h_i, h_j).
inline Mat3Q boundary_gram() {
  Mat3Q g;
  g << Rational(2), Rational(-1), Rational(-1),
       Rational(-1), Rational(2), Rational(-1),
       Rational(-1), Rational(-1), Rational(2);
  return g;
}

/// The harmonic structure of SG_k: extension probabilities p_{ni}^j (the
/// value of the standard harmonic function h_j at F_n(q_i)), the per-cell
/// restriction matrices B_n with B_n(i,j) = p_{ni}^j, and the
/// renormalization constant r.
struct HarmonicStructure {
  GasketParams params;
  Rational r;               // energy renormalization constant r_k
  std::vector<Mat3Q> B;     // d matrices; (B_n h)(q_i) = h(F_n(q_i))
  Mat3Q gram0;              // boundary energy Gram matrix

  Rational p(int n, int i, int j) const { return B[static_cast<std::size_t>(n)](i, j); }

  /// B_w = B_{w_m} ... B_{w_1}: boundary-values-to-cell-values transport.
  Mat3Q restriction(const Word& w) const {
    Mat3Q acc = Mat3Q::Identity();
    for (int i = 0; i < w.size(); ++i) acc = B[static_cast<std::size_t>(w[i])] * acc;
    return acc;
  }
};

namespace detail {

/// Raw (unrenormalized) graph energy sum_{x~y} (u(x)-u(y))^2.
inline Rational raw_edge_energy(const LevelGraph& g, const std::vector<Rational>& u) {
  Rational e(0);
  for (const auto& [a, b] : g.edges) {
    Rational diff = u[static_cast<std::size_t>(a)] - u[static_cast<std::size_t>(b)];
    e += diff * diff;
  }
  return e;
}

inline std::map<int, Rational> corner_boundary(const LevelGraph& g, const Vec3Q& h) {
  return {{g.boundary_ids[0], h(0)}, {g.boundary_ids[1], h(1)}, {g.boundary_ids[2], h(2)}};
}

}  // namespace detail

/// Harmonic extension tensor of SG_k, computed from exact Dirichlet solves
/// on Gamma_1. Row-stochasticity of every B_n is verified.
inline HarmonicStructure extension_tensor(const GasketParams& params) {
  LevelGraph g1 = build_level_graph(params, 1);
  HarmonicStructure hs;
  hs.params = params;
  hs.gram0 = boundary_gram();
  hs.B.assign(static_cast<std::size_t>(params.d), Mat3Q::Zero());

  std::array<std::vector<Rational>, 3> h;
  for (int j = 0; j < 3; ++j) {
    Vec3Q e = Vec3Q::Zero();
    e(j) = Rational(1);
    h[static_cast<std::size_t>(j)] = solve_dirichlet(g1, detail::corner_boundary(g1, e));
  }
  for (int n = 0; n < params.d; ++n) {
    const auto& tri = g1.cell_vertices[static_cast<std::size_t>(n)];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        hs.B[static_cast<std::size_t>(n)](i, j) =
            h[static_cast<std::size_t>(j)][static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])];
  }
  for (int n = 0; n < params.d; ++n)
    for (int i = 0; i < 3; ++i) {
      Rational row_sum(0);
      for (int j = 0; j < 3; ++j) {
        const Rational& v = hs.B[static_cast<std::size_t>(n)](i, j);
        if (v < Rational(0)) throw std::logic_error("extension tensor: negative entry");
        row_sum += v;
      }
      if (row_sum != Rational(1)) throw std::logic_error("extension tensor: row sum != 1");
    }

  // r as the raw energy ratio of the harmonic extension of (1,0,0).
  Vec3Q e0 = Vec3Q::Zero();
  e0(0) = Rational(1);
  std::vector<Rational> ext = solve_dirichlet(g1, detail::corner_boundary(g1, e0));
  hs.r = detail::raw_edge_energy(g1, ext) / quad_form(hs.gram0, e0);
  return hs;
}

enum class RenormMethod { kEnergyRatio, kCornerEigenvalue, kResistance, kHittingTime };

inline RenormMethod renorm_method_from_string(const std::string& s) {
  if (s == "energy-ratio") return RenormMethod::kEnergyRatio;
  if (s == "corner-eigenvalue") return RenormMethod::kCornerEigenvalue;
  if (s == "resistance") return RenormMethod::kResistance;
  if (s == "hitting-time") return RenormMethod::kHittingTime;
  throw std::domain_error("unknown renormalization method '" + s + "'");
}

/// Effective resistance between two vertices of a unit-conductance graph,
/// by exact Schur complement elimination of all other vertices.
inline Rational effective_resistance(const LevelGraph& g, int u, int v) {
  const int n = g.n_vertices();
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w)
    if (w != u && w != v) order.push_back(w);
  order.push_back(u);
  order.push_back(v);
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  MatXQ lap = MatXQ::Zero(n, n);
  for (const auto& [a, b] : g.edges) {
    int ia = pos[static_cast<std::size_t>(a)], ib = pos[static_cast<std::size_t>(b)];
    lap(ia, ia) += Rational(1);
    lap(ib, ib) += Rational(1);
    lap(ia, ib) -= Rational(1);
    lap(ib, ia) -= Rational(1);
  }
  // Eliminate the first n-2 rows; the trailing 2x2 block becomes the
  // Schur-complement Laplacian [[c,-c],[-c,c]] of the 2-terminal network.
  for (int col = 0; col < n - 2; ++col) {
    if (lap(col, col).is_zero()) throw std::logic_error("effective_resistance: zero pivot");
    const Rational inv = Rational(1) / lap(col, col);
    for (int row = col + 1; row < n; ++row) {
      if (lap(row, col).is_zero()) continue;
      const Rational f = lap(row, col) * inv;
      for (int j = col; j < n; ++j) lap(row, j) -= f * lap(col, j);
    }
  }
  const Rational c = lap(n - 2, n - 2);
  if (c <= Rational(0)) throw std::logic_error("effective_resistance: nonpositive conductance");
  return Rational(1) / c;
}

/// Expected hitting time H(q1, q2) of the simple symmetric walk on Gamma_m.
inline Rational expected_hitting_time(const GasketParams& params, int m) {
  LevelGraph g = build_level_graph(params, m);
  const int target = g.boundary_ids[2];
  const int n = g.n_vertices();
  std::vector<int> unknown_of(static_cast<std::size_t>(n), -1);
  std::vector<int> unknowns;
  for (int v = 0; v < n; ++v) {
    if (v == target) continue;
    unknown_of[static_cast<std::size_t>(v)] = static_cast<int>(unknowns.size());
    unknowns.push_back(v);
  }
  const auto sz = static_cast<Eigen::Index>(unknowns.size());
  MatXQ a = MatXQ::Zero(sz, sz);
  VecXQ b = VecXQ::Zero(sz);
  for (Eigen::Index row = 0; row < sz; ++row) {
    const int v = unknowns[static_cast<std::size_t>(row)];
    a(row, row) = Rational(g.degree[static_cast<std::size_t>(v)]);
    b(row) = Rational(g.degree[static_cast<std::size_t>(v)]);
    for (int y : g.adjacency[static_cast<std::size_t>(v)])
      if (y != target) a(row, unknown_of[static_cast<std::size_t>(y)]) -= Rational(1);
  }
  VecXQ x = solve_exact(a, b);
  // By symmetry H(q1, q2) = H(q2, q1); we solved for hitting q2.
  return x(unknown_of[static_cast<std::size_t>(g.boundary_ids[1])]);
}

/// Exact probability that the Gamma_1 walk started at q0 returns to q0
/// before reaching q1 or q2 (first-step decomposition into h_0 values).
inline Rational return_probability(const GasketParams& params) {
  LevelGraph g1 = build_level_graph(params, 1);
  Vec3Q e0 = Vec3Q::Zero();
  e0(0) = Rational(1);
  std::vector<Rational> h0 = solve_dirichlet(g1, detail::corner_boundary(g1, e0));
  const int q0 = g1.boundary_ids[0];
  Rational acc(0);
  for (int y : g1.adjacency[static_cast<std::size_t>(q0)]) acc += h0[static_cast<std::size_t>(y)];
  return acc / Rational(g1.degree[static_cast<std::size_t>(q0)]);
}

/// Renormalization constant r_k by one of four independent routes; all four
/// return the same rational.
inline Rational renormalization_constant(const GasketParams& params, RenormMethod method) {
  switch (method) {
    case RenormMethod::kEnergyRatio: {
      LevelGraph g1 = build_level_graph(params, 1);
      Vec3Q e0 = Vec3Q::Zero();
      e0(0) = Rational(1);
      std::vector<Rational> ext = solve_dirichlet(g1, detail::corner_boundary(g1, e0));
      return detail::raw_edge_energy(g1, ext) / quad_form(boundary_gram(), e0);
    }
    case RenormMethod::kCornerEigenvalue: {
      // The corner-cell extension matrix [[1,0,0],[p0,p1,p2],[p0,p2,p1]]
      // has eigenvalues 1, p1+p2 and p1-p2; the hitting probabilities come
      // from Dirichlet solves and the eigenvalues are formed symbolically.
      // r is the second largest, p1+p2.
      LevelGraph g1 = build_level_graph(params, 1);
      const auto& tri = g1.cell_vertices[0];  // cell containing q0
      std::array<Rational, 3> p{};
      for (int j = 0; j < 3; ++j) {
        Vec3Q e = Vec3Q::Zero();
        e(j) = Rational(1);
        std::vector<Rational> hj = solve_dirichlet(g1, detail::corner_boundary(g1, e));
        p[static_cast<std::size_t>(j)] = hj[static_cast<std::size_t>(tri[1])];  // x = F_0(q1)
      }
      const Rational lambda2 = p[1] + p[2];
      const Rational lambda3 = p[1] - p[2];
      if (!(lambda2 < Rational(1) && abs(lambda3) < lambda2))
        throw std::logic_error("corner eigenvalues out of order");
      if (p[0] + p[1] + p[2] != Rational(1))
        throw std::logic_error("corner probabilities do not sum to 1");
      return lambda2;
    }
    case RenormMethod::kResistance: {
      LevelGraph g1 = build_level_graph(params, 1);
      Rational res = effective_resistance(g1, g1.boundary_ids[1], g1.boundary_ids[2]);
      return Rational(2) / (Rational(3) * res);
    }
    case RenormMethod::kHittingTime:
      return Rational(2 * params.d) / expected_hitting_time(params, 1);
  }
  throw std::domain_error("renormalization_constant: unknown method");
}

/// Harmonic extension of boundary values to V_m, as values on the given
/// level graph (which must be Gamma_m for the same k). Cellwise iteration of
/// the restriction matrices.
inline std::vector<Rational> extend_harmonic(const HarmonicStructure& hs,
                                             const Vec3Q& boundary,
                                             const LevelGraph& g) {
  std::vector<Rational> values(static_cast<std::size_t>(g.n_vertices()), Rational(0));
  const int d = hs.params.d;
  std::size_t cell = 0;
  auto recurse = [&](auto&& self, int depth, const Vec3Q& v) -> void {
    if (depth == g.level) {
      const auto& tri = g.cell_vertices[cell++];
      for (int i = 0; i < 3; ++i) values[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])] = v(i);
      return;
    }
    for (int s = 0; s < d; ++s) self(self, depth + 1, Vec3Q(hs.B[static_cast<std::size_t>(s)] * v));
  };
  recurse(recurse, 0, boundary);
  return values;
}

/// Reproducible Monte Carlo estimate of a Gamma_1 walk functional.
struct WalkStats {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

enum class WalkTarget { kReturnProbability, kHittingTime };

namespace detail {

/// Counter-based generator: a small keyed stream, seeded by (seed, index),
/// so sample i's randomness is independent of threading and batch order.
struct KeyedRng {
  std::uint64_t state;

  KeyedRng(std::uint64_t seed, std::uint64_t index) {
    state = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    next();
    next();
  }

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound) by the multiply-shift method.
  std::uint32_t below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
};

}  // namespace detail

inline WalkStats monte_carlo_walk(const GasketParams& params, WalkTarget target,
                                  std::uint64_t samples, std::uint64_t seed,
                                  int threads = 1) {
  if (samples < 1) throw std::domain_error("monte_carlo_walk: samples must be >= 1");
  LevelGraph g1 = build_level_graph(params, 1);
  const int q0 = g1.boundary_ids[0], q1 = g1.boundary_ids[1], q2 = g1.boundary_ids[2];

  auto run_one = [&](std::uint64_t index) -> std::uint64_t {
    detail::KeyedRng rng(seed, index);
    if (target == WalkTarget::kReturnProbability) {
      int v = q0;
      do {
        const auto& nbrs = g1.adjacency[static_cast<std::size_t>(v)];
        v = nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))];
        if (v == q0) return 1;
      } while (v != q1 && v != q2);
      return 0;
    }
    std::uint64_t steps = 0;
    int v = q1;
    while (v != q2) {
      const auto& nbrs = g1.adjacency[static_cast<std::size_t>(v)];
      v = nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))];
      ++steps;
    }
    return steps;
  };

  const int nthreads = std::max(1, threads);
  std::vector<std::uint64_t> sums(static_cast<std::size_t>(nthreads), 0);
  std::vector<std::uint64_t> sq_sums(static_cast<std::size_t>(nthreads), 0);
  auto work = [&](int t) {
    std::uint64_t s = 0, ss = 0;
    for (std::uint64_t i = static_cast<std::uint64_t>(t); i < samples;
         i += static_cast<std::uint64_t>(nthreads)) {
      const std::uint64_t x = run_one(i);
      s += x;
      ss += x * x;
    }
    sums[static_cast<std::size_t>(t)] = s;
    sq_sums[static_cast<std::size_t>(t)] = ss;
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::uint64_t s = 0, ss = 0;
  for (int t = 0; t < nthreads; ++t) {
    s += sums[static_cast<std::size_t>(t)];
    ss += sq_sums[static_cast<std::size_t>(t)];
  }

  WalkStats out;
  out.samples = samples;
  out.seed = seed;
  const double n = static_cast<double>(samples);
  out.estimate = static_cast<double>(s) / n;
  if (samples > 1) {
    const double var =
        (static_cast<double>(ss) - n * out.estimate * out.estimate) / (n - 1.0);
    out.standard_error = std::sqrt(std::max(var, 0.0) / n);
  }
  return out;
}

}  // namespace sgk
