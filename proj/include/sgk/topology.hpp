#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sgk/linalg.hpp"
#include "sgk/qsqrt3.hpp"
#include "sgk/word.hpp"

namespace sgk {

/// Boundary corners of the unit triangle; the same for every SG_k.
inline const std::array<Point, 3>& unit_corners() {
  static const std::array<Point, 3> q = {
      Point(Rational(0), Rational(0)),       // q0
      Point(Rational(1), Rational(0)),       // q1
      Point(Rational(1, 2), Rational(1, 2))  // q2 = (1/2, sqrt(3)/2)
  };
  return q;
}

/// Contraction data for the level-k gasket SG_k: d = k(k+1)/2 maps
/// F_i(x) = x/k + b_i onto the upward subtriangles of side 1/k.
struct GasketParams {
  int k = 0;
  int d = 0;
  std::vector<Point> translations;  // b_i, row-major bottom-up, left to right
  double hausdorff_dim = 0.0;

  /// Index of the corner cell containing q_corner (0, k-1, or d-1).
  int corner_cell(int corner) const {
    if (corner == 0) return 0;
    if (corner == 1) return k - 1;
    return d - 1;
  }
};

/// Builds SG_k contraction data. Cells are enumerated row by row from the
/// bottom, left to right, so that cells 0, k-1 and d-1 contain q0, q1, q2.
inline GasketParams gasket_params(int k) {
  if (k < 2) throw std::domain_error("gasket_params: k must be >= 2");
  GasketParams p;
  p.k = k;
  p.d = k * (k + 1) / 2;
  p.translations.reserve(static_cast<std::size_t>(p.d));
  for (int row = 0; row < k; ++row)
    for (int pos = 0; pos < k - row; ++pos)
      p.translations.emplace_back(Rational(2 * pos + row, 2 * k), Rational(row, 2 * k));
  p.hausdorff_dim = 1.0 + (std::log(k + 1.0) - std::log(2.0)) / std::log(double(k));
  return p;
}

/// Affine map F_w = F_{w_1} o ... o F_{w_m}: x -> scale*x + shift,
/// with scale = k^{-m}.
struct AffineMap {
  Rational scale;
  Point shift;

  Point operator()(const Point& p) const { return scale * p + shift; }
};

inline AffineMap affine_map_of_word(const GasketParams& params, const Word& w) {
  w.validate(params.d);
  AffineMap m{Rational(1), Point(Rational(0), Rational(0))};
  const Rational inv_k(1, params.k);
  // F_{w_1} o (rest): fold from the right.
  for (int i = w.size() - 1; i >= 0; --i) {
    const Point& b = params.translations[static_cast<std::size_t>(w[i])];
    m.scale *= inv_k;
    m.shift = inv_k * m.shift + b;
  }
  return m;
}

/// Closed-form |V_m| = (d^m (k+4) + 2(k+1)) / (k+2), exact.
inline Rational vertex_census(const GasketParams& params, int m) {
  if (m < 0) throw std::domain_error("vertex_census: m must be >= 0");
  const Rational dm = pow(Rational(params.d), m);
  return (dm * Rational(params.k + 4) + Rational(2 * (params.k + 1))) /
         Rational(params.k + 2);
}

/// The graph approximation Gamma_m of SG_k. Immutable after construction;
/// all orderings are deterministic (cells lexicographic, adjacency sorted).
struct LevelGraph {
  int k = 0;
  int level = 0;
  std::vector<Point> vertices;                   // id -> exact coordinates
  std::array<int, 3> boundary_ids{};             // ids of q0, q1, q2
  std::vector<std::pair<int, int>> edges;        // sorted pairs, sorted list
  std::vector<std::vector<int>> adjacency;       // sorted per vertex
  std::vector<int> degree;
  std::vector<std::array<int, 3>> cell_vertices;  // cell -> (F_w q0, F_w q1, F_w q2)
  std::vector<std::vector<int>> vertex_cells;     // vertex -> incident cells
  std::unordered_map<Point, int, PointHash> vertex_index;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  std::size_t n_cells() const { return cell_vertices.size(); }
  bool is_boundary(int v) const {
    return v == boundary_ids[0] || v == boundary_ids[1] || v == boundary_ids[2];
  }

  int index_of(const Point& p) const {
    auto it = vertex_index.find(p);
    if (it == vertex_index.end())
      throw std::domain_error("LevelGraph: point is not a vertex");
    return it->second;
  }

  /// Word of the cell at lexicographic index `c`.
  Word cell_word(std::size_t c) const {
    std::vector<int> syms(static_cast<std::size_t>(level));
    const auto d = static_cast<std::size_t>(k * (k + 1) / 2);
    for (int i = level - 1; i >= 0; --i) {
      syms[static_cast<std::size_t>(i)] = static_cast<int>(c % d);
      c /= d;
    }
    return Word(std::move(syms));
  }
};

/// Default cap on the number of level-m cells a graph build will accept.
/// d^m <= 60000 gives m <= 10 for k=2 and m <= 6 for k=3.
inline constexpr std::size_t kDefaultMaxCells = 60000;

inline std::size_t cell_count_checked(const GasketParams& params, int m,
                                      std::size_t max_cells) {
  std::size_t cells = 1;
  for (int i = 0; i < m; ++i) {
    cells *= static_cast<std::size_t>(params.d);
    if (cells > max_cells)
      throw std::domain_error("level graph would have " + std::to_string(cells) +
                              "+ cells at level " + std::to_string(m) +
                              "; cap is " + std::to_string(max_cells));
  }
  return cells;
}

/// Constructs Gamma_m with exact vertex identification.
inline LevelGraph build_level_graph(const GasketParams& params, int m,
                                    std::size_t max_cells = kDefaultMaxCells) {
  if (m < 0) throw std::domain_error("build_level_graph: m must be >= 0");
  const std::size_t n_cells = cell_count_checked(params, m, max_cells);

  LevelGraph g;
  g.k = params.k;
  g.level = m;
  g.cell_vertices.resize(n_cells);

  const auto& q = unit_corners();
  const Rational inv_k(1, params.k);

  auto intern = [&g](const Point& p) {
    auto [it, inserted] = g.vertex_index.try_emplace(p, g.n_vertices());
    if (inserted) g.vertices.push_back(p);
    return it->second;
  };

  // Depth-first over words in lexicographic order, maintaining the affine
  // map F_w of the current prefix; descending by a symbol s composes on the
  // right, F_{w.s} = F_w o F_s.
  std::size_t next_cell = 0;
  auto recurse = [&](auto&& self, int depth, const AffineMap& map) -> void {
    if (depth == m) {
      std::array<int, 3> ids{};
      for (int i = 0; i < 3; ++i)
        ids[static_cast<std::size_t>(i)] = intern(map(q[static_cast<std::size_t>(i)]));
      g.cell_vertices[next_cell++] = ids;
      return;
    }
    for (int s = 0; s < params.d; ++s) {
      const Point& b = params.translations[static_cast<std::size_t>(s)];
      AffineMap child{map.scale * inv_k, map(b)};
      self(self, depth + 1, child);
    }
  };
  recurse(recurse, 0, AffineMap{Rational(1), Point(Rational(0), Rational(0))});

  for (int i = 0; i < 3; ++i)
    g.boundary_ids[static_cast<std::size_t>(i)] = g.index_of(q[static_cast<std::size_t>(i)]);

  g.edges.reserve(3 * n_cells);
  g.vertex_cells.resize(static_cast<std::size_t>(g.n_vertices()));
  for (std::size_t c = 0; c < n_cells; ++c) {
    const auto& t = g.cell_vertices[c];
    for (int i = 0; i < 3; ++i) {
      g.vertex_cells[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])].push_back(static_cast<int>(c));
      int a = t[static_cast<std::size_t>(i)], b = t[static_cast<std::size_t>((i + 1) % 3)];
      g.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());

  g.adjacency.resize(static_cast<std::size_t>(g.n_vertices()));
  g.degree.assign(static_cast<std::size_t>(g.n_vertices()), 0);
  for (const auto& [a, b] : g.edges) {
    g.adjacency[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  for (int v = 0; v < g.n_vertices(); ++v)
    g.degree[static_cast<std::size_t>(v)] = static_cast<int>(g.adjacency[static_cast<std::size_t>(v)].size());
  return g;
}

/// Vertex ids (F_w q0, F_w q1, F_w q2) of the cell named by w.
inline std::array<int, 3> cell_vertex_triple(const LevelGraph& g, const Word& w) {
  if (w.size() != g.level)
    throw std::domain_error("cell_vertex_triple: |w| must equal the graph level");
  const int d = g.k * (g.k + 1) / 2;
  w.validate(d);
  return g.cell_vertices[w.lex_index(d)];
}

/// Image cell of cell n under the counterclockwise rotation by 2*pi/3
/// (the rotation maps F_n K onto F_{rho(n)} K).
inline int rotate_cell(const GasketParams& params, const LevelGraph& g1, int n) {
  if (n < 0 || n >= params.d) throw std::domain_error("rotate_cell: bad cell");
  const auto& tri = g1.cell_vertices[static_cast<std::size_t>(n)];
  // Rot(F_n(q_i)) = F_{rho(n)}(q_{i+1}); match by the rotated q0-corner.
  const Point image = rotate_ccw(g1.vertices[static_cast<std::size_t>(tri[0])]);
  for (int c = 0; c < params.d; ++c) {
    const auto& cand = g1.cell_vertices[static_cast<std::size_t>(c)];
    if (g1.vertices[static_cast<std::size_t>(cand[1])] == image) return c;
  }
  throw std::logic_error("rotate_cell: rotation image not found");
}

/// Cell fixed by the reflection through q0 (swapping q1 and q2), or -1.
inline int reflection_fixed_cell(const LevelGraph& g1, const std::vector<int>& orbit) {
  for (int n : orbit) {
    const auto& tri = g1.cell_vertices[static_cast<std::size_t>(n)];
    const Point p0 = reflect_q0(g1.vertices[static_cast<std::size_t>(tri[0])]);
    // Reflection maps F_n(q0) to F_{sigma(n)}(q0): the q0-corner is preserved.
    if (g1.vertex_index.count(p0) &&
        g1.index_of(p0) == tri[0])
      return n;
  }
  return -1;
}

/// Rotation orbits of the d level-1 cells, each listed in counterclockwise
/// order. Orbits are sorted by their smallest cell index.
inline std::vector<std::vector<int>> rotation_orbits(const GasketParams& params) {
  LevelGraph g1 = build_level_graph(params, 1);
  std::vector<std::vector<int>> orbits;
  std::vector<bool> seen(static_cast<std::size_t>(params.d), false);
  for (int n = 0; n < params.d; ++n) {
    if (seen[static_cast<std::size_t>(n)]) continue;
    std::vector<int> orbit;
    int c = n;
    do {
      orbit.push_back(c);
      seen[static_cast<std::size_t>(c)] = true;
      c = rotate_cell(params, g1, c);
    } while (c != n);
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

/// Relabeling of our row-major cell indices into the symmetry-adapted
/// order: the three corner cells (at q0, q1, q2) first, then each rotation
/// orbit of inner cells starting from its reflection-symmetric member and
/// continuing counterclockwise. Entry p of the result is our index of the
/// p-th cell in that order. For SG_3 this is {0, 2, 5, 4, 3, 1}.
inline std::vector<int> symmetry_order_relabeling(const GasketParams& params) {
  LevelGraph g1 = build_level_graph(params, 1);
  std::vector<int> order = {params.corner_cell(0), params.corner_cell(1),
                            params.corner_cell(2)};
  for (const auto& orbit : rotation_orbits(params)) {
    if (std::find(orbit.begin(), orbit.end(), params.corner_cell(0)) != orbit.end())
      continue;  // the corner orbit is already listed
    if (orbit.size() == 1) {
      order.push_back(orbit[0]);  // middle cell, k = 3l+1
      continue;
    }
    int start = reflection_fixed_cell(g1, orbit);
    if (start < 0) start = orbit[0];
    auto pos = std::find(orbit.begin(), orbit.end(), start);
    for (std::size_t i = 0; i < orbit.size(); ++i)
      order.push_back(orbit[(static_cast<std::size_t>(pos - orbit.begin()) + i) % orbit.size()]);
  }
  return order;
}

}  // namespace sgk
