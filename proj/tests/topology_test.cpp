#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "sgk/topology.hpp"

using namespace sgk;

TEST_CASE("gasket parameters") {
  GasketParams p2 = gasket_params(2);
  CHECK(p2.d == 3);
  CHECK(p2.hausdorff_dim == doctest::Approx(1.5849625007).epsilon(1e-9));

  GasketParams p3 = gasket_params(3);
  CHECK(p3.d == 6);
  CHECK(p3.hausdorff_dim == doctest::Approx(1.6309297536).epsilon(1e-9));

  CHECK_THROWS_AS(gasket_params(1), std::domain_error);
  CHECK_THROWS_AS(gasket_params(0), std::domain_error);
}

TEST_CASE("corner cells contain the boundary corners") {
  for (int k = 2; k <= 6; ++k) {
    GasketParams p = gasket_params(k);
    const auto& q = unit_corners();
    // F_i(q_i-corner) fixes the matching corner of the unit triangle.
    for (int c = 0; c < 3; ++c) {
      Word w({p.corner_cell(c)});
      AffineMap f = affine_map_of_word(p, w);
      CHECK(f(q[static_cast<std::size_t>(c)]) == q[static_cast<std::size_t>(c)]);
    }
  }
}

TEST_CASE("affine maps of words") {
  GasketParams p = gasket_params(2);

  AffineMap id = affine_map_of_word(p, Word{});
  CHECK(id.scale == Rational(1));
  CHECK(id.shift == Point(Rational(0), Rational(0)));

  AffineMap f0 = affine_map_of_word(p, Word{0});
  CHECK(f0(unit_corners()[0]) == Point(Rational(0), Rational(0)));

  // Composed by hand: F_0(F_1(q0)) = F_0((1/2,0)) = (1/4, 0).
  AffineMap f01 = affine_map_of_word(p, Word{0, 1});
  CHECK(f01.scale == Rational(1, 4));
  CHECK(f01(unit_corners()[0]) == Point(Rational(1, 4), Rational(0)));

  CHECK_THROWS_AS(affine_map_of_word(p, Word{3}), std::domain_error);
}

TEST_CASE("level graphs: SG_2 Gamma_1") {
  GasketParams p = gasket_params(2);
  LevelGraph g = build_level_graph(p, 1);
  CHECK(g.n_vertices() == 6);
  CHECK(g.edges.size() == 9);
  for (int b : g.boundary_ids) CHECK(g.degree[static_cast<std::size_t>(b)] == 2);
  int deg4 = 0;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (!g.is_boundary(v)) {
      CHECK(g.degree[static_cast<std::size_t>(v)] == 4);
      ++deg4;
    }
  CHECK(deg4 == 3);
}

TEST_CASE("level graphs: SG_3 Gamma_1") {
  GasketParams p = gasket_params(3);
  LevelGraph g = build_level_graph(p, 1);
  CHECK(g.n_vertices() == 10);
  CHECK(g.edges.size() == 18);
  int deg6 = 0;
  for (int v = 0; v < g.n_vertices(); ++v)
    if (g.degree[static_cast<std::size_t>(v)] == 6) ++deg6;
  CHECK(deg6 == 1);
  // The degree-6 vertex is the center (1/2, sqrt(3)/6).
  CHECK(g.degree[static_cast<std::size_t>(g.index_of(Point(Rational(1, 2), Rational(1, 6))))] == 6);
}

TEST_CASE("Gamma_0 is the boundary triangle") {
  for (int k : {2, 3, 4}) {
    LevelGraph g = build_level_graph(gasket_params(k), 0);
    CHECK(g.n_vertices() == 3);
    CHECK(g.edges.size() == 3);
    for (int v = 0; v < 3; ++v) CHECK(g.degree[static_cast<std::size_t>(v)] == 2);
  }
}

TEST_CASE("vertex census formula") {
  GasketParams p2 = gasket_params(2);
  CHECK(vertex_census(p2, 0) == Rational(3));
  CHECK(vertex_census(p2, 2) == Rational(15));
  CHECK(vertex_census(gasket_params(3), 1) == Rational(10));

  // Against constructed graphs for all k <= 6, m <= 4 (graph sizes permitting).
  for (int k = 2; k <= 6; ++k) {
    GasketParams p = gasket_params(k);
    for (int m = 0; m <= 4; ++m) {
      LevelGraph g = build_level_graph(p, m, 250000);
      CHECK(Rational(g.n_vertices()) == vertex_census(p, m));
      CHECK(g.edges.size() == 3 * g.n_cells());
    }
  }
}

TEST_CASE("degree profile and edge partition") {
  for (int k : {2, 3, 4}) {
    GasketParams p = gasket_params(k);
    for (int m = 1; m <= 3; ++m) {
      LevelGraph g = build_level_graph(p, m);
      int deg2 = 0;
      for (int v = 0; v < g.n_vertices(); ++v) {
        int deg = g.degree[static_cast<std::size_t>(v)];
        CHECK((deg == 2 || deg == 4 || deg == 6));
        CHECK(deg == 2 * static_cast<int>(g.vertex_cells[static_cast<std::size_t>(v)].size()));
        if (deg == 2) ++deg2;
      }
      CHECK(deg2 == 3);
      // Cell triples partition the edge multiset: 3 d^m distinct edges.
      std::set<std::pair<int, int>> uniq(g.edges.begin(), g.edges.end());
      CHECK(uniq.size() == g.edges.size());
      CHECK(g.edges.size() == 3 * g.n_cells());
    }
  }
}

TEST_CASE("cell vertex triples") {
  GasketParams p2 = gasket_params(2);
  LevelGraph g = build_level_graph(p2, 1);
  auto tri = cell_vertex_triple(g, Word{0});
  CHECK(g.vertices[static_cast<std::size_t>(tri[0])] == Point(Rational(0), Rational(0)));
  CHECK(g.vertices[static_cast<std::size_t>(tri[1])] == Point(Rational(1, 2), Rational(0)));
  CHECK(g.vertices[static_cast<std::size_t>(tri[2])] == Point(Rational(1, 4), Rational(1, 4)));

  GasketParams p3 = gasket_params(3);
  LevelGraph g3 = build_level_graph(p3, 1);
  auto tri3 = cell_vertex_triple(g3, Word{1});
  CHECK(g3.vertices[static_cast<std::size_t>(tri3[0])] == Point(Rational(1, 3), Rational(0)));

  // Composition order at level 2: the cell of w is F_{w_1} o F_{w_2} (K).
  LevelGraph g2 = build_level_graph(p2, 2);
  for (const Word& w : {Word{0, 1}, Word{1, 2}, Word{2, 0}}) {
    auto t = cell_vertex_triple(g2, w);
    AffineMap f = affine_map_of_word(p2, w);
    for (int i = 0; i < 3; ++i)
      CHECK(g2.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])] ==
            f(unit_corners()[static_cast<std::size_t>(i)]));
  }

  CHECK_THROWS_AS(cell_vertex_triple(g, Word{0, 1}), std::domain_error);
}

TEST_CASE("depth cap refusal") {
  GasketParams p = gasket_params(3);
  CHECK_THROWS_AS(build_level_graph(p, 7), std::domain_error);
  CHECK_THROWS_AS(build_level_graph(p, 3, 100), std::domain_error);
}

TEST_CASE("rotation structure of the cell family") {
  // SG_3: corner cells rotate 0 -> 2 -> 5, inner cells 1 -> 4 -> 3.
  GasketParams p3 = gasket_params(3);
  LevelGraph g1 = build_level_graph(p3, 1);
  CHECK(rotate_cell(p3, g1, 0) == 2);
  CHECK(rotate_cell(p3, g1, 2) == 5);
  CHECK(rotate_cell(p3, g1, 5) == 0);
  CHECK(rotate_cell(p3, g1, 1) == 4);
  CHECK(rotate_cell(p3, g1, 4) == 3);
  CHECK(rotate_cell(p3, g1, 3) == 1);

  CHECK(symmetry_order_relabeling(p3) == std::vector<int>{0, 2, 5, 4, 3, 1});
  CHECK(symmetry_order_relabeling(gasket_params(2)) == std::vector<int>{0, 1, 2});

  // k = 4 has a rotation-invariant middle cell.
  GasketParams p4 = gasket_params(4);
  auto orbits = rotation_orbits(p4);
  int singletons = 0;
  for (const auto& o : orbits) singletons += o.size() == 1 ? 1 : 0;
  CHECK(singletons == 1);
}
