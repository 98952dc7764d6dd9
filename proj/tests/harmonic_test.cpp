#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "sgk/harmonic.hpp"

using namespace sgk;

namespace {

std::map<int, Rational> corner_bc(const LevelGraph& g, Rational a, Rational b, Rational c) {
  return {{g.boundary_ids[0], a}, {g.boundary_ids[1], b}, {g.boundary_ids[2], c}};
}

}  // namespace

TEST_CASE("Gamma_1 Dirichlet solve reproduces the 1/5-2/5 rule (k=2)") {
  GasketParams p = gasket_params(2);
  LevelGraph g = build_level_graph(p, 1);
  auto u = solve_dirichlet(g, corner_bc(g, Rational(1), Rational(0), Rational(0)));

  const int x01 = g.index_of(Point(Rational(1, 4), Rational(1, 4)));  // F_0(q2)
  const int x02 = g.index_of(Point(Rational(1, 2), Rational(0)));     // F_0(q1)
  const int far = g.index_of(Point(Rational(3, 4), Rational(1, 4)));  // opposite midpoint
  CHECK(u[static_cast<std::size_t>(x01)] == Rational(2, 5));
  CHECK(u[static_cast<std::size_t>(x02)] == Rational(2, 5));
  CHECK(u[static_cast<std::size_t>(far)] == Rational(1, 5));
}

TEST_CASE("Gamma_1 Dirichlet solve reproduces the 1/3-4/15-8/15 rule (k=3)") {
  GasketParams p = gasket_params(3);
  LevelGraph g = build_level_graph(p, 1);
  auto u = solve_dirichlet(g, corner_bc(g, Rational(1), Rational(0), Rational(0)));

  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(1, 3), Rational(0))))] == Rational(8, 15));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(1, 6), Rational(1, 6))))] == Rational(8, 15));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(2, 3), Rational(0))))] == Rational(4, 15));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(1, 3), Rational(1, 3))))] == Rational(4, 15));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(1, 2), Rational(1, 6))))] == Rational(1, 3));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(5, 6), Rational(1, 6))))] == Rational(1, 5));
  CHECK(u[static_cast<std::size_t>(g.index_of(Point(Rational(2, 3), Rational(1, 3))))] == Rational(1, 5));
}

TEST_CASE("constants are harmonic") {
  for (int k : {2, 3, 4}) {
    LevelGraph g = build_level_graph(gasket_params(k), 2);
    auto u = solve_dirichlet(g, corner_bc(g, Rational(7, 3), Rational(7, 3), Rational(7, 3)));
    for (const auto& v : u) CHECK(v == Rational(7, 3));
  }
}

TEST_CASE("extension tensor basics") {
  GasketParams p = gasket_params(2);
  HarmonicStructure hs = extension_tensor(p);

  Mat3Q expect;
  expect << Rational(1), Rational(0), Rational(0),
            Rational(2, 5), Rational(2, 5), Rational(1, 5),
            Rational(2, 5), Rational(1, 5), Rational(2, 5);
  CHECK(hs.B[0] == expect);
  CHECK(hs.gram0 == boundary_gram());
  CHECK(hs.r == Rational(3, 5));

  HarmonicStructure hs3 = extension_tensor(gasket_params(3));
  CHECK(hs3.p(0, 1, 0) == Rational(8, 15));
  CHECK(hs3.p(0, 1, 1) == Rational(4, 15));
  CHECK(hs3.p(0, 1, 2) == Rational(3, 15));
  CHECK(hs3.p(0, 0, 0) == Rational(1));  // F_0(q0) = q0
  CHECK(hs3.r == Rational(7, 15));
}

TEST_CASE("extension tensor is rotation covariant") {
  for (int k : {2, 3, 4}) {
    GasketParams p = gasket_params(k);
    HarmonicStructure hs = extension_tensor(p);
    LevelGraph g1 = build_level_graph(p, 1);
    for (int n = 0; n < p.d; ++n) {
      int rn = rotate_cell(p, g1, n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          CHECK(hs.p(rn, (i + 1) % 3, (j + 1) % 3) == hs.p(n, i, j));
    }
  }
}

TEST_CASE("renormalization constant, four routes") {
  const std::array<RenormMethod, 4> methods = {
      RenormMethod::kEnergyRatio, RenormMethod::kCornerEigenvalue,
      RenormMethod::kResistance, RenormMethod::kHittingTime};

  GasketParams p2 = gasket_params(2);
  for (auto m : methods) CHECK(renormalization_constant(p2, m) == Rational(3, 5));

  GasketParams p3 = gasket_params(3);
  for (auto m : methods) CHECK(renormalization_constant(p3, m) == Rational(7, 15));

  // Cross-method agreement is the oracle for k where no closed form is known,
  // plus the lower bound r_k > 2/(3k).
  for (int k = 2; k <= 8; ++k) {
    GasketParams p = gasket_params(k);
    Rational r = renormalization_constant(p, RenormMethod::kEnergyRatio);
    for (auto m : methods) CHECK(renormalization_constant(p, m) == r);
    CHECK(r > Rational(2, 3 * k));
    CHECK(r < Rational(1));
  }
}

TEST_CASE("energy ratio is independent of the boundary data") {
  GasketParams p = gasket_params(3);
  LevelGraph g1 = build_level_graph(p, 1);
  const Mat3Q g0 = boundary_gram();
  detail::KeyedRng rng(20240817ull, 0);
  int tested = 0;
  while (tested < 20) {
    Vec3Q h;
    for (int i = 0; i < 3; ++i)
      h(i) = Rational(static_cast<long>(rng.below(19)) - 9, static_cast<long>(rng.below(9)) + 1);
    if (h(0) == h(1) && h(1) == h(2)) continue;  // constants have zero energy
    auto ext = solve_dirichlet(
        g1, {{g1.boundary_ids[0], h(0)}, {g1.boundary_ids[1], h(1)}, {g1.boundary_ids[2], h(2)}});
    CHECK(detail::raw_edge_energy(g1, ext) / quad_form(g0, h) == Rational(7, 15));
    ++tested;
  }
}

TEST_CASE("return probability") {
  CHECK(return_probability(gasket_params(2)) == Rational(2, 5));
  CHECK(return_probability(gasket_params(3)) == Rational(8, 15));
  for (int k = 2; k <= 6; ++k) {
    GasketParams p = gasket_params(k);
    CHECK(return_probability(p) + renormalization_constant(p, RenormMethod::kEnergyRatio) ==
          Rational(1));
  }
}

TEST_CASE("expected hitting times") {
  CHECK(expected_hitting_time(gasket_params(2), 0) == Rational(2));
  CHECK(expected_hitting_time(gasket_params(2), 1) == Rational(10));
  CHECK(expected_hitting_time(gasket_params(3), 1) == Rational(180, 7));

  // Commute-time identity: R(q1,q2) = K/(2|E|) with K = 2H by symmetry,
  // so H = |E| * R on every level graph.
  for (int k : {2, 3}) {
    GasketParams p = gasket_params(k);
    for (int m = 0; m <= 1; ++m) {
      LevelGraph g = build_level_graph(p, m);
      const Rational res = effective_resistance(g, g.boundary_ids[1], g.boundary_ids[2]);
      CHECK(expected_hitting_time(p, m) == Rational(static_cast<long>(g.edges.size())) * res);
    }
  }
}

TEST_CASE("harmonic extension") {
  GasketParams p = gasket_params(2);
  HarmonicStructure hs = extension_tensor(p);

  SUBCASE("constant boundary extends to the constant") {
    LevelGraph g2 = build_level_graph(p, 2);
    Vec3Q ones;
    ones << Rational(1), Rational(1), Rational(1);
    for (const auto& v : extend_harmonic(hs, ones, g2)) CHECK(v == Rational(1));
  }

  SUBCASE("level-1 extension matches the Dirichlet solve") {
    LevelGraph g1 = build_level_graph(p, 1);
    Vec3Q e0;
    e0 << Rational(1), Rational(0), Rational(0);
    auto ext = extend_harmonic(hs, e0, g1);
    auto dir = solve_dirichlet(g1, corner_bc(g1, Rational(1), Rational(0), Rational(0)));
    CHECK(ext == dir);
  }

  SUBCASE("cell values equal B_n * boundary") {
    LevelGraph g1 = build_level_graph(p, 1);
    Vec3Q h;
    h << Rational(2), Rational(-1, 3), Rational(5, 7);
    auto ext = extend_harmonic(hs, h, g1);
    for (int n = 0; n < p.d; ++n) {
      Vec3Q v = hs.B[static_cast<std::size_t>(n)] * h;
      const auto& tri = g1.cell_vertices[static_cast<std::size_t>(n)];
      for (int i = 0; i < 3; ++i)
        CHECK(ext[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])] == v(i));
    }
  }

  SUBCASE("renormalized energy is constant in the level") {
    Vec3Q e0;
    e0 << Rational(1), Rational(0), Rational(0);
    for (int m = 0; m <= 3; ++m) {
      LevelGraph g = build_level_graph(p, m);
      auto ext = extend_harmonic(hs, e0, g);
      CHECK(pow(Rational(5, 3), m) * detail::raw_edge_energy(g, ext) == Rational(2));
    }
  }
}

TEST_CASE("monte carlo walk statistics") {
  GasketParams p = gasket_params(2);

  WalkStats s1 = monte_carlo_walk(p, WalkTarget::kReturnProbability, 200000, 42);
  WalkStats s2 = monte_carlo_walk(p, WalkTarget::kReturnProbability, 200000, 42);
  CHECK(s1.estimate == s2.estimate);
  CHECK(s1.standard_error == s2.standard_error);
  CHECK(std::abs(s1.estimate - 0.4) <= 4.0 * s1.standard_error);

  // Thread count must not change the result.
  WalkStats s4 = monte_carlo_walk(p, WalkTarget::kReturnProbability, 200000, 42, 4);
  CHECK(s4.estimate == s1.estimate);

  WalkStats h = monte_carlo_walk(p, WalkTarget::kHittingTime, 100000, 7);
  CHECK(std::abs(h.estimate - 10.0) <= 4.0 * h.standard_error);

  WalkStats h3 = monte_carlo_walk(gasket_params(3), WalkTarget::kHittingTime, 100000, 7);
  CHECK(std::abs(h3.estimate - 180.0 / 7.0) <= 4.0 * h3.standard_error);

  CHECK_THROWS_AS(monte_carlo_walk(p, WalkTarget::kHittingTime, 0, 1), std::domain_error);
}
