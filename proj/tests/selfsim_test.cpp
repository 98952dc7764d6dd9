#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sgk/selfsim.hpp"

using namespace sgk;

namespace {

Mat3Q scaled(long den, std::initializer_list<long> entries) {
  Mat3Q m;
  auto it = entries.begin();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = Rational(*it++, den);
  return m;
}

}  // namespace

TEST_CASE("M matrices for SG_2") {
  HarmonicStructure hs = extension_tensor(gasket_params(2));
  MMatrixFamily mm = m_matrices(hs);

  Mat3Q expect;
  expect << Rational(3, 5), Rational(0), Rational(0),
            Rational(2, 15), Rational(2, 15), Rational(-1, 15),
            Rational(2, 15), Rational(-1, 15), Rational(2, 15);
  CHECK(mm.M[0] == expect);

  // Column sums 13/15, 1/15, 1/15 give the weights 1/15 + (12/15) R_i.
  CHECK(mm.S[0] == Vec3Q(Rational(13, 15), Rational(1, 15), Rational(1, 15)));
  for (int n = 0; n < 3; ++n)
    for (int i = 0; i < 3; ++i)
      CHECK(mm.S[static_cast<std::size_t>(n)](i) ==
            Rational(1, 15) + Rational(12, 15) * Rational(i == n ? 1 : 0));
}

TEST_CASE("SG_3 family reproduces the reference matrices under relabeling") {
  GasketParams p = gasket_params(3);
  HarmonicStructure hs = extension_tensor(p);
  MMatrixFamily mm = m_matrices(hs);

  const std::vector<Mat3Q> reference = {
      scaled(105, {49, 0, 0, 12, 4, -3, 12, -3, 4}),
      scaled(105, {4, 12, -3, 0, 49, 0, -3, 12, 4}),
      scaled(105, {4, -3, 12, -3, 4, 12, 0, 0, 49}),
      scaled(105, {4, 0, 0, -3, 12, 4, -3, 4, 12}),
      scaled(105, {12, -3, 4, 0, 4, 0, 4, -3, 12}),
      scaled(105, {12, 4, -3, 4, 12, -3, 0, 0, 4}),
  };
  const std::vector<int> relabel = symmetry_order_relabeling(p);
  REQUIRE(relabel == std::vector<int>{0, 2, 5, 4, 3, 1});
  for (int pi = 0; pi < 6; ++pi)
    CHECK(mm.M[static_cast<std::size_t>(relabel[static_cast<std::size_t>(pi)])] ==
          reference[static_cast<std::size_t>(pi)]);
}

TEST_CASE("sum of M matrices fixes the constant vector") {
  for (int k = 2; k <= 6; ++k) {
    MMatrixFamily mm = m_matrices(extension_tensor(gasket_params(k)));
    Vec3Q ones(Rational(1), Rational(1), Rational(1));
    Mat3Q total = Mat3Q::Zero();
    for (const auto& m : mm.M) total += m;
    CHECK(Vec3Q(total * ones) == ones);
  }
}

TEST_CASE("rotational covariance of the family") {
  for (int k : {2, 3, 4}) {
    GasketParams p = gasket_params(k);
    HarmonicStructure hs = extension_tensor(p);
    MMatrixFamily mm = m_matrices(hs);
    LevelGraph g1 = build_level_graph(p, 1);
    for (int n = 0; n < p.d; ++n) {
      const int rn = rotate_cell(p, g1, n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          CHECK(mm.M[static_cast<std::size_t>(rn)]((i + 1) % 3, (j + 1) % 3) ==
                mm.M[static_cast<std::size_t>(n)](i, j));
    }
  }
}

TEST_CASE("mixed energy measures satisfy the polarization relations") {
  // nu_{h0,h1} = (-nu_0 - nu_1 + nu_2)/2 and its rotations, at cylinder
  // resolution: the bilinear cell energy r^{-m} (B_w e_i)^T G (B_w e_j)
  // against the diagonal vector entries.
  for (int k : {2, 3}) {
    HarmonicStructure hs = extension_tensor(gasket_params(k));
    std::vector<Word> words = {Word{}, Word{0}, Word{k}, Word{0, 1}, Word{1, 0, 2}};
    for (const Word& w : words) {
      const Mat3Q bw = hs.restriction(w);
      const Rational scale = pow(Rational(1) / hs.r, w.size());
      const Vec3Q nu = energy_cell_vector(hs, w).nu;
      auto mixed = [&](int i, int j) {
        return scale * dot_q(bw.col(i), hs.gram0 * bw.col(j));
      };
      CHECK(mixed(0, 1) == (-nu(0) - nu(1) + nu(2)) / Rational(2));
      CHECK(mixed(0, 2) == (-nu(0) + nu(1) - nu(2)) / Rational(2));
      CHECK(mixed(1, 2) == (nu(0) - nu(1) - nu(2)) / Rational(2));
    }
  }
}

TEST_CASE("transport and additivity along seeded random deep words") {
  for (int k : {2, 3}) {
    GasketParams params = gasket_params(k);
    HarmonicStructure hs = extension_tensor(params);
    MMatrixFamily mm = m_matrices(hs);
    EnergyCoordinates ec = energy_orthobasis(hs);
    detail::KeyedRng rng(808, static_cast<std::uint64_t>(k));
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> syms;
      const int len = 1 + static_cast<int>(rng.below(10));
      for (int i = 0; i < len; ++i)
        syms.push_back(static_cast<int>(rng.below(static_cast<std::uint32_t>(params.d))));
      const Word w{Word(syms)};
      const MeasureVector mv = energy_cell_vector(hs, w);

      // Transport by every cell matrix.
      for (int i = 0; i < params.d; ++i)
        CHECK(energy_cell_vector(hs, prepend(i, w)).nu ==
              Vec3Q(mm.M[static_cast<std::size_t>(i)] * mv.nu));

      // Children sum to the parent.
      Vec3Q sum = Vec3Q::Zero();
      for (int n = 0; n < params.d; ++n) sum += energy_cell_vector(hs, w * Word{n}).nu;
      CHECK(sum == mv.nu);

      // Float route agrees.
      CHECK(std::abs(kusuoka_cylinder(ec, w) - mv.prob().to_double()) < 1e-10);
    }
  }
}

TEST_CASE("vector identity: transported equals direct") {
  // M_0 (2,2,2)^T must equal the direct energy vector of cell 0.
  HarmonicStructure hs2 = extension_tensor(gasket_params(2));
  MMatrixFamily mm2 = m_matrices(hs2);
  Vec3Q root(Rational(2), Rational(2), Rational(2));
  CHECK(Vec3Q(mm2.M[0] * root) == energy_cell_vector(hs2, Word{0}).nu);

  CHECK(verify_vector_identity(hs2, mm2, 3).ok);

  HarmonicStructure hs3 = extension_tensor(gasket_params(3));
  CHECK(verify_vector_identity(hs3, m_matrices(hs3), 3).ok);

  HarmonicStructure hs4 = extension_tensor(gasket_params(4));
  CHECK(verify_vector_identity(hs4, m_matrices(hs4), 2).ok);
}

TEST_CASE("weights_q") {
  HarmonicStructure hs3 = extension_tensor(gasket_params(3));
  MMatrixFamily mm3 = m_matrices(hs3);

  // SG_3: Q_j = (1 + 72 R_j)/105 on corner cells, (16 - 18 R_{j'})/105 on
  // inner cells, in our labeling 0,2,5 corners and 4,3,1 the rotation orbit.
  Vec3Q rn(Rational(1, 2), Rational(1, 3), Rational(1, 6));
  VecXQ q = weights_q(mm3, rn);
  CHECK(q(0) == (Rational(1) + Rational(72) * rn(0)) / Rational(105));
  CHECK(q(2) == (Rational(1) + Rational(72) * rn(1)) / Rational(105));
  CHECK(q(5) == (Rational(1) + Rational(72) * rn(2)) / Rational(105));
  CHECK(q(4) == (Rational(16) - Rational(18) * rn(0)) / Rational(105));
  CHECK(q(3) == (Rational(16) - Rational(18) * rn(1)) / Rational(105));
  CHECK(q(1) == (Rational(16) - Rational(18) * rn(2)) / Rational(105));

  // Sum over j is 1 for any probability vector.
  Rational total(0);
  for (Eigen::Index j = 0; j < q.size(); ++j) total += q(j);
  CHECK(total == Rational(1));

  // Symmetric point for SG_2: every weight is 1/3.
  MMatrixFamily mm2 = m_matrices(extension_tensor(gasket_params(2)));
  Vec3Q sym(Rational(1, 3), Rational(1, 3), Rational(1, 3));
  VecXQ q2 = weights_q(mm2, sym);
  for (Eigen::Index j = 0; j < q2.size(); ++j) CHECK(q2(j) == Rational(1, 3));

  CHECK_THROWS_AS(weights_q(mm2, Vec3Q(Rational(1), Rational(1), Rational(1))),
                  std::domain_error);
}

TEST_CASE("weighted identity at cylinder resolution") {
  HarmonicStructure hs2 = extension_tensor(gasket_params(2));
  MMatrixFamily mm2 = m_matrices(hs2);

  // Worked ratio: nu([00]) / nu([0]) = 41/75 = 1/15 + (12/15)(3/5).
  const Rational ratio =
      energy_cell_vector(hs2, Word{0, 0}).prob() / energy_cell_vector(hs2, Word{0}).prob();
  CHECK(ratio == Rational(41, 75));
  CHECK(ratio == Rational(1, 15) + Rational(12, 15) * Rational(3, 5));

  CHECK(weighted_identity_check(hs2, mm2, 3).ok);
  HarmonicStructure hs3 = extension_tensor(gasket_params(3));
  CHECK(weighted_identity_check(hs3, m_matrices(hs3), 2).ok);
}

TEST_CASE("iterated weights telescope") {
  for (int k : {2, 3}) {
    HarmonicStructure hs = extension_tensor(gasket_params(k));
    MMatrixFamily mm = m_matrices(hs);

    // Single letters reduce to the one-step ratio.
    for (int n = 0; n < hs.params.d; ++n)
      for (const Word& u : {Word{}, Word{0}, Word{1, 0}})
        CHECK(q_word_product(hs, mm, Word{n}, u) ==
              energy_cell_vector(hs, Word{n} * u).total_std() /
                  energy_cell_vector(hs, u).total_std());

    // q_word_product(w, u) = nu_std(w.u) / nu_std(u) for |w| + |u| <= 4.
    std::vector<Word> words = {Word{}, Word{0}, Word{1}, Word{0, 1}, Word{1, 1, 0}};
    for (const Word& w : words) {
      if (w.empty()) continue;
      for (const Word& u : words) {
        if (w.size() + u.size() > 4) continue;
        CHECK(q_word_product(hs, mm, w, u) ==
              energy_cell_vector(hs, w * u).total_std() /
                  energy_cell_vector(hs, u).total_std());
      }
    }
  }

  HarmonicStructure hs2 = extension_tensor(gasket_params(2));
  MMatrixFamily mm2 = m_matrices(hs2);
  CHECK(q_word_product(hs2, mm2, Word{0, 0}, Word{}) == Rational(41, 225));
  CHECK_THROWS_AS(q_word_product(hs2, mm2, Word{}, Word{0}), std::domain_error);
}

TEST_CASE("laplacian scaling experiment") {
  SUBCASE("middle cell of SG_4 needs no Radon-Nikodym factor") {
    GasketParams p4 = gasket_params(4);
    HarmonicStructure hs4 = extension_tensor(p4);
    MMatrixFamily mm4 = m_matrices(hs4);

    // Find the rotation-fixed middle cell.
    LevelGraph g1 = build_level_graph(p4, 1);
    int middle = -1;
    for (int n = 0; n < p4.d; ++n)
      if (rotate_cell(p4, g1, n) == n) middle = n;
    REQUIRE(middle >= 0);

    // All column sums of the middle cell agree, and the tabulated constant
    // (1/2) E(h_1 o F_c) equals r Q_c exactly.
    const Vec3Q s = mm4.S[static_cast<std::size_t>(middle)];
    CHECK(s(0) == s(1));
    CHECK(s(1) == s(2));
    Vec3Q h1(Rational(0), Rational(1), Rational(0));
    Vec3Q restricted = hs4.B[static_cast<std::size_t>(middle)] * h1;
    CHECK(quad_form(hs4.gram0, restricted) == Rational(2) * hs4.r * s(0));

    ScalingReport rep =
        laplacian_scaling_experiment(hs4, mm4, middle, JunctionPoint{Word{0}, 1}, 6);
    CHECK(rep.middle_cell);
    // Constant right side. The middle-cell restriction acts on harmonics
    // modulo constants as a scalar times an orthogonal map, so the left
    // side is that same constant at every level, not merely in the limit.
    for (std::size_t i = 1; i < rep.rhs.size(); ++i) CHECK(rep.rhs[i] == rep.rhs[0]);
    for (double dev : rep.deviation) CHECK(dev < 1e-12);
  }

  SUBCASE("k=2 corner cell: deviations shrink with resolution") {
    GasketParams p2 = gasket_params(2);
    HarmonicStructure hs2 = extension_tensor(p2);
    MMatrixFamily mm2 = m_matrices(hs2);
    ScalingReport rep =
        laplacian_scaling_experiment(hs2, mm2, 0, JunctionPoint{Word{1}, 2}, 10);
    CHECK_FALSE(rep.middle_cell);
    CHECK(rep.deviation.back() < rep.deviation.front());
    CHECK(rep.deviation.back() < 1e-2);
  }

  SUBCASE("cell out of range") {
    HarmonicStructure hs2 = extension_tensor(gasket_params(2));
    MMatrixFamily mm2 = m_matrices(hs2);
    CHECK_THROWS_AS(
        laplacian_scaling_experiment(hs2, mm2, 9, JunctionPoint{Word{0}, 1}, 3),
        std::domain_error);
  }
}
