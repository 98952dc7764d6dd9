#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sgk/mixing.hpp"
#include "sgk/selfsim.hpp"

namespace sgk::verify {

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;  // witness or measured value
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

namespace detail {

inline void check(SuiteResult& out, const std::string& name,
                  const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult c;
  c.name = name;
  try {
    auto [ok, detail] = body();
    c.ok = ok;
    c.detail = detail;
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  out.checks.push_back(std::move(c));
}

}  // namespace detail

inline SuiteResult harmonic_suite(int k) {
  SuiteResult out;
  out.suite = "harmonic";
  const GasketParams params = gasket_params(k);
  const HarmonicStructure hs = extension_tensor(params);

  detail::check(out, "renormalization constant, four-way exact agreement", [&] {
    const Rational r = renormalization_constant(params, RenormMethod::kEnergyRatio);
    for (auto m : {RenormMethod::kCornerEigenvalue, RenormMethod::kResistance,
                   RenormMethod::kHittingTime})
      if (renormalization_constant(params, m) != r) return std::pair(false, std::string("methods disagree"));
    return std::pair(true, "r = " + r.str());
  });

  detail::check(out, "lower bound r > 2/(3k)", [&] {
    return std::pair(hs.r > Rational(2, 3 * k), hs.r.str() + " vs " + Rational(2, 3 * k).str());
  });

  detail::check(out, "r = 1 - return probability", [&] {
    return std::pair(return_probability(params) + hs.r == Rational(1),
                     "p = " + return_probability(params).str());
  });

  detail::check(out, "energy ratio independent of boundary data", [&] {
    LevelGraph g1 = build_level_graph(params, 1);
    sgk::detail::KeyedRng rng(7, 0);
    for (int trial = 0; trial < 20;) {
      Vec3Q h;
      for (int i = 0; i < 3; ++i)
        h(i) = Rational(static_cast<long>(rng.below(19)) - 9,
                        static_cast<long>(rng.below(9)) + 1);
      if (h(0) == h(1) && h(1) == h(2)) continue;
      auto ext = solve_dirichlet(g1, {{g1.boundary_ids[0], h(0)},
                                      {g1.boundary_ids[1], h(1)},
                                      {g1.boundary_ids[2], h(2)}});
      if (sgk::detail::raw_edge_energy(g1, ext) / quad_form(hs.gram0, h) != hs.r)
        return std::pair(false, std::string("trial ") + std::to_string(trial));
      ++trial;
    }
    return std::pair(true, std::string("20 random boundary triples"));
  });

  detail::check(out, "extension tensor row-stochastic and rotation covariant", [&] {
    LevelGraph g1 = build_level_graph(params, 1);
    for (int n = 0; n < params.d; ++n) {
      const int rn = rotate_cell(params, g1, n);
      for (int i = 0; i < 3; ++i) {
        Rational row(0);
        for (int j = 0; j < 3; ++j) {
          row += hs.p(n, i, j);
          if (hs.p(rn, (i + 1) % 3, (j + 1) % 3) != hs.p(n, i, j))
            return std::pair(false, "rotation mismatch at cell " + std::to_string(n));
        }
        if (row != Rational(1)) return std::pair(false, "row sum at cell " + std::to_string(n));
      }
    }
    return std::pair(true, std::to_string(params.d) + " cells");
  });

  detail::check(out, "harmonic extension energy is conserved per level", [&] {
    Vec3Q e0(Rational(1), Rational(0), Rational(0));
    for (int m = 0; m <= 3; ++m) {
      LevelGraph g = build_level_graph(params, m);
      auto ext = extend_harmonic(hs, e0, g);
      if (pow(Rational(1) / hs.r, m) * sgk::detail::raw_edge_energy(g, ext) != Rational(2))
        return std::pair(false, "level " + std::to_string(m));
    }
    return std::pair(true, std::string("levels 0..3"));
  });

  return out;
}

inline SuiteResult measures_suite(int k, int depth) {
  SuiteResult out;
  out.suite = "measures";
  const HarmonicStructure hs = extension_tensor(gasket_params(k));
  const EnergyCoordinates ec = energy_orthobasis(hs);

  detail::check(out, "additivity: children sum to the parent, exact", [&] {
    Word path;
    bool ok = true;
    std::string witness;
    auto recurse = [&](auto&& self, int len) -> void {
      if (!ok) return;
      Vec3Q sum = Vec3Q::Zero();
      for (int n = 0; n < hs.params.d; ++n)
        sum += energy_cell_vector(hs, path * Word{n}).nu;
      if (sum != energy_cell_vector(hs, path).nu) {
        ok = false;
        witness = path.str();
        return;
      }
      if (len >= depth - 1) return;
      for (int s = 0; s < hs.params.d; ++s) {
        path.append(s);
        self(self, len + 1);
        path = path.prefix(len);
      }
    };
    recurse(recurse, 0);
    return std::pair(ok, ok ? "words to depth " + std::to_string(depth) : "word '" + witness + "'");
  });

  detail::check(out, "cross-route consistency (float vs exact) within 1e-10", [&] {
    double worst = 0.0;
    Word path;
    auto recurse = [&](auto&& self, int len) -> void {
      worst = std::max(worst, std::abs(kusuoka_cylinder(ec, path) -
                                       energy_cell_vector(hs, path).prob().to_double()));
      if (len == depth) return;
      for (int s = 0; s < hs.params.d; ++s) {
        path.append(s);
        self(self, len + 1);
        path = path.prefix(len);
      }
    };
    recurse(recurse, 0);
    std::ostringstream os;
    os << "max deviation " << worst;
    return std::pair(worst < 1e-10, os.str());
  });

  detail::check(out, "partition identity within 1e-12", [&] {
    double worst = 0.0;
    for (int m = 1; m <= std::min(depth, 4); ++m)
      worst = std::max(worst, partition_identity_check(ec, m));
    std::ostringstream os;
    os << "max deviation " << worst;
    return std::pair(worst < 1e-12, os.str());
  });

  detail::check(out, "decay of cylinder maxima", [&] {
    const int m_max = k == 2 ? 12 : std::min(depth, 6);
    auto rows = decay_scan(hs, m_max);
    if (k != 2) {
      std::ostringstream os;
      os << "exploratory (k != 2): max scaled value " << rows.back().scaled.to_double();
      return std::pair(true, os.str());
    }
    for (const auto& row : rows) {
      if (!(row.scaled > Rational(1, 2) && row.scaled <= Rational(5, 9)))
        return std::pair(false, "level " + std::to_string(row.level));
      if (!row.argmax.is_constant())
        return std::pair(false, "argmax '" + row.argmax.str() + "' not constant");
    }
    return std::pair(true, "levels 1.." + std::to_string(m_max) +
                               ", scaled sup = " + rows.front().scaled.str());
  });

  return out;
}

inline SuiteResult selfsim_suite(int k, int depth) {
  SuiteResult out;
  out.suite = "selfsim";
  const GasketParams params = gasket_params(k);
  const HarmonicStructure hs = extension_tensor(params);
  const MMatrixFamily mm = m_matrices(hs);

  detail::check(out, "vector identity, exact to depth " + std::to_string(depth), [&] {
    IdentityReport rep = verify_vector_identity(hs, mm, depth);
    return std::pair(rep.ok, rep.ok ? "no violations" : rep.detail);
  });

  detail::check(out, "weighted identity, exact to depth " + std::to_string(depth), [&] {
    IdentityReport rep = weighted_identity_check(hs, mm, depth);
    return std::pair(rep.ok, rep.ok ? "no violations" : rep.detail);
  });

  detail::check(out, "sum of matrices fixes (1,1,1)", [&] {
    Mat3Q total = Mat3Q::Zero();
    for (const auto& m : mm.M) total += m;
    Vec3Q ones(Rational(1), Rational(1), Rational(1));
    return std::pair(Vec3Q(total * ones) == ones, std::string());
  });

  detail::check(out, "weights sum to 1 on random probability vectors", [&] {
    sgk::detail::KeyedRng rng(11, 3);
    for (int trial = 0; trial < 5; ++trial) {
      Rational a(static_cast<long>(rng.below(7)) + 1, 16);
      Rational b(static_cast<long>(rng.below(7)) + 1, 16);
      Vec3Q rn(a, b, Rational(1) - a - b);
      VecXQ q = weights_q(mm, rn);
      Rational total(0);
      for (Eigen::Index j = 0; j < q.size(); ++j) total += q(j);
      if (total != Rational(1)) return std::pair(false, "trial " + std::to_string(trial));
    }
    return std::pair(true, std::string("5 random vectors"));
  });

  detail::check(out, "rotational covariance of the family", [&] {
    LevelGraph g1 = build_level_graph(params, 1);
    for (int n = 0; n < params.d; ++n) {
      const int rn = rotate_cell(params, g1, n);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (mm.M[static_cast<std::size_t>(rn)]((i + 1) % 3, (j + 1) % 3) !=
              mm.M[static_cast<std::size_t>(n)](i, j))
            return std::pair(false, "cell " + std::to_string(n));
    }
    return std::pair(true, std::string());
  });

  if (k == 3) {
    detail::check(out, "reference SG_3 matrices under relabeling {0,2,5,4,3,1}", [&] {
      const std::vector<int> relabel = symmetry_order_relabeling(params);
      if (relabel != std::vector<int>{0, 2, 5, 4, 3, 1})
        return std::pair(false, std::string("unexpected relabeling"));
      auto scaled = [](std::initializer_list<long> entries) {
        Mat3Q m;
        auto it = entries.begin();
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) m(i, j) = Rational(*it++, 105);
        return m;
      };
      const std::vector<Mat3Q> reference = {
          scaled({49, 0, 0, 12, 4, -3, 12, -3, 4}),
          scaled({4, 12, -3, 0, 49, 0, -3, 12, 4}),
          scaled({4, -3, 12, -3, 4, 12, 0, 0, 49}),
          scaled({4, 0, 0, -3, 12, 4, -3, 4, 12}),
          scaled({12, -3, 4, 0, 4, 0, 4, -3, 12}),
          scaled({12, 4, -3, 4, 12, -3, 0, 0, 4}),
      };
      for (int p = 0; p < 6; ++p)
        if (mm.M[static_cast<std::size_t>(relabel[static_cast<std::size_t>(p)])] !=
            reference[static_cast<std::size_t>(p)])
          return std::pair(false, "matrix " + std::to_string(p));
      return std::pair(true, std::string("all six match"));
    });
  }

  detail::check(out, "iterated weights telescope", [&] {
    for (const Word& w : {Word{0}, Word{0, 1}})
      for (const Word& u : {Word{}, Word{1}, Word{0, 1}})
        if (q_word_product(hs, mm, w, u) !=
            energy_cell_vector(hs, w * u).total_std() / energy_cell_vector(hs, u).total_std())
          return std::pair(false, "w='" + w.str() + "' u='" + u.str() + "'");
    return std::pair(true, std::string());
  });

  return out;
}

inline SuiteResult laplacian_suite(int k, int depth) {
  SuiteResult out;
  out.suite = "laplacian";
  const GasketParams params = gasket_params(k);
  const HarmonicStructure hs = extension_tensor(params);

  detail::check(out, "harmonic functions are graph-harmonic at every junction", [&] {
    for (int m = 1; m <= depth; ++m) {
      LevelGraph g = build_level_graph(params, m);
      auto u = extend_harmonic(hs, Vec3Q(Rational(1), Rational(-1, 2), Rational(0)), g);
      for (int x = 0; x < g.n_vertices(); ++x)
        if (!g.is_boundary(x) && graph_laplacian_value(g, u, x) != Rational(0))
          return std::pair(false, "level " + std::to_string(m));
    }
    return std::pair(true, "levels 1.." + std::to_string(depth));
  });

  detail::check(out, "energy estimator of h1^2+h2^2 is exactly 2 everywhere", [&] {
    const HarmonicForm pair = HarmonicForm::energy_pair_square();
    for (int m = 1; m <= depth; ++m) {
      LevelGraph g = build_level_graph(params, m);
      auto u = pair.grid_values(hs, g);
      for (int x = 0; x < g.n_vertices(); ++x) {
        if (g.is_boundary(x)) continue;
        Rational defect(0);
        for (int y : g.adjacency[static_cast<std::size_t>(x)])
          defect += u[static_cast<std::size_t>(y)] - u[static_cast<std::size_t>(x)];
        if (defect <= Rational(0))
          return std::pair(false, "nonpositive denominator at level " + std::to_string(m));
      }
    }
    // The local-chain estimator agrees and returns the constant 2.
    for (const JunctionPoint& x : {JunctionPoint{Word{0}, 1}, JunctionPoint{Word{0}, 2}}) {
      auto seq = delta_nu_estimate(hs, pair, x, depth + 1);
      for (const auto& v : seq.estimate)
        if (v != Rational(2)) return std::pair(false, std::string("estimator drifted"));
    }
    return std::pair(true, "levels 1.." + std::to_string(depth));
  });

  detail::check(out, "spline integrals against mu sum to 1, exact", [&] {
    for (int m = 0; m <= depth; ++m) {
      LevelGraph g = build_level_graph(params, m);
      Rational total(0);
      for (int x = 0; x < g.n_vertices(); ++x) total += spline_integral_mu(params, g, x);
      if (total != Rational(1)) return std::pair(false, "level " + std::to_string(m));
    }
    return std::pair(true, "levels 0.." + std::to_string(depth));
  });

  detail::check(out, "spline integrals against nu' sum to 2, exact", [&] {
    for (int m = 0; m <= depth; ++m) {
      LevelGraph g = build_level_graph(params, m);
      Rational total(0);
      for (const Rational& v : spline_integral_nu_all(hs, g)) total += v;
      if (total != Rational(2)) return std::pair(false, "level " + std::to_string(m));
    }
    return std::pair(true, "levels 0.." + std::to_string(depth));
  });

  detail::check(out, "discrete maximum principle for the Poisson solve", [&] {
    LevelGraph g = build_level_graph(params, std::min(depth, 3));
    std::vector<Rational> ones(static_cast<std::size_t>(g.n_vertices()), Rational(1));
    auto u = discrete_poisson_solve(g, ones, Rational(1));
    for (int v = 0; v < g.n_vertices(); ++v)
      if (!g.is_boundary(v) && u[static_cast<std::size_t>(v)] >= Rational(0))
        return std::pair(false, std::string("interior value above boundary"));
    return std::pair(true, std::string());
  });

  return out;
}

inline SuiteResult mixing_suite(int k, int depth) {
  SuiteResult out;
  out.suite = "mixing";
  const HarmonicStructure hs = extension_tensor(gasket_params(k));
  const EnergyCoordinates ec = energy_orthobasis(hs);
  const SymOperator op = transfer_operator_matrix(ec);

  detail::check(out, "trace preservation on 100 seeded inputs", [&] {
    sgk::detail::KeyedRng rng(12345, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::Matrix2d b;
      const double x = static_cast<double>(rng.next() >> 11) * 0x1.0p-52 - 1.0;
      const double y = static_cast<double>(rng.next() >> 11) * 0x1.0p-52 - 1.0;
      const double z = static_cast<double>(rng.next() >> 11) * 0x1.0p-52 - 1.0;
      b << x, y, y, z;
      worst = std::max(worst, std::abs(op.apply(b).trace() - b.trace()));
    }
    std::ostringstream os;
    os << "max deviation " << worst;
    return std::pair(worst < 1e-12, os.str());
  });

  detail::check(out, "identity is a fixed point, exact", [&] {
    const bool ok = op.rep_exact.col(0) + op.rep_exact.col(2) ==
                    Vec3Q(Rational(1), Rational(0), Rational(1));
    return std::pair(ok, std::string());
  });

  detail::check(out, "exact rational contraction on traceless matrices", [&] {
    const Mat3Q& m = op.rep_exact;
    const Rational l = m(1, 1);
    const bool form = m(0, 1).is_zero() && m(1, 0).is_zero() && m(1, 2).is_zero() &&
                      m(2, 1).is_zero() && m(0, 0) == (Rational(1) + l) / Rational(2) &&
                      m(2, 2) == m(0, 0) && m(0, 2) == (Rational(1) - l) / Rational(2) &&
                      m(2, 0) == m(0, 2) && l > Rational(0) && l < Rational(1);
    return std::pair(form, "lambda = " + l.str());
  });

  detail::check(out, "operator power equals brute-force sum within 1e-12", [&] {
    double worst = 0.0;
    const int max_gap = std::min(depth, 8);
    for (const Word& a : {Word{0}, Word{1, 0}})
      for (const Word& b : {Word{0}, Word{2}})
        for (int n = b.size() - a.size(); n <= max_gap; ++n) {
          if (n < 0) continue;
          worst = std::max(worst,
                           std::abs(correlation_exact(ec, a, b, n, CorrelationMethod::kBrute) -
                                    correlation_exact(ec, a, b, n, CorrelationMethod::kOperator)));
        }
    std::ostringstream os;
    os << "max deviation " << worst;
    return std::pair(worst < 1e-12, os.str());
  });

  detail::check(out, "conditional-measure estimates are probability vectors", [&] {
    sgk::detail::KeyedRng rng(777, 1);
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<int> syms;
      for (int i = 0; i < 25; ++i)
        syms.push_back(static_cast<int>(rng.below(static_cast<std::uint32_t>(hs.params.d))));
      const Word prefix{Word(syms)};
      std::vector<std::vector<double>> g;
      for (int s = 0; s < hs.params.d; ++s) g.push_back(g_function_estimate(ec, s, prefix));
      for (std::size_t n = 0; n < g[0].size(); ++n) {
        double total = 0.0;
        for (const auto& gs : g) {
          if (gs[n] < -1e-15) return std::pair(false, std::string("negative entry"));
          total += gs[n];
        }
        if (std::abs(total - 1.0) > 1e-12) return std::pair(false, std::string("sum drifted"));
      }
    }
    return std::pair(true, std::string("3 seeded prefixes"));
  });

  detail::check(out, "mixing rate fit over n = 5..25", [&] {
    RateFit fit = mixing_rate_fit(ec, Word{0}, Word{0}, 5, 25);
    std::ostringstream os;
    os << "rate " << fit.rate << ", reference " << fit.reference_rate << ", constant "
       << fit.constant;
    const bool rate_ok = std::abs(fit.rate - fit.reference_rate) / fit.reference_rate < 0.02;
    const bool constant_ok = k != 2 || fit.constant <= 2.0;
    return std::pair(rate_ok && constant_ok, os.str());
  });

  return out;
}

/// Runs the named suite ("all" for every suite) at the given depth.
inline std::vector<SuiteResult> run_suites(const std::string& suite, int k, int depth) {
  std::vector<SuiteResult> results;
  const bool all = suite == "all";
  if (all || suite == "harmonic") results.push_back(harmonic_suite(k));
  if (all || suite == "measures") results.push_back(measures_suite(k, depth));
  if (all || suite == "selfsim") results.push_back(selfsim_suite(k, depth));
  if (all || suite == "laplacian") results.push_back(laplacian_suite(k, depth));
  if (all || suite == "mixing") results.push_back(mixing_suite(k, depth));
  if (results.empty()) throw std::domain_error("unknown suite '" + suite + "'");
  return results;
}

}  // namespace sgk::verify
