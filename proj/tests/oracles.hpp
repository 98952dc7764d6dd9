#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// library's matrix-product routes: energy vectors come from direct edge sums
// over constructed graphs, so agreement with the implementation is a real
// cross-check rather than a tautology.

#include <vector>

#include "sgk/harmonic.hpp"
#include "sgk/measures.hpp"

namespace sgk::oracle {

/// nu_j(F_w K) by brute force at graph level m >= |w|: the renormalized sum
/// of squared differences of the level-m harmonic extension of e_j over
/// every Gamma_m edge inside the cell F_w K.
inline Vec3Q edge_energy_vector(const HarmonicStructure& hs, const Word& w, int m) {
  if (m < w.size()) throw std::invalid_argument("oracle: level below |w|");
  LevelGraph g = build_level_graph(hs.params, m);
  Vec3Q out;
  const Rational scale = pow(Rational(1) / hs.r, m);
  for (int j = 0; j < 3; ++j) {
    Vec3Q e = Vec3Q::Zero();
    e(j) = Rational(1);
    std::vector<Rational> u = extend_harmonic(hs, e, g);
    Rational acc(0);
    // Cells descending from w are a contiguous lexicographic block.
    const std::size_t stride = [&] {
      std::size_t s = 1;
      for (int i = 0; i < m - w.size(); ++i) s *= static_cast<std::size_t>(hs.params.d);
      return s;
    }();
    const std::size_t first = w.lex_index(hs.params.d) * stride;
    for (std::size_t c = first; c < first + stride; ++c) {
      const auto& tri = g.cell_vertices[c];
      for (int i = 0; i < 3; ++i) {
        const Rational diff = u[static_cast<std::size_t>(tri[static_cast<std::size_t>(i)])] -
                              u[static_cast<std::size_t>(tri[static_cast<std::size_t>((i + 1) % 3)])];
        acc += diff * diff;
      }
    }
    out(j) = scale * acc;
  }
  return out;
}

}  // namespace sgk::oracle
