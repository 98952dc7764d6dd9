#pragma once

#include <json.hpp>

#include "sgk/measures.hpp"
#include "sgk/selfsim.hpp"
#include "sgk/topology.hpp"

namespace sgk {

using Json = nlohmann::ordered_json;

inline Json json_point(const Point& p) {
  return Json{{"x", p.x.str()}, {"y_sqrt3", p.y3.str()}};
}

inline Json json_vec3(const Vec3Q& v) {
  return Json::array({v(0).str(), v(1).str(), v(2).str()});
}

inline Json json_mat3(const Mat3Q& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i)
    rows.push_back(Json::array({m(i, 0).str(), m(i, 1).str(), m(i, 2).str()}));
  return rows;
}

/// Graph serialization: exact rational coordinates ("p/q" plus the
/// sqrt(3)-coefficient of the ordinate), edges as index pairs, cells as
/// word -> vertex triple.
inline Json json_graph(const LevelGraph& g) {
  Json out;
  out["schema"] = 1;
  out["k"] = g.k;
  out["level"] = g.level;
  Json vertices = Json::array();
  for (const Point& p : g.vertices) vertices.push_back(json_point(p));
  out["vertices"] = std::move(vertices);
  out["boundary"] = Json::array({g.boundary_ids[0], g.boundary_ids[1], g.boundary_ids[2]});
  Json edges = Json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(Json::array({a, b}));
  out["edges"] = std::move(edges);
  Json degrees = Json::array();
  for (int d : g.degree) degrees.push_back(d);
  out["degrees"] = std::move(degrees);
  Json cells = Json::object();
  for (std::size_t c = 0; c < g.n_cells(); ++c) {
    const auto& tri = g.cell_vertices[c];
    cells[g.cell_word(c).str()] = Json::array({tri[0], tri[1], tri[2]});
  }
  out["cells"] = std::move(cells);
  return out;
}

inline Json json_measure(const HarmonicStructure& hs, const Word& w) {
  const MeasureVector mv = energy_cell_vector(hs, w);
  const Vec3Q rn = radon_nikodym_approx(hs, w);
  Json out;
  out["schema"] = 1;
  out["k"] = hs.params.k;
  out["word"] = w.str();
  out["nu"] = json_vec3(mv.nu);
  out["total_std"] = mv.total_std().str();
  out["total_prime"] = mv.total_prime().str();
  out["prob"] = mv.prob().str();
  out["radon_nikodym"] = json_vec3(rn);
  // Additivity of the children, restated as a machine-checkable field.
  Vec3Q sum = Vec3Q::Zero();
  for (int n = 0; n < hs.params.d; ++n) sum += energy_cell_vector(hs, w * Word{n}).nu;
  out["children_sum_check"] = (sum == mv.nu) ? "ok" : "FAIL";
  return out;
}

inline Json json_m_family(const MMatrixFamily& mm, const std::vector<int>* relabel) {
  Json out;
  out["schema"] = 1;
  out["k"] = mm.k;
  out["r"] = mm.r.str();
  Json mats = Json::array();
  for (const auto& m : mm.M) mats.push_back(json_mat3(m));
  out["matrices"] = std::move(mats);
  Json sums = Json::array();
  for (const auto& s : mm.S) sums.push_back(json_vec3(s));
  out["column_sums"] = std::move(sums);
  if (relabel) {
    Json order = Json::array();
    for (int i : *relabel) order.push_back(i);
    out["symmetry_order"] = std::move(order);
  }
  return out;
}

}  // namespace sgk
