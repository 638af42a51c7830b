#pragma once

#include <Eigen/Dense>
#include <array>

#include "hyperflow/errors.hpp"

namespace hyperflow {

// Radii (r_i, r_j, r_k, r_h) of a single hyper-ideal tetrahedron, one per
// corner slot. Any strictly positive vector is admissible.
using TetRadii = std::array<double, 4>;

// Slot pairs of the six tetrahedron edges together with the opposite pair:
// edge e joins slots (a, b); the edge disjoint from it joins (c, d).
struct TetEdgeSlots {
  int a, b, c, d;
};

inline constexpr std::array<TetEdgeSlots, 6> kTetEdges{{
    {0, 1, 2, 3},
    {0, 2, 1, 3},
    {0, 3, 1, 2},
    {1, 2, 0, 3},
    {1, 3, 0, 2},
    {2, 3, 0, 1},
}};

// Edge index in kTetEdges for the unordered slot pair {a, b}.
int tet_edge_index(int a, int b);

// Above this radius tanh saturates against 1 and derivative information
// degrades (sech^2 underflows); computation still proceeds.
inline constexpr double kRadiusSaturationThreshold = 20.0;
bool radii_saturated(const TetRadii& r);

// Everything derived from the radii of one tetrahedron, evaluated in the
// t = tanh(r) parameterization so that all intermediates stay bounded.
struct TetGeometry {
  std::array<double, 4> t{};       // tanh(r) per slot
  std::array<double, 4> lambda{};  // lambda[m] = 1 + sum of t_p t_q over pairs {p,q} not containing m
  double q2 = 0.0;                 // non-degeneracy quantity, > 0 on the positive orthant
  std::array<double, 6> beta{};    // dihedral angles, indexed like kTetEdges
  std::array<double, 4> area{};    // vertex-triangle areas
  Eigen::Matrix4d jac;             // jac(a, b) = d area[a] / d r[b]; symmetric, entries < 0
};

double tet_q2(const TetRadii& r);
std::array<double, 6> tet_dihedral_angles(const TetRadii& r);
std::array<double, 4> tet_vertex_areas(const TetRadii& r);

// partials(e, v) = d beta[e] / d r[v] for all 6 edges x 4 radii.
Eigen::Matrix<double, 6, 4> tet_dihedral_partials(const TetRadii& r);

// 4x4 Jacobian of vertex areas with respect to radii. Exactly symmetric as
// returned; all entries negative; strictly diagonally dominant per row.
Eigen::Matrix4d tet_area_jacobian(const TetRadii& r);

TetGeometry tet_geometry(const TetRadii& r);

}  // namespace hyperflow
