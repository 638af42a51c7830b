#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "hyperflow/triangulation.hpp"

namespace hyperflow {

// Per-vertex radius assignment; strictly positive, one entry per vertex class.
using PackingMetric = Eigen::VectorXd;

// Global curvature data at one metric.
struct CurvatureState {
  Eigen::VectorXd K;                    // per-vertex scalar curvature (edge-sum form)
  std::vector<double> edge_K;           // Ricci curvature per edge class
  Eigen::VectorXd area_link;            // total vertex-triangle area per link
  Eigen::SparseMatrix<double> lambda;   // dK/dr, symmetric negative definite
};

// Throws DomainError unless r has one strictly positive entry per vertex class.
void check_metric(const Triangulation& T, const PackingMetric& r);

// True if any radius exceeds the tanh saturation threshold.
bool metric_saturated(const PackingMetric& r);

// Ricci curvature per edge class: 2*pi minus the dihedral angles around it.
std::vector<double> edge_ricci(const Triangulation& T, const PackingMetric& r);

// Scalar curvature, edge-sum form: K_i sums edge Ricci over ends at i
// (an edge class with both ends at i counts twice).
Eigen::VectorXd scalar_curvature(const Triangulation& T, const PackingMetric& r);

// Scalar curvature in the boundary form 2*pi*chi(link_i) + Area(link_i);
// the independent cross-check of the edge-sum form.
Eigen::VectorXd scalar_curvature_gb(const Triangulation& T, const PackingMetric& r);

// N x N Jacobian dK/dr assembled from per-tetrahedron blocks; returned
// exactly symmetric and sparse on the tetrahedron adjacency pattern.
Eigen::SparseMatrix<double> curvature_jacobian(const Triangulation& T, const PackingMetric& r);

// Convex energy: minus the line integral of sum_i (K_i - K_target_i) dr_i
// along the straight segment from r_base to r (fixed-order Gauss-Legendre).
// Its r-gradient is -(K(r) - K_target); path independence follows from the
// symmetry of the Jacobian and is tested, not assumed.
double curvature_energy(const Triangulation& T, const PackingMetric& r,
                        const PackingMetric& r_base, const Eigen::VectorXd& K_target);

CurvatureState curvature_state(const Triangulation& T, const PackingMetric& r);

}  // namespace hyperflow
