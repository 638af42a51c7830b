#include "hyperflow/curvature.hpp"

#include <cmath>

#include "hyperflow/tetkernel.hpp"
#include "hyperflow/threads.hpp"

namespace hyperflow {

namespace {

TetRadii radii_of_tet(const TetSpec& tet, const PackingMetric& r) {
  return {r[tet.corners[0]], r[tet.corners[1]], r[tet.corners[2]], r[tet.corners[3]]};
}

std::vector<std::array<double, 6>> all_angles(const Triangulation& T, const PackingMetric& r) {
  std::vector<std::array<double, 6>> out(T.num_tets());
  parallel_for(out.size(), [&](std::size_t t) {
    out[t] = tet_dihedral_angles(radii_of_tet(T.tets()[t], r));
  });
  return out;
}

// 16-point Gauss-Legendre rule on [0,1]; nodes found once per process by
// Newton iteration on the Legendre polynomial.
const std::vector<std::pair<double, double>>& gauss_legendre_16() {
  static const std::vector<std::pair<double, double>> rule = [] {
    constexpr int n = 16;
    std::vector<std::pair<double, double>> r;
    for (int k = 0; k < n; ++k) {
      double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.push_back({0.5 * (x + 1.0), 0.5 * w});  // mapped to [0,1]
    }
    return r;
  }();
  return rule;
}

}  // namespace

void check_metric(const Triangulation& T, const PackingMetric& r) {
  if (r.size() != T.num_vertices())
    throw DomainError("metric has " + std::to_string(r.size()) + " radii, triangulation has " +
                      std::to_string(T.num_vertices()) + " vertex classes");
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (!(r[i] > 0.0)) throw DomainError("metric radii must be strictly positive");
}

bool metric_saturated(const PackingMetric& r) {
  return r.size() > 0 && r.maxCoeff() > kRadiusSaturationThreshold;
}

std::vector<double> edge_ricci(const Triangulation& T, const PackingMetric& r) {
  check_metric(T, r);
  auto angles = all_angles(T, r);
  std::vector<double> K(T.num_edge_classes());
  for (int e = 0; e < T.num_edge_classes(); ++e) {
    double total = 0.0;
    for (auto [tet, slot] : T.edge_classes()[e].members) total += angles[tet][slot];
    K[e] = 2.0 * M_PI - total;
  }
  return K;
}

Eigen::VectorXd scalar_curvature(const Triangulation& T, const PackingMetric& r) {
  auto Ke = edge_ricci(T, r);
  Eigen::VectorXd K = Eigen::VectorXd::Zero(T.num_vertices());
  for (int e = 0; e < T.num_edge_classes(); ++e) {
    K[T.edge_classes()[e].u] += Ke[e];
    K[T.edge_classes()[e].v] += Ke[e];
  }
  return K;
}

Eigen::VectorXd scalar_curvature_gb(const Triangulation& T, const PackingMetric& r) {
  check_metric(T, r);
  std::vector<std::array<double, 4>> areas(T.num_tets());
  parallel_for(areas.size(), [&](std::size_t t) {
    areas[t] = tet_vertex_areas(radii_of_tet(T.tets()[t], r));
  });
  Eigen::VectorXd K(T.num_vertices());
  for (int i = 0; i < T.num_vertices(); ++i) K[i] = 2.0 * M_PI * T.euler_char(i);
  for (int t = 0; t < T.num_tets(); ++t)
    for (int c = 0; c < 4; ++c) K[T.tets()[t].corners[c]] += areas[t][c];
  return K;
}

Eigen::SparseMatrix<double> curvature_jacobian(const Triangulation& T, const PackingMetric& r) {
  check_metric(T, r);
  const int n = T.num_vertices();
  std::vector<Eigen::Matrix4d> blocks(T.num_tets());
  parallel_for(blocks.size(), [&](std::size_t t) {
    blocks[t] = tet_area_jacobian(radii_of_tet(T.tets()[t], r));
  });
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(blocks.size() * 16);
  for (int t = 0; t < T.num_tets(); ++t) {
    const auto& corners = T.tets()[t].corners;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        trips.emplace_back(corners[a], corners[b], blocks[t](a, b));
  }
  Eigen::SparseMatrix<double> lambda(n, n);
  lambda.setFromTriplets(trips.begin(), trips.end());
  // per-tet blocks are symmetric, but make exact symmetry an API guarantee
  Eigen::SparseMatrix<double> lambdaT = lambda.transpose();
  lambda = 0.5 * (lambda + lambdaT);
  return lambda;
}

double curvature_energy(const Triangulation& T, const PackingMetric& r,
                        const PackingMetric& r_base, const Eigen::VectorXd& K_target) {
  check_metric(T, r);
  check_metric(T, r_base);
  if (K_target.size() != T.num_vertices())
    throw DomainError("target curvature has wrong length");
  Eigen::VectorXd dir = r - r_base;
  if (dir.isZero(0.0)) return 0.0;
  double acc = 0.0;
  for (const auto& [s, w] : gauss_legendre_16()) {
    PackingMetric rs = r_base + s * dir;
    Eigen::VectorXd K = scalar_curvature(T, rs);
    acc += w * (K - K_target).dot(dir);
  }
  return -acc;
}

CurvatureState curvature_state(const Triangulation& T, const PackingMetric& r) {
  CurvatureState st;
  st.edge_K = edge_ricci(T, r);
  st.K = Eigen::VectorXd::Zero(T.num_vertices());
  for (int e = 0; e < T.num_edge_classes(); ++e) {
    st.K[T.edge_classes()[e].u] += st.edge_K[e];
    st.K[T.edge_classes()[e].v] += st.edge_K[e];
  }
  st.area_link = Eigen::VectorXd::Zero(T.num_vertices());
  for (int t = 0; t < T.num_tets(); ++t) {
    auto areas = tet_vertex_areas(radii_of_tet(T.tets()[t], r));
    for (int c = 0; c < 4; ++c) st.area_link[T.tets()[t].corners[c]] += areas[c];
  }
  st.lambda = curvature_jacobian(T, r);
  return st;
}

}  // namespace hyperflow
