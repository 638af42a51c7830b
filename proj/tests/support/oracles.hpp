#pragma once

// Test-side oracles, deliberately independent of the kernel's tanh
// parameterization: angles via the hyperbolic cosine-law pipeline on edge
// lengths l = r + r, and derivative checks via central finite differences.

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hyperflow/tetkernel.hpp"
#include "hyperflow/triangulation.hpp"

namespace oracle {

// Vertex edge x of the triangle at slot i toward the face {i,j,k}, by the
// right-angled hexagon cosine law on edge lengths l = r + r. Held as
// (cosh x - 1, cosh x + 1): the shifted forms follow from the cosine law by
// the cosh addition identities and avoid the cancellation that loses all
// precision near cosh x = 1 (large radii, tiny vertex triangles).
struct VertexEdge {
  double m1;  // cosh x - 1
  double p1;  // cosh x + 1
};

inline VertexEdge vertex_edge(const hyperflow::TetRadii& r, int i, int j, int k) {
  double s = std::sinh(r[i] + r[j]) * std::sinh(r[i] + r[k]);
  return {(std::cosh(r[j] - r[k]) + std::cosh(r[j] + r[k])) / s,
          (std::cosh(2 * r[i] + r[j] + r[k]) + std::cosh(r[j] + r[k])) / s};
}

// Dihedral angle at edge {a,b} opposite {c,d} as the vertex-triangle angle,
// via the hyperbolic triangle cosine law on the vertex-edge lengths.
inline double dihedral_angle(const hyperflow::TetRadii& r, int a, int b, int c, int d) {
  VertexEdge xjk = vertex_edge(r, a, b, c);
  VertexEdge xjh = vertex_edge(r, a, b, d);
  VertexEdge xkh = vertex_edge(r, a, c, d);
  // cosh xjk cosh xjh - cosh xkh, written in the shifted variables
  double num = xjk.m1 + xjh.m1 - xkh.m1 + xjk.m1 * xjh.m1;
  double den = std::sqrt(xjk.m1 * xjk.p1) * std::sqrt(xjh.m1 * xjh.p1);
  return std::acos(num / den);
}

inline std::array<double, 6> dihedral_angles(const hyperflow::TetRadii& r) {
  std::array<double, 6> beta;
  for (int e = 0; e < 6; ++e) {
    auto s = hyperflow::kTetEdges[e];
    beta[e] = dihedral_angle(r, s.a, s.b, s.c, s.d);
  }
  return beta;
}

// Project-wide finite-difference convention: central differences with
// h = 1e-5 * max(1, |r_v|); comparisons at relative tolerance 1e-6 with an
// absolute floor of 1e-9.
inline constexpr double kFdRelTol = 1e-6;
inline constexpr double kFdAbsFloor = 1e-9;

inline double fd_step(double r) { return 1e-5 * std::max(1.0, std::abs(r)); }

inline double central_diff(const std::function<double(const hyperflow::TetRadii&)>& f,
                           hyperflow::TetRadii r, int v) {
  double h = fd_step(r[v]);
  hyperflow::TetRadii rp = r, rm = r;
  rp[v] += h;
  rm[v] -= h;
  return (f(rp) - f(rm)) / (2.0 * h);
}

inline bool fd_close(double analytic, double numeric) {
  double err = std::abs(analytic - numeric);
  return err <= std::max(kFdAbsFloor, kFdRelTol * std::abs(numeric));
}

inline hyperflow::TetRadii random_radii(std::mt19937& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(rng), d(rng), d(rng), d(rng)};
}

inline Eigen::VectorXd random_metric(std::mt19937& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = d(rng);
  return r;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(HYPERFLOW_FIXTURES_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline hyperflow::Triangulation load_fixture(const std::string& name) {
  return hyperflow::Triangulation::parse(read_file(fixture_path(name)));
}

}  // namespace oracle
