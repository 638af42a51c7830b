#include "hyperflow/tetkernel.hpp"

#include <cmath>

namespace hyperflow {

namespace {

void check_radii(const TetRadii& r) {
  for (double x : r) {
    if (!(x > 0.0)) {
      throw DomainError("tetkernel: all radii must be strictly positive");
    }
  }
}

// acos with a roundoff guard: inputs may leave [-1,1] by at most 1e-12.
double checked_acos(double x) {
  constexpr double guard = 1e-12;
  if (x > 1.0) {
    if (x > 1.0 + guard) throw InternalError("tetkernel: cos(beta) above 1 beyond roundoff guard");
    x = 1.0;
  } else if (x < -1.0) {
    if (x < -1.0 - guard) throw InternalError("tetkernel: cos(beta) below -1 beyond roundoff guard");
    x = -1.0;
  }
  return std::acos(x);
}

struct TetParams {
  std::array<double, 4> t;
  std::array<double, 4> lambda;  // lambda[m]: pair sums over slots != m
  double q2;
  double sqrt_q2;
};

TetParams tet_params(const TetRadii& r) {
  check_radii(r);
  TetParams p;
  for (int v = 0; v < 4; ++v) p.t[v] = std::tanh(r[v]);
  const auto& t = p.t;
  for (int m = 0; m < 4; ++m) {
    double s = 1.0;
    for (int x = 0; x < 4; ++x) {
      if (x == m) continue;
      for (int y = x + 1; y < 4; ++y) {
        if (y == m) continue;
        s += t[x] * t[y];
      }
    }
    p.lambda[m] = s;
  }
  double sum = t[0] + t[1] + t[2] + t[3];
  double sq = t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + t[3] * t[3];
  p.q2 = sum * sum - 2.0 * sq + 4.0;
  if (!(p.q2 > 0.0)) {
    // Positive for every positive radius vector; anything else is a numeric
    // blow-up and continuation would produce garbage angles.
    throw InternalError("tetkernel: non-degeneracy quantity Q2 <= 0");
  }
  p.sqrt_q2 = std::sqrt(p.q2);
  return p;
}

double cos_beta(const TetParams& p, const TetEdgeSlots& e) {
  const auto& t = p.t;
  double num = 2.0 - t[e.a] * t[e.a] - t[e.b] * t[e.b] +
               (t[e.a] + t[e.b]) * (t[e.c] + t[e.d]);
  // lambda over {a,b,c} omits d; over {a,b,d} omits c.
  double den = 2.0 * std::sqrt(p.lambda[e.d] * p.lambda[e.c]);
  return num / den;
}

// Same-edge derivative numerator: d beta_{AB,CD} / d r_A carries this
// polynomial in (t_A, t_B, t_C, t_D); all other same-edge cases are index
// relabelings of it.
double h_poly(double A, double B, double C, double D) {
  return 2 * A * A * B * B + B * B * C * C + B * B * D * D + 2 * A * A * B * C +
         2 * A * A * B * D + 2 * A * A * C * D + A * B * B * C + A * B * B * D +
         4 * A * B * C * D - 2 * A * B * B * B - B * B * B * C - B * B * B * D -
         2 * B * B - C * C - D * D + 6 * A * B + 3 * A * C + 3 * A * D +
         3 * B * C + 3 * B * D + 2 * C * D + 4;
}

// Off-diagonal area derivative numerator for d Area(A) / d r_B; symmetric
// under A <-> B and under C <-> D, which is what makes the Jacobian symmetric.
double o_poly(double A, double B, double C, double D) {
  return 2.0 - (C - D) * (C - D) + A * (B + C + D) + B * (A + C + D);
}

// d beta[e] / d r_v given precomputed parameters.
double dihedral_partial(const TetParams& p, const TetEdgeSlots& e, int v) {
  const auto& t = p.t;
  double lam_abc = p.lambda[e.d];
  double lam_abd = p.lambda[e.c];
  if (v == e.a || v == e.b) {
    int self = v;
    int other = (v == e.a) ? e.b : e.a;
    double sech2 = 1.0 - t[self] * t[self];
    return sech2 * h_poly(t[self], t[other], t[e.c], t[e.d]) /
           (2.0 * p.sqrt_q2 * lam_abc * lam_abd);
  }
  if (v == e.c) {
    double sech2 = 1.0 - t[e.c] * t[e.c];
    return -sech2 * (t[e.a] + t[e.b]) * (t[e.a] + t[e.b] + t[e.c] - t[e.d]) /
           (2.0 * p.sqrt_q2 * lam_abc);
  }
  if (v == e.d) {
    double sech2 = 1.0 - t[e.d] * t[e.d];
    return -sech2 * (t[e.a] + t[e.b]) * (t[e.a] + t[e.b] + t[e.d] - t[e.c]) /
           (2.0 * p.sqrt_q2 * lam_abd);
  }
  throw InternalError("tetkernel: slot not in tetrahedron");
}

std::array<double, 6> angles_of(const TetParams& p) {
  std::array<double, 6> beta;
  for (int e = 0; e < 6; ++e) beta[e] = checked_acos(cos_beta(p, kTetEdges[e]));
  return beta;
}

std::array<double, 4> areas_of(const std::array<double, 6>& beta) {
  std::array<double, 4> area;
  for (int v = 0; v < 4; ++v) {
    double s = 0.0;
    for (int e = 0; e < 6; ++e) {
      if (kTetEdges[e].a == v || kTetEdges[e].b == v) s += beta[e];
    }
    area[v] = M_PI - s;
  }
  return area;
}

Eigen::Matrix<double, 6, 4> partials_of(const TetParams& p) {
  Eigen::Matrix<double, 6, 4> d;
  for (int e = 0; e < 6; ++e)
    for (int v = 0; v < 4; ++v) d(e, v) = dihedral_partial(p, kTetEdges[e], v);
  return d;
}

Eigen::Matrix4d jacobian_of(const TetParams& p,
                            const Eigen::Matrix<double, 6, 4>& dbeta) {
  const auto& t = p.t;
  Eigen::Matrix4d jac;
  // Off-diagonal entries from the closed form; each unordered pair is
  // evaluated once and written to both slots, so symmetry is exact.
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      int rest[2], n = 0;
      for (int x = 0; x < 4; ++x)
        if (x != a && x != b) rest[n++] = x;
      int c = rest[0], d = rest[1];
      double sech2a = 1.0 - t[a] * t[a];
      double sech2b = 1.0 - t[b] * t[b];
      double val = -sech2a * sech2b * o_poly(t[a], t[b], t[c], t[d]) /
                   (p.sqrt_q2 * p.lambda[d] * p.lambda[c]);
      jac(a, b) = val;
      jac(b, a) = val;
    }
  }
  // Diagonal: Area(v) = pi - sum of the three angles at v.
  for (int v = 0; v < 4; ++v) {
    double s = 0.0;
    for (int e = 0; e < 6; ++e) {
      if (kTetEdges[e].a == v || kTetEdges[e].b == v) s += dbeta(e, v);
    }
    jac(v, v) = -s;
  }
  return jac;
}

}  // namespace

int tet_edge_index(int a, int b) {
  for (int e = 0; e < 6; ++e) {
    if ((kTetEdges[e].a == a && kTetEdges[e].b == b) ||
        (kTetEdges[e].a == b && kTetEdges[e].b == a))
      return e;
  }
  throw DomainError("tetkernel: invalid slot pair");
}

bool radii_saturated(const TetRadii& r) {
  for (double x : r)
    if (x > kRadiusSaturationThreshold) return true;
  return false;
}

double tet_q2(const TetRadii& r) { return tet_params(r).q2; }

std::array<double, 6> tet_dihedral_angles(const TetRadii& r) {
  return angles_of(tet_params(r));
}

std::array<double, 4> tet_vertex_areas(const TetRadii& r) {
  return areas_of(angles_of(tet_params(r)));
}

Eigen::Matrix<double, 6, 4> tet_dihedral_partials(const TetRadii& r) {
  return partials_of(tet_params(r));
}

Eigen::Matrix4d tet_area_jacobian(const TetRadii& r) {
  TetParams p = tet_params(r);
  return jacobian_of(p, partials_of(p));
}

TetGeometry tet_geometry(const TetRadii& r) {
  TetParams p = tet_params(r);
  TetGeometry g;
  g.t = p.t;
  g.lambda = p.lambda;
  g.q2 = p.q2;
  g.beta = angles_of(p);
  g.area = areas_of(g.beta);
  g.jac = jacobian_of(p, partials_of(p));
  return g;
}

}  // namespace hyperflow
