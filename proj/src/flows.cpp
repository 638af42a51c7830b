#include "hyperflow/flows.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace hyperflow {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double residual_norm(const Eigen::VectorXd& K, const Eigen::VectorXd& K_target) {
  return (K - K_target).lpNorm<Eigen::Infinity>();
}

// Which targets sit inside the guaranteed-convergence band (K_low, K_high],
// evaluated at the radius ceiling M observed along the run and a floor
// parameter c taken from the smallest radius seen. Attached to
// nonconvergence reports; realizability is never pre-checked.
std::string regime_summary(const Triangulation& T, const Eigen::VectorXd& K_target,
                           double radius_ceiling, double radius_floor) {
  double M = radius_ceiling;
  double c = std::min(radius_floor, 0.5 * M);
  if (!(M > 0.0) || !(c > 0.0) || !(c < M)) return {};
  int inside = 0;
  for (int i = 0; i < T.num_vertices(); ++i) {
    CurvatureBounds b = bounds(M, c, T.euler_char(i), T.degree(i));
    if (K_target[i] > b.K_low && K_target[i] <= b.K_high) ++inside;
  }
  std::ostringstream os;
  os << "; " << inside << "/" << T.num_vertices()
     << " targets inside the guaranteed band (C1, C2] at M=" << M << ", c=" << c;
  return os.str();
}

void check_options(const Triangulation& T, const FlowOptions& opts, FlowMethod expected) {
  if (opts.method != expected)
    throw DomainError(std::string("options are configured for method '") +
                      to_string(opts.method) + "', called '" + to_string(expected) + "'");
  if (!(opts.tol > 0.0)) throw DomainError("tol must be positive");
  if (!(opts.positivity_floor > 0.0)) throw DomainError("positivity floor must be positive");
  check_metric(T, opts.r0);
  if (opts.K_target.size() != T.num_vertices())
    throw DomainError("target curvature has wrong length");
  if (opts.r0.minCoeff() <= opts.positivity_floor)
    throw DomainError("initial radii must exceed the positivity floor");
}

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84, 0.0};
// b5 - b4: error estimator weights
constexpr double kE[7] = {71.0 / 57600,       0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

struct FlowDriver {
  const Triangulation& T;
  const FlowOptions& opts;
  // writes dr/dt into out; caller guarantees y is strictly positive
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> rhs;
  bool enforce_energy_decrease = false;
  double min_radius_seen = 0.0;

  FlowTrace run() {
    FlowTrace trace;
    const Eigen::VectorXd& Kbar = opts.K_target;
    Eigen::VectorXd y = opts.r0;
    double t = 0.0;
    double energy = 0.0;

    Eigen::VectorXd K = scalar_curvature(T, y);
    double res = residual_norm(K, Kbar);
    trace.samples.push_back({t, y, K, res, 0.0, energy});
    trace.max_radius_seen = y.maxCoeff();
    min_radius_seen = y.minCoeff();
    if (res <= opts.tol) {
      trace.termination = Termination::converged;
      finish(trace, res);
      return trace;
    }

    const int n = static_cast<int>(y.size());
    std::array<Eigen::VectorXd, 7> k;
    Eigen::VectorXd ys(n), y_new(n), err(n);
    double h = opts.init_step;
    double err_prev = 1.0;
    int accepted = 0;

    while (true) {
      if (t >= opts.max_time * (1.0 - 1e-15)) {
        trace.termination = Termination::max_time;
        break;
      }
      h = std::min(h, opts.max_time - t);

      bool positivity_ok = true;
      for (int s = 0; s < 7 && positivity_ok; ++s) {
        ys = y;
        for (int j = 0; j < s; ++j)
          if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * k[j];
        if (ys.minCoeff() <= opts.positivity_floor) {
          positivity_ok = false;
          break;
        }
        k[s].resize(n);
        rhs(ys, k[s]);
        ++trace.rhs_evaluations;
      }
      if (positivity_ok) {
        y_new = y;
        for (int s = 0; s < 7; ++s)
          if (kB5[s] != 0.0) y_new += (h * kB5[s]) * k[s];
        if (y_new.minCoeff() <= opts.positivity_floor) positivity_ok = false;
      }
      if (!positivity_ok) {
        // retry the trial step at half step
        h *= 0.5;
        if (h < opts.min_step) {
          trace.termination = Termination::left_positive_orthant;
          trace.message = "could not keep radii above the positivity floor";
          break;
        }
        continue;
      }

      err.setZero();
      for (int s = 0; s < 7; ++s)
        if (kE[s] != 0.0) err += (h * kE[s]) * k[s];
      double err_norm = 0.0;
      for (int i = 0; i < n; ++i) {
        double sc = opts.ode_abs_tol +
                    opts.ode_rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err_norm += (err[i] / sc) * (err[i] / sc);
      }
      err_norm = std::sqrt(err_norm / n);
      err_norm = std::max(err_norm, 1e-12);

      if (err_norm > 1.0) {
        double fac = std::max(0.2, opts.safety * std::pow(err_norm, -0.2));
        h *= fac;
        if (h < opts.min_step) {
          trace.termination = Termination::step_underflow;
          trace.message = "error control drove the step below min_step";
          break;
        }
        continue;
      }

      // accepted
      double de = curvature_energy(T, y_new, y, Kbar);
      if (enforce_energy_decrease && de > 1e-9 * (1.0 + std::abs(energy))) {
        throw InternalError("ricci flow: convex energy increased across an accepted step");
      }
      energy += de;
      t += h;
      y = y_new;
      K = scalar_curvature(T, y);
      res = residual_norm(K, Kbar);
      trace.samples.push_back({t, y, K, res, h, energy});
      trace.max_radius_seen = std::max(trace.max_radius_seen, y.maxCoeff());
      min_radius_seen = std::min(min_radius_seen, y.minCoeff());
      ++accepted;

      if (res <= opts.tol) {
        trace.termination = Termination::converged;
        break;
      }
      if (accepted >= opts.max_iters) {
        trace.termination = Termination::max_iters;
        break;
      }
      // PI step-size controller
      double fac = opts.safety * std::pow(err_norm, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, 5.0);
      err_prev = err_norm;
    }
    finish(trace, res);
    return trace;
  }

  void finish(FlowTrace& trace, double res) const {
    trace.final_residual = res;
    trace.rate_estimate = estimate_rate(trace.samples);
    if (trace.termination != Termination::converged) {
      if (trace.message.empty()) trace.message = "stopped before reaching tol";
      trace.message +=
          regime_summary(T, opts.K_target, trace.max_radius_seen, min_radius_seen);
    }
  }
};

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_time: return "max_time";
    case Termination::max_iters: return "max_iters";
    case Termination::step_underflow: return "step_underflow";
    case Termination::left_positive_orthant: return "left_positive_orthant";
    case Termination::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

const char* to_string(FlowMethod m) {
  switch (m) {
    case FlowMethod::ricci: return "ricci";
    case FlowMethod::calabi: return "calabi";
    case FlowMethod::newton: return "newton";
  }
  return "unknown";
}

double estimate_rate(const std::vector<FlowSample>& samples, double cutoff) {
  std::vector<std::pair<double, double>> pts;  // (t, log residual)
  for (const auto& s : samples)
    if (s.residual > 0.0 && s.residual < cutoff) pts.push_back({s.t, std::log(s.residual)});
  if (pts.size() < 2) return kNan;
  std::size_t start = pts.size() / 2;
  if (pts.size() - start < 2) start = pts.size() - 2;
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = start; i < pts.size(); ++i) {
    n += 1;
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return kNan;
  return (n * sxy - sx * sy) / denom;
}

FlowTrace ricci_flow(const Triangulation& T, const FlowOptions& opts) {
  check_options(T, opts, FlowMethod::ricci);
  FlowDriver drv{T, opts,
                 [&](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
                   out = scalar_curvature(T, y) - opts.K_target;
                 },
                 /*enforce_energy_decrease=*/true};
  return drv.run();
}

FlowTrace calabi_flow(const Triangulation& T, const FlowOptions& opts) {
  check_options(T, opts, FlowMethod::calabi);
  FlowDriver drv{T, opts,
                 [&](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
                   Eigen::VectorXd diff = scalar_curvature(T, y) - opts.K_target;
                   out = -(curvature_jacobian(T, y) * diff);
                 },
                 /*enforce_energy_decrease=*/false};
  return drv.run();
}

NewtonReport newton_solve(const Triangulation& T, const FlowOptions& opts) {
  check_options(T, opts, FlowMethod::newton);
  const Eigen::VectorXd& Kbar = opts.K_target;
  constexpr double armijo_c1 = 1e-4;

  NewtonReport rep;
  Eigen::VectorXd r = opts.r0;
  double energy = 0.0;
  double last_alpha = 0.0;
  double min_radius_seen = opts.r0.minCoeff();

  for (int iter = 0;; ++iter) {
    Eigen::VectorXd K = scalar_curvature(T, r);
    double res = residual_norm(K, Kbar);
    rep.trace.samples.push_back({static_cast<double>(iter), r, K, res, last_alpha, energy});
    rep.trace.max_radius_seen = std::max(rep.trace.max_radius_seen, r.maxCoeff());
    min_radius_seen = std::min(min_radius_seen, r.minCoeff());
    rep.iterations = iter;
    rep.r = r;
    rep.residual = res;
    if (res <= opts.tol) {
      rep.converged = true;
      rep.termination = Termination::converged;
      break;
    }
    if (iter >= opts.max_iters) {
      rep.termination = Termination::max_iters;
      rep.message = "newton: iteration budget exhausted";
      break;
    }

    // descent direction for the convex energy: (-Lambda) p = K - K_target
    Eigen::SparseMatrix<double> lambda = curvature_jacobian(T, r);
    Eigen::VectorXd diff = K - Kbar;
    Eigen::VectorXd p;
    if (opts.use_sparse_solver) {
      Eigen::SparseMatrix<double> A = (-lambda).eval();
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
      if (solver.info() != Eigen::Success)
        throw InternalError("newton: sparse factorization of -Lambda failed");
      p = solver.solve(diff);
    } else {
      Eigen::MatrixXd A = -Eigen::MatrixXd(lambda);
      Eigen::LDLT<Eigen::MatrixXd> solver(A);
      if (solver.info() != Eigen::Success)
        throw InternalError("newton: dense factorization of -Lambda failed");
      p = solver.solve(diff);
    }
    // gradient of the energy is -(K - Kbar); directional derivative:
    double slope = -diff.dot(p);
    if (!(slope < 0.0))
      throw InternalError("newton: computed direction is not a descent direction");

    // fraction-to-boundary: stay strictly inside the positive orthant
    double alpha_max = 1.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (p[i] < 0.0) {
        double room = r[i] - opts.positivity_floor;
        alpha_max = std::min(alpha_max, 0.95 * room / (-p[i]));
      }
    }
    if (alpha_max < 1e-12) {
      rep.termination = Termination::left_positive_orthant;
      rep.message = "newton: stagnated against the positivity boundary; "
                    "the target curvature may not be realizable";
      break;
    }

    double alpha = alpha_max;
    double de = 0.0;
    bool ok = false;
    while (alpha >= 1e-14 * alpha_max) {
      de = curvature_energy(T, (r + alpha * p).eval(), r, Kbar);
      if (de <= armijo_c1 * alpha * slope) {
        ok = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!ok) {
      rep.termination = Termination::line_search_failure;
      rep.message = "newton: backtracking line search failed to make progress";
      break;
    }
    r += alpha * p;
    energy += de;
    last_alpha = alpha;
  }

  if (!rep.converged)
    rep.message += regime_summary(T, Kbar, rep.trace.max_radius_seen, min_radius_seen);
  rep.trace.termination = rep.termination;
  rep.trace.final_residual = rep.residual;
  rep.trace.rate_estimate = estimate_rate(rep.trace.samples);
  rep.trace.message = rep.message;
  return rep;
}

CurvatureBounds bounds(double M, double c, int chi, int degree) {
  if (!(M > 0.0)) throw DomainError("bounds: M must be positive");
  if (!(c > 0.0 && c < M)) throw DomainError("bounds: c must lie in (0, M)");
  if (degree < 1) throw DomainError("bounds: degree must be at least 1");
  const double m = std::tanh(M);
  const double u = std::tanh(c);
  CurvatureBounds b;
  b.cos_uniform = (1.0 + m * m) / (1.0 + 3.0 * m * m);
  b.cos_pinched = 0.5 + (1.0 - u * u) / (2.0 * (1.0 + m * m + 2.0 * u * m));
  b.area_uniform = M_PI - 3.0 * std::acos(b.cos_uniform);
  b.area_pinched = M_PI - 3.0 * std::acos(b.cos_pinched);
  if (!(b.area_pinched > b.area_uniform))
    throw DomainError("bounds: c is too close to M to separate the two bounds");
  b.K_low = 2.0 * M_PI * chi + degree * b.area_uniform;
  b.K_high = 2.0 * M_PI * chi + degree * b.area_pinched;
  return b;
}

}  // namespace hyperflow
