#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hyperflow/curvature.hpp"

namespace hyperflow {

enum class FlowMethod { ricci, calabi, newton };

enum class Termination {
  converged,
  max_time,
  max_iters,
  step_underflow,
  left_positive_orthant,
  line_search_failure,
};

const char* to_string(Termination t);
const char* to_string(FlowMethod m);

struct FlowOptions {
  FlowMethod method = FlowMethod::ricci;
  Eigen::VectorXd K_target;  // length N
  PackingMetric r0;          // strictly positive start
  double tol = 1e-10;        // residual threshold on max|K - K_target|
  double max_time = 1e4;     // flow-time horizon (ricci/calabi)
  int max_iters = 100000;    // accepted steps (flows) / iterations (newton)
  double init_step = 1e-2;
  double min_step = 1e-14;
  double safety = 0.9;
  double positivity_floor = 1e-8;  // radii must stay above this
  double ode_rel_tol = 1e-10;      // integrator error control
  double ode_abs_tol = 1e-12;
  bool use_sparse_solver = false;  // newton: sparse LDLT instead of dense
};

struct FlowSample {
  double t = 0.0;        // flow time, or iteration index for newton
  Eigen::VectorXd r;
  Eigen::VectorXd K;
  double residual = 0.0; // max|K - K_target|
  double step = 0.0;     // step size that produced this sample
  double energy = 0.0;   // convex energy relative to r0
};

struct FlowTrace {
  std::vector<FlowSample> samples;  // one per accepted step, first at t = 0
  Termination termination = Termination::converged;
  double final_residual = 0.0;
  // Least-squares slope of log(residual) against t over the trailing half of
  // the samples with residual below 1e-2; NaN when too few qualify.
  double rate_estimate = 0.0;
  double max_radius_seen = 0.0;  // running max of radii along the run
  long rhs_evaluations = 0;
  std::string message;
};

// Integrates dr/dt = K - K_target with an embedded Runge-Kutta 5(4) pair and
// PI step control. Steps that leave the positive orthant are retried at half
// step. The convex energy must not increase across accepted steps.
FlowTrace ricci_flow(const Triangulation& T, const FlowOptions& opts);

// Integrates dr/dt = -Lambda (K - K_target), same integrator contract.
FlowTrace calabi_flow(const Triangulation& T, const FlowOptions& opts);

struct NewtonReport {
  bool converged = false;
  Termination termination = Termination::converged;
  Eigen::VectorXd r;       // final iterate (the solution when converged)
  double residual = 0.0;
  int iterations = 0;
  FlowTrace trace;         // per-iteration samples, t = iteration index
  std::string message;
};

// Damped Newton descent on the convex energy: solves the symmetric
// positive-definite system (-Lambda) p = K - K_target for the step, with an
// Armijo backtracking line search and a fraction-to-boundary rule that keeps
// the radii positive.
NewtonReport newton_solve(const Triangulation& T, const FlowOptions& opts);

// Explicit convergence-threshold constants for a vertex of degree d whose
// link has Euler characteristic chi, given a radius ceiling M and a floor
// parameter c in (0, M).
struct CurvatureBounds {
  double cos_uniform = 0.0;   // cos(dihedral) when all four radii equal M
  double cos_pinched = 0.0;   // cos(dihedral) at radii (c, M, M, M)
  double area_uniform = 0.0;  // vertex-triangle area lower bound at the ceiling
  double area_pinched = 0.0;  // sharper bound when the vertex radius is below c
  double K_low = 0.0;         // 2*pi*chi + d * area_uniform
  double K_high = 0.0;        // 2*pi*chi + d * area_pinched
};

CurvatureBounds bounds(double M, double c, int chi, int degree);

// Slope of log(residual) vs t over the trailing half of samples whose
// residual is below the cutoff. NaN when fewer than two qualify.
double estimate_rate(const std::vector<FlowSample>& samples, double cutoff = 1e-2);

}  // namespace hyperflow
