#include <doctest.h>

#include <cmath>
#include <random>

#include "hyperflow/flows.hpp"
#include "hyperflow/tetkernel.hpp"
#include "support/oracles.hpp"

using namespace hyperflow;

namespace {

// perturbs componentwise by random factors in [1-size, 1+size], scaled so the
// largest relative deviation is exactly `size`
Eigen::VectorXd perturb(const Eigen::VectorXd& r, double size, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd delta(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) delta[i] = d(rng);
  delta *= size / delta.lpNorm<Eigen::Infinity>();
  return r.cwiseProduct(Eigen::VectorXd::Ones(r.size()) + delta);
}

double lambda_max(const Triangulation& T, const Eigen::VectorXd& r) {
  Eigen::MatrixXd L = Eigen::MatrixXd(curvature_jacobian(T, r));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  return es.eigenvalues().maxCoeff();
}

// perturbation whose displacement excites the slowest decay mode; rate
// measurements need that mode populated or the fit window is pre-asymptotic
Eigen::VectorXd perturb_slow_mode(const Triangulation& T, const Eigen::VectorXd& rbar,
                                  double size) {
  Eigen::MatrixXd L = Eigen::MatrixXd(curvature_jacobian(T, rbar));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  Eigen::VectorXd delta =
      es.eigenvectors().col(rbar.size() - 1).cwiseQuotient(rbar);
  delta *= size / delta.lpNorm<Eigen::Infinity>();
  return rbar.cwiseProduct(Eigen::VectorXd::Ones(rbar.size()) + delta);
}

FlowOptions base_options(const Triangulation&, FlowMethod m, const Eigen::VectorXd& r0,
                         const Eigen::VectorXd& Kbar) {
  FlowOptions o;
  o.method = m;
  o.r0 = r0;
  o.K_target = Kbar;
  return o;
}

}  // namespace

TEST_CASE("ricci flow: stationary start converges immediately") {
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd r0 = Eigen::VectorXd::Constant(4, 1.3);
  auto opts = base_options(T, FlowMethod::ricci, r0, scalar_curvature(T, r0));
  FlowTrace trace = ricci_flow(T, opts);
  CHECK(trace.termination == Termination::converged);
  CHECK(trace.samples.size() == 1);
  CHECK(trace.samples[0].t == 0.0);
  CHECK(trace.samples[0].residual == 0.0);
  CHECK(trace.samples[0].r == r0);
}

TEST_CASE("ricci flow: recovers the metric from a 5% perturbation") {
  std::mt19937 rng(101);
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 4, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  auto opts = base_options(T, FlowMethod::ricci, perturb(rbar, 0.05, rng), Kbar);
  FlowTrace trace = ricci_flow(T, opts);
  REQUIRE(trace.termination == Termination::converged);
  CHECK(trace.final_residual <= opts.tol);
  CHECK((trace.samples.back().r - rbar).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK(trace.rate_estimate < 0.0);
  // sanity on the trace itself
  for (std::size_t s = 1; s < trace.samples.size(); ++s) {
    CHECK(trace.samples[s].t > trace.samples[s - 1].t);
    CHECK(trace.samples[s].step > 0.0);
  }
  CHECK(trace.max_radius_seen >= opts.r0.maxCoeff());

  // decay rate of the linearized flow, measured along the slowest mode
  opts = base_options(T, FlowMethod::ricci, perturb_slow_mode(T, rbar, 0.05), Kbar);
  trace = ricci_flow(T, opts);
  REQUIRE(trace.termination == Termination::converged);
  double lam = lambda_max(T, rbar);
  CHECK(std::abs(trace.rate_estimate - lam) < 0.10 * std::abs(lam));
}

TEST_CASE("ricci flow: energy is non-increasing along accepted steps") {
  std::mt19937 rng(103);
  auto T = oracle::load_fixture("bipyramid_double.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 5, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  auto opts = base_options(T, FlowMethod::ricci, perturb(rbar, 0.2, rng), Kbar);
  FlowTrace trace = ricci_flow(T, opts);
  REQUIRE(trace.termination == Termination::converged);
  for (std::size_t s = 1; s < trace.samples.size(); ++s)
    CHECK(trace.samples[s].energy <= trace.samples[s - 1].energy + 1e-12);
}

TEST_CASE("calabi flow: stationary start and small perturbation") {
  std::mt19937 rng(107);
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 4, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);

  auto stat = base_options(T, FlowMethod::calabi, rbar, Kbar);
  FlowTrace st = calabi_flow(T, stat);
  CHECK(st.termination == Termination::converged);
  CHECK(st.samples.size() == 1);

  auto opts = base_options(T, FlowMethod::calabi, perturb(rbar, 0.05, rng), Kbar);
  FlowTrace trace = calabi_flow(T, opts);
  REQUIRE(trace.termination == Termination::converged);
  CHECK(trace.final_residual <= opts.tol);
  CHECK((trace.samples.back().r - rbar).lpNorm<Eigen::Infinity>() < 1e-8);

  opts = base_options(T, FlowMethod::calabi, perturb_slow_mode(T, rbar, 0.05), Kbar);
  trace = calabi_flow(T, opts);
  REQUIRE(trace.termination == Termination::converged);
  double lam = lambda_max(T, rbar);
  CHECK(std::abs(trace.rate_estimate - (-lam * lam)) < 0.15 * lam * lam);
}

TEST_CASE("newton: stationary target returns the start unchanged") {
  auto T = oracle::load_fixture("two_tet_torus.json");
  Eigen::VectorXd r0 = Eigen::VectorXd::Constant(1, 0.8);
  auto opts = base_options(T, FlowMethod::newton, r0, scalar_curvature(T, r0));
  NewtonReport rep = newton_solve(T, opts);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(rep.r == r0);
}

TEST_CASE("newton: recovers a random metric from a far start") {
  std::mt19937 rng(109);
  for (const char* name :
       {"doubled_tetrahedron.json", "bipyramid_double.json", "two_tet_torus.json"}) {
    CAPTURE(name);
    auto T = oracle::load_fixture(name);
    Eigen::VectorXd rbar = oracle::random_metric(rng, T.num_vertices(), 0.3, 2.5);
    auto opts = base_options(T, FlowMethod::newton, Eigen::VectorXd::Ones(T.num_vertices()),
                             scalar_curvature(T, rbar));
    NewtonReport rep = newton_solve(T, opts);
    REQUIRE(rep.converged);
    CHECK((rep.r - rbar).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(rep.residual <= opts.tol);
  }
}

TEST_CASE("newton: rigidity across distinct random starts") {
  std::mt19937 rng(113);
  auto T = oracle::load_fixture("bipyramid_double.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 5, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  Eigen::VectorXd first;
  for (int s = 0; s < 4; ++s) {
    auto opts = base_options(T, FlowMethod::newton,
                             oracle::random_metric(rng, 5, 0.2, 4.0), Kbar);
    NewtonReport rep = newton_solve(T, opts);
    REQUIRE(rep.converged);
    if (s == 0)
      first = rep.r;
    else
      CHECK((rep.r - first).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("newton: sparse and dense solvers agree") {
  std::mt19937 rng(127);
  auto T = oracle::load_fixture("bipyramid_double.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 5, 0.5, 2.0);
  auto opts = base_options(T, FlowMethod::newton, Eigen::VectorXd::Ones(5),
                           scalar_curvature(T, rbar));
  NewtonReport dense = newton_solve(T, opts);
  opts.use_sparse_solver = true;
  NewtonReport sparse = newton_solve(T, opts);
  REQUIRE(dense.converged);
  REQUIRE(sparse.converged);
  CHECK((dense.r - sparse.r).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("all three solvers agree on the limit") {
  std::mt19937 rng(131);
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 4, 0.6, 1.8);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  Eigen::VectorXd r0 = perturb(rbar, 0.05, rng);

  FlowTrace ric = ricci_flow(T, base_options(T, FlowMethod::ricci, r0, Kbar));
  FlowTrace cal = calabi_flow(T, base_options(T, FlowMethod::calabi, r0, Kbar));
  NewtonReport nwt = newton_solve(T, base_options(T, FlowMethod::newton, r0, Kbar));
  REQUIRE(ric.termination == Termination::converged);
  REQUIRE(cal.termination == Termination::converged);
  REQUIRE(nwt.converged);
  Eigen::VectorXd a = ric.samples.back().r;
  Eigen::VectorXd b = cal.samples.back().r;
  CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-7);
  CHECK((a - nwt.r).lpNorm<Eigen::Infinity>() < 1e-7);
}

TEST_CASE("integrator self-consistency across tolerances") {
  std::mt19937 rng(137);
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 4, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  Eigen::VectorXd r0 = perturb(rbar, 0.3, rng);
  auto run_to = [&](double rel, double abs) {
    auto o = base_options(T, FlowMethod::ricci, r0, Kbar);
    o.max_time = 2.0;
    o.tol = 1e-16;  // unreachable: integrate the full horizon
    o.ode_rel_tol = rel;
    o.ode_abs_tol = abs;
    FlowTrace tr = ricci_flow(T, o);
    REQUIRE(tr.termination == Termination::max_time);
    return tr.samples.back().r;
  };
  Eigen::VectorXd tight = run_to(1e-12, 1e-14);
  Eigen::VectorXd loose = run_to(1e-7, 1e-9);
  CHECK((tight - loose).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("unreachable target walks into the positivity floor") {
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd r0 = Eigen::VectorXd::Ones(4);
  // above the attainable supremum 2*pi*(#ends): radii must shrink forever
  Eigen::VectorXd Kbar(4);
  for (int i = 0; i < 4; ++i)
    Kbar[i] = 2 * M_PI * static_cast<double>(T.edge_ends_at(i).size()) + 1.0;
  auto opts = base_options(T, FlowMethod::ricci, r0, Kbar);
  opts.max_time = 1e3;
  FlowTrace trace = ricci_flow(T, opts);
  CHECK(trace.termination == Termination::left_positive_orthant);
  CHECK(!trace.message.empty());
  // nonconvergence diagnostics place the target against the threshold band
  CHECK(trace.message.find("guaranteed band") != std::string::npos);

  auto nopts = base_options(T, FlowMethod::newton, r0, Kbar);
  nopts.max_iters = 200;
  NewtonReport rep = newton_solve(T, nopts);
  CHECK_FALSE(rep.converged);
  CHECK((rep.termination == Termination::left_positive_orthant ||
         rep.termination == Termination::max_iters));
}

TEST_CASE("budget terminations") {
  std::mt19937 rng(139);
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd rbar = oracle::random_metric(rng, 4, 0.5, 2.0);
  Eigen::VectorXd Kbar = scalar_curvature(T, rbar);
  Eigen::VectorXd r0 = perturb(rbar, 0.3, rng);

  auto opts = base_options(T, FlowMethod::ricci, r0, Kbar);
  opts.max_time = 1e-3;
  CHECK(ricci_flow(T, opts).termination == Termination::max_time);

  opts = base_options(T, FlowMethod::ricci, r0, Kbar);
  opts.max_iters = 3;
  FlowTrace tr = ricci_flow(T, opts);
  CHECK(tr.termination == Termination::max_iters);
  CHECK(tr.samples.size() == 4);  // t=0 plus three accepted steps

  auto nopts = base_options(T, FlowMethod::newton, r0, Kbar);
  nopts.max_iters = 1;
  nopts.tol = 1e-15;
  CHECK(newton_solve(T, nopts).termination == Termination::max_iters);
}

TEST_CASE("option validation") {
  auto T = oracle::load_fixture("doubled_tetrahedron.json");
  Eigen::VectorXd r0 = Eigen::VectorXd::Ones(4);
  Eigen::VectorXd Kbar = scalar_curvature(T, r0);
  auto opts = base_options(T, FlowMethod::calabi, r0, Kbar);
  CHECK_THROWS_AS(ricci_flow(T, opts), DomainError);  // method mismatch
  opts.method = FlowMethod::ricci;
  opts.tol = 0.0;
  CHECK_THROWS_AS(ricci_flow(T, opts), DomainError);
  opts.tol = 1e-10;
  opts.K_target = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(ricci_flow(T, opts), DomainError);
  opts.K_target = Kbar;
  opts.r0 = Eigen::VectorXd::Constant(4, 1e-9);  // below the positivity floor
  CHECK_THROWS_AS(ricci_flow(T, opts), DomainError);
}

TEST_CASE("bounds: formulas, limits, ordering") {
  // large ceiling: cos -> (1+1)/(1+3) = 1/2 and the area bound collapses to 0
  CurvatureBounds b = bounds(50.0, 1.0, 2, 4);
  CHECK(b.cos_uniform == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(b.area_uniform) < 1e-12);
  // tiny floor parameter: cos_pinched -> 1/2 + 1/(2 (1 + tanh^2 M))
  double M = 1.0, m = std::tanh(M);
  b = bounds(M, 1e-12, 2, 4);
  CHECK(b.cos_pinched == doctest::Approx(0.5 + 1.0 / (2 * (1 + m * m))).epsilon(1e-10));
  // explicit formulas and ordering
  b = bounds(1.0, 0.5, 0, 8);
  double u = std::tanh(0.5);
  CHECK(b.cos_uniform == doctest::Approx((1 + m * m) / (1 + 3 * m * m)).epsilon(1e-15));
  CHECK(b.cos_pinched ==
        doctest::Approx(0.5 + (1 - u * u) / (2 * (1 + m * m + 2 * u * m))).epsilon(1e-15));
  CHECK(b.area_pinched > b.area_uniform);
  CHECK(b.K_high > b.K_low);
  CHECK(b.K_low == doctest::Approx(8 * b.area_uniform).epsilon(1e-15));
}

TEST_CASE("bounds: attained by the kernel at the corner configurations") {
  for (double M : {0.5, 1.0, 3.0}) {
    double c = 0.4 * M;
    CurvatureBounds b = bounds(M, c, 2, 2);
    auto areas_uniform = tet_vertex_areas({M, M, M, M});
    CHECK(std::abs(areas_uniform[0] - b.area_uniform) < 1e-12);
    auto areas_pinched = tet_vertex_areas({c, M, M, M});
    CHECK(std::abs(areas_pinched[0] - b.area_pinched) < 1e-12);
    auto beta = tet_dihedral_angles({M, M, M, M});
    CHECK(std::abs(std::cos(beta[0]) - b.cos_uniform) < 1e-12);
  }
}

TEST_CASE("bounds: domain errors") {
  CHECK_THROWS_AS(bounds(-1.0, 0.5, 2, 4), DomainError);
  CHECK_THROWS_AS(bounds(1.0, 0.0, 2, 4), DomainError);
  CHECK_THROWS_AS(bounds(1.0, 1.0, 2, 4), DomainError);
  CHECK_THROWS_AS(bounds(1.0, 1.5, 2, 4), DomainError);
  CHECK_THROWS_AS(bounds(1.0, 0.5, 2, 0), DomainError);
}

TEST_CASE("rate estimate: exact exponential decay") {
  std::vector<FlowSample> samples;
  for (int i = 0; i <= 100; ++i) {
    FlowSample s;
    s.t = 0.1 * i;
    s.residual = std::exp(-1.7 * s.t);
    samples.push_back(s);
  }
  CHECK(estimate_rate(samples) == doctest::Approx(-1.7).epsilon(1e-9));
  CHECK(std::isnan(estimate_rate({})));
}
