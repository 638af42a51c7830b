"""Smoke tests for the python bindings."""

import math
import os

import numpy as np
import pytest

import hyperflow as hf

FIXTURES = os.environ.get(
    "HYPERFLOW_FIXTURES",
    os.path.join(os.path.dirname(__file__), "..", "fixtures"),
)


def fixture(name):
    return os.path.join(FIXTURES, name)


def test_parse_and_links():
    T = hf.load_triangulation(fixture("doubled_tetrahedron.json"))
    assert T.num_vertices == 4
    assert T.num_tets == 2
    assert T.num_edge_classes == 6
    link = T.vertex_link(0)
    assert (link.faces, link.edges, link.vertices) == (2, 3, 3)
    assert link.euler_char == 2
    assert link.degree == 2


def test_parse_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        hf.parse_triangulation("not json")
    with pytest.raises(ValueError):
        hf.parse_triangulation('{"mode":"simple","tets":[[0,1,2,3]]}')


def test_tet_kernel_values():
    assert hf.tet_q2([1.0, 1.0, 1.0, 1.0]) == pytest.approx(8.64020526708779, abs=1e-13)
    t = math.tanh(1.0)
    beta = hf.tet_dihedral_angles([1.0, 1.0, 1.0, 1.0])
    assert beta[0] == pytest.approx(math.acos((1 + t * t) / (1 + 3 * t * t)), abs=1e-14)
    jac = hf.tet_area_jacobian([0.5, 1.0, 1.5, 2.0])
    assert jac.shape == (4, 4)
    assert np.array_equal(jac, jac.T)
    assert (jac < 0).all()
    partials = hf.tet_dihedral_partials([0.5, 1.0, 1.5, 2.0])
    assert partials.shape == (6, 4)


def test_curvature_forms_agree():
    T = hf.load_triangulation(fixture("bipyramid_double.json"))
    rng = np.random.default_rng(5)
    for _ in range(20):
        r = rng.uniform(0.2, 3.0, T.num_vertices)
        K = hf.scalar_curvature(T, r)
        Kgb = hf.scalar_curvature_gb(T, r)
        assert np.abs(K - Kgb).max() < 1e-9
    lam = hf.curvature_jacobian(T, r)
    assert np.array_equal(lam, lam.T)
    assert np.linalg.eigvalsh(lam).max() < 0


def test_newton_recovers_metric():
    T = hf.load_triangulation(fixture("doubled_tetrahedron.json"))
    rng = np.random.default_rng(11)
    rbar = rng.uniform(0.5, 2.0, 4)
    opts = hf.FlowOptions()
    opts.r0 = np.ones(4)
    opts.K_target = hf.scalar_curvature(T, rbar)
    rep = hf.newton_solve(T, opts)
    assert rep.converged
    assert np.abs(rep.r - rbar).max() < 1e-8


def test_ricci_flow_trace():
    T = hf.load_triangulation(fixture("doubled_tetrahedron.json"))
    rbar = np.array([0.8, 1.1, 0.9, 1.3])
    opts = hf.FlowOptions()
    opts.r0 = rbar * 1.03
    opts.K_target = hf.scalar_curvature(T, rbar)
    trace = hf.ricci_flow(T, opts)
    assert trace.termination == "converged"
    assert trace.final_residual <= opts.tol
    samples = trace.samples()
    assert samples["r"].shape[1] == 4
    assert samples["residual"][-1] <= opts.tol
    assert np.abs(trace.final_r - rbar).max() < 1e-7
    assert trace.rate_estimate < 0


def test_energy_and_bounds():
    T = hf.load_triangulation(fixture("two_tet_torus.json"))
    r = np.array([1.0])
    K = hf.scalar_curvature(T, r)
    assert hf.curvature_energy(T, r, r, K) == 0.0
    b = hf.bounds(1.0, 0.5, 0, 8)
    m, u = math.tanh(1.0), math.tanh(0.5)
    assert b.cos_uniform == pytest.approx((1 + m * m) / (1 + 3 * m * m), abs=1e-15)
    assert b.cos_pinched == pytest.approx(
        0.5 + (1 - u * u) / (2 * (1 + m * m + 2 * u * m)), abs=1e-15
    )
    assert b.area_pinched > b.area_uniform
    assert b.K_high > b.K_low
    with pytest.raises(ValueError):
        hf.bounds(1.0, 1.5, 0, 8)
