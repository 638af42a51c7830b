"""Curvature and flow computations for generalized sphere packing metrics on
ideally triangulated compact 3-manifolds with boundary."""

from hyperflow._core import (
    Bounds,
    FlowOptions,
    FlowTrace,
    LinkSummary,
    NewtonReport,
    Triangulation,
    bounds,
    calabi_flow,
    curvature_energy,
    curvature_jacobian,
    edge_ricci,
    newton_solve,
    parse_triangulation,
    ricci_flow,
    scalar_curvature,
    scalar_curvature_gb,
    tet_area_jacobian,
    tet_dihedral_angles,
    tet_dihedral_partials,
    tet_q2,
    tet_vertex_areas,
)

__all__ = [
    "Bounds",
    "FlowOptions",
    "FlowTrace",
    "LinkSummary",
    "NewtonReport",
    "Triangulation",
    "bounds",
    "calabi_flow",
    "curvature_energy",
    "curvature_jacobian",
    "edge_ricci",
    "load_triangulation",
    "newton_solve",
    "parse_triangulation",
    "ricci_flow",
    "scalar_curvature",
    "scalar_curvature_gb",
    "tet_area_jacobian",
    "tet_dihedral_angles",
    "tet_dihedral_partials",
    "tet_q2",
    "tet_vertex_areas",
]

__version__ = "0.1.0"


def load_triangulation(path):
    """Parse and validate a triangulation JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_triangulation(fh.read())
