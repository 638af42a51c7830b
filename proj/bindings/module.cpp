#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperflow/curvature.hpp"
#include "hyperflow/flows.hpp"
#include "hyperflow/tetkernel.hpp"
#include "hyperflow/triangulation.hpp"

namespace py = pybind11;
using namespace hyperflow;

namespace {

TetRadii to_radii(const std::array<double, 4>& r) { return r; }

py::dict trace_samples(const FlowTrace& trace) {
  const auto n = trace.samples.size();
  const Eigen::Index dim = n ? trace.samples.front().r.size() : 0;
  Eigen::VectorXd t(n), residual(n), step(n), energy(n);
  Eigen::MatrixXd r(n, dim), K(n, dim);
  for (std::size_t s = 0; s < n; ++s) {
    t[s] = trace.samples[s].t;
    residual[s] = trace.samples[s].residual;
    step[s] = trace.samples[s].step;
    energy[s] = trace.samples[s].energy;
    r.row(s) = trace.samples[s].r;
    K.row(s) = trace.samples[s].K;
  }
  py::dict d;
  d["t"] = t;
  d["residual"] = residual;
  d["step"] = step;
  d["energy"] = energy;
  d["r"] = r;
  d["K"] = K;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "curvature and flows for generalized sphere packing metrics";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<LinkSummary>(m, "LinkSummary")
      .def_readonly("faces", &LinkSummary::faces)
      .def_readonly("edges", &LinkSummary::edges)
      .def_readonly("vertices", &LinkSummary::vertices)
      .def_readonly("euler_char", &LinkSummary::euler_char)
      .def_readonly("degree", &LinkSummary::degree)
      .def("__repr__", [](const LinkSummary& L) {
        return "LinkSummary(faces=" + std::to_string(L.faces) +
               ", edges=" + std::to_string(L.edges) +
               ", vertices=" + std::to_string(L.vertices) +
               ", euler_char=" + std::to_string(L.euler_char) +
               ", degree=" + std::to_string(L.degree) + ")";
      });

  py::class_<Triangulation>(m, "Triangulation")
      .def_property_readonly("num_vertices", &Triangulation::num_vertices)
      .def_property_readonly("num_tets", &Triangulation::num_tets)
      .def_property_readonly("num_edge_classes", &Triangulation::num_edge_classes)
      .def("vertex_link", &Triangulation::vertex_link, py::arg("vertex_class"))
      .def("degree", &Triangulation::degree, py::arg("vertex_class"))
      .def("euler_char", &Triangulation::euler_char, py::arg("vertex_class"))
      .def("edge_class_of", &Triangulation::edge_class_of, py::arg("tet"), py::arg("slot"))
      .def("original_vertex_ids", &Triangulation::original_vertex_ids)
      .def("edge_classes",
           [](const Triangulation& T) {
             py::list out;
             for (const auto& cls : T.edge_classes())
               out.append(py::make_tuple(cls.u, cls.v, cls.members));
             return out;
           })
      .def("tets",
           [](const Triangulation& T) {
             py::list out;
             for (const auto& tet : T.tets()) out.append(tet.corners);
             return out;
           })
      .def("__repr__", [](const Triangulation& T) {
        return "Triangulation(vertices=" + std::to_string(T.num_vertices()) +
               ", tets=" + std::to_string(T.num_tets()) +
               ", edge_classes=" + std::to_string(T.num_edge_classes()) + ")";
      });

  m.def("parse_triangulation",
        [](const std::string& text) { return Triangulation::parse(text); },
        py::arg("text"));

  // per-tetrahedron kernel
  m.def("tet_q2", [](std::array<double, 4> r) { return tet_q2(to_radii(r)); }, py::arg("r"));
  m.def("tet_dihedral_angles",
        [](std::array<double, 4> r) { return tet_dihedral_angles(to_radii(r)); }, py::arg("r"));
  m.def("tet_vertex_areas",
        [](std::array<double, 4> r) { return tet_vertex_areas(to_radii(r)); }, py::arg("r"));
  m.def("tet_dihedral_partials",
        [](std::array<double, 4> r) -> Eigen::MatrixXd {
          return tet_dihedral_partials(to_radii(r));
        },
        py::arg("r"));
  m.def("tet_area_jacobian",
        [](std::array<double, 4> r) -> Eigen::MatrixXd { return tet_area_jacobian(to_radii(r)); },
        py::arg("r"));

  // global curvature
  m.def("edge_ricci", &edge_ricci, py::arg("triangulation"), py::arg("r"));
  m.def("scalar_curvature", &scalar_curvature, py::arg("triangulation"), py::arg("r"));
  m.def("scalar_curvature_gb", &scalar_curvature_gb, py::arg("triangulation"), py::arg("r"));
  m.def("curvature_jacobian",
        [](const Triangulation& T, const PackingMetric& r) -> Eigen::MatrixXd {
          return Eigen::MatrixXd(curvature_jacobian(T, r));
        },
        py::arg("triangulation"), py::arg("r"));
  m.def("curvature_energy", &curvature_energy, py::arg("triangulation"), py::arg("r"),
        py::arg("r_base"), py::arg("K_target"));

  // flows
  py::class_<FlowOptions>(m, "FlowOptions")
      .def(py::init<>())
      .def_readwrite("K_target", &FlowOptions::K_target)
      .def_readwrite("r0", &FlowOptions::r0)
      .def_readwrite("tol", &FlowOptions::tol)
      .def_readwrite("max_time", &FlowOptions::max_time)
      .def_readwrite("max_iters", &FlowOptions::max_iters)
      .def_readwrite("init_step", &FlowOptions::init_step)
      .def_readwrite("min_step", &FlowOptions::min_step)
      .def_readwrite("safety", &FlowOptions::safety)
      .def_readwrite("positivity_floor", &FlowOptions::positivity_floor)
      .def_readwrite("ode_rel_tol", &FlowOptions::ode_rel_tol)
      .def_readwrite("ode_abs_tol", &FlowOptions::ode_abs_tol)
      .def_readwrite("use_sparse_solver", &FlowOptions::use_sparse_solver);

  py::class_<FlowTrace>(m, "FlowTrace")
      .def_property_readonly("termination",
                             [](const FlowTrace& t) { return to_string(t.termination); })
      .def_readonly("final_residual", &FlowTrace::final_residual)
      .def_readonly("rate_estimate", &FlowTrace::rate_estimate)
      .def_readonly("max_radius_seen", &FlowTrace::max_radius_seen)
      .def_readonly("rhs_evaluations", &FlowTrace::rhs_evaluations)
      .def_readonly("message", &FlowTrace::message)
      .def_property_readonly("num_samples",
                             [](const FlowTrace& t) { return t.samples.size(); })
      .def("samples", &trace_samples)
      .def_property_readonly("final_r", [](const FlowTrace& t) {
        return t.samples.empty() ? Eigen::VectorXd() : t.samples.back().r;
      });

  py::class_<NewtonReport>(m, "NewtonReport")
      .def_readonly("converged", &NewtonReport::converged)
      .def_property_readonly("termination",
                             [](const NewtonReport& r) { return to_string(r.termination); })
      .def_readonly("r", &NewtonReport::r)
      .def_readonly("residual", &NewtonReport::residual)
      .def_readonly("iterations", &NewtonReport::iterations)
      .def_readonly("message", &NewtonReport::message)
      .def_readonly("trace", &NewtonReport::trace);

  auto with_method = [](FlowOptions opts, FlowMethod m) {
    opts.method = m;
    return opts;
  };
  m.def("ricci_flow",
        [with_method](const Triangulation& T, const FlowOptions& opts) {
          return ricci_flow(T, with_method(opts, FlowMethod::ricci));
        },
        py::arg("triangulation"), py::arg("options"));
  m.def("calabi_flow",
        [with_method](const Triangulation& T, const FlowOptions& opts) {
          return calabi_flow(T, with_method(opts, FlowMethod::calabi));
        },
        py::arg("triangulation"), py::arg("options"));
  m.def("newton_solve",
        [with_method](const Triangulation& T, const FlowOptions& opts) {
          return newton_solve(T, with_method(opts, FlowMethod::newton));
        },
        py::arg("triangulation"), py::arg("options"));

  py::class_<CurvatureBounds>(m, "Bounds")
      .def_readonly("cos_uniform", &CurvatureBounds::cos_uniform)
      .def_readonly("cos_pinched", &CurvatureBounds::cos_pinched)
      .def_readonly("area_uniform", &CurvatureBounds::area_uniform)
      .def_readonly("area_pinched", &CurvatureBounds::area_pinched)
      .def_readonly("K_low", &CurvatureBounds::K_low)
      .def_readonly("K_high", &CurvatureBounds::K_high);
  m.def("bounds", &bounds, py::arg("M"), py::arg("c"), py::arg("chi"), py::arg("degree"));
}
