#include "hyperflow/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace hyperflow {

using nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

ordered_json json_vector(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

// keeps every sample_every-th sample plus the first and last
bool keep_sample(std::size_t i, std::size_t count, int every) {
  if (every <= 1) return true;
  return i == 0 || i + 1 == count || i % static_cast<std::size_t>(every) == 0;
}

}  // namespace

void write_trace_csv(std::ostream& os, const FlowTrace& trace, int sample_every) {
  const int n = trace.samples.empty() ? 0 : static_cast<int>(trace.samples.front().r.size());
  os << "t,step,residual";
  for (int i = 0; i < n; ++i) os << ",r" << i;
  os << "\n";
  for (std::size_t s = 0; s < trace.samples.size(); ++s) {
    if (!keep_sample(s, trace.samples.size(), sample_every)) continue;
    const auto& smp = trace.samples[s];
    os << format_double(smp.t) << ',' << format_double(smp.step) << ','
       << format_double(smp.residual);
    for (int i = 0; i < n; ++i) os << ',' << format_double(smp.r[i]);
    os << "\n";
  }
}

ordered_json trace_to_json(const FlowTrace& trace, int sample_every) {
  ordered_json j;
  j["termination"] = to_string(trace.termination);
  j["final_residual"] = trace.final_residual;
  if (std::isnan(trace.rate_estimate))
    j["rate_estimate"] = nullptr;
  else
    j["rate_estimate"] = trace.rate_estimate;
  j["max_radius_seen"] = trace.max_radius_seen;
  j["rhs_evaluations"] = trace.rhs_evaluations;
  if (!trace.message.empty()) j["message"] = trace.message;
  ordered_json samples = ordered_json::array();
  for (std::size_t s = 0; s < trace.samples.size(); ++s) {
    if (!keep_sample(s, trace.samples.size(), sample_every)) continue;
    const auto& smp = trace.samples[s];
    ordered_json js;
    js["t"] = smp.t;
    js["step"] = smp.step;
    js["residual"] = smp.residual;
    js["energy"] = smp.energy;
    js["r"] = json_vector(smp.r);
    samples.push_back(std::move(js));
  }
  j["samples"] = std::move(samples);
  return j;
}

ordered_json validation_report(const Triangulation& T) {
  ordered_json j;
  j["n_vertices"] = T.num_vertices();
  j["n_tets"] = T.num_tets();
  j["n_edge_classes"] = T.num_edge_classes();
  ordered_json verts = ordered_json::array();
  for (int i = 0; i < T.num_vertices(); ++i) {
    auto L = T.vertex_link(i);
    ordered_json v;
    v["vertex"] = i;
    v["original_id"] = T.original_vertex_ids()[i];
    v["degree"] = L.degree;
    v["euler_char"] = L.euler_char;
    v["link_faces"] = L.faces;
    v["link_edges"] = L.edges;
    v["link_vertices"] = L.vertices;
    verts.push_back(std::move(v));
  }
  j["vertices"] = std::move(verts);
  ordered_json edges = ordered_json::array();
  for (int e = 0; e < T.num_edge_classes(); ++e) {
    const auto& cls = T.edge_classes()[e];
    ordered_json je;
    je["edge"] = e;
    je["u"] = cls.u;
    je["v"] = cls.v;
    je["members"] = cls.members.size();
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

ordered_json curvature_report(const Triangulation& T, const PackingMetric& r,
                              bool with_jacobian) {
  Eigen::VectorXd K = scalar_curvature(T, r);
  Eigen::VectorXd Kgb = scalar_curvature_gb(T, r);
  auto Ke = edge_ricci(T, r);
  ordered_json j;
  j["n_vertices"] = T.num_vertices();
  j["K"] = json_vector(K);
  j["K_gauss_bonnet"] = json_vector(Kgb);
  j["max_discrepancy"] = (K - Kgb).lpNorm<Eigen::Infinity>();
  ordered_json edges = ordered_json::array();
  for (int e = 0; e < T.num_edge_classes(); ++e) {
    ordered_json je;
    je["edge"] = e;
    je["u"] = T.edge_classes()[e].u;
    je["v"] = T.edge_classes()[e].v;
    je["ricci"] = Ke[e];
    edges.push_back(std::move(je));
  }
  j["edge_ricci"] = std::move(edges);
  if (with_jacobian) {
    Eigen::MatrixXd lambda = Eigen::MatrixXd(curvature_jacobian(T, r));
    ordered_json rows = ordered_json::array();
    for (Eigen::Index a = 0; a < lambda.rows(); ++a) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index b = 0; b < lambda.cols(); ++b) row.push_back(lambda(a, b));
      rows.push_back(std::move(row));
    }
    j["jacobian"] = std::move(rows);
  }
  return j;
}

void write_curvature_csv(std::ostream& os, const Triangulation& T, const PackingMetric& r) {
  Eigen::VectorXd K = scalar_curvature(T, r);
  Eigen::VectorXd Kgb = scalar_curvature_gb(T, r);
  auto Ke = edge_ricci(T, r);
  os << "vertex,K_edge_sum,K_gauss_bonnet\n";
  for (int i = 0; i < T.num_vertices(); ++i)
    os << i << ',' << format_double(K[i]) << ',' << format_double(Kgb[i]) << "\n";
  os << "edge,u,v,ricci\n";
  for (int e = 0; e < T.num_edge_classes(); ++e)
    os << e << ',' << T.edge_classes()[e].u << ',' << T.edge_classes()[e].v << ','
       << format_double(Ke[e]) << "\n";
}

ordered_json bounds_report(const CurvatureBounds& b) {
  ordered_json j;
  j["Ctilde1"] = b.cos_uniform;
  j["Ctilde2"] = b.cos_pinched;
  j["AreaBound1"] = b.area_uniform;
  j["AreaBound2"] = b.area_pinched;
  j["C1"] = b.K_low;
  j["C2"] = b.K_high;
  return j;
}

}  // namespace hyperflow
