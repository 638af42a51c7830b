#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hyperflow/flows.hpp"

namespace hyperflow {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

// CSV trace with header t,step,residual,r0,...,r{N-1}; one row per sample.
void write_trace_csv(std::ostream& os, const FlowTrace& trace, int sample_every = 1);

nlohmann::ordered_json trace_to_json(const FlowTrace& trace, int sample_every = 1);

nlohmann::ordered_json validation_report(const Triangulation& T);

// Per-vertex curvature under both forms, per-edge Ricci curvature, and
// optionally the Jacobian.
nlohmann::ordered_json curvature_report(const Triangulation& T, const PackingMetric& r,
                                        bool with_jacobian);
void write_curvature_csv(std::ostream& os, const Triangulation& T, const PackingMetric& r);

nlohmann::ordered_json bounds_report(const CurvatureBounds& b);

}  // namespace hyperflow
