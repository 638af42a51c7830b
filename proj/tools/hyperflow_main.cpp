#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hyperflow/curvature.hpp"
#include "hyperflow/flows.hpp"
#include "hyperflow/tetkernel.hpp"
#include "hyperflow/trace_io.hpp"
#include "hyperflow/triangulation.hpp"

namespace {

using namespace hyperflow;

// Exit codes, stable for scripting:
//   0 ok / converged          10 max_iters
//   1 cannot read input       11 max_time
//   2 invalid triangulation   12 step_underflow
//   3 bad arguments/domain    13 left_positive_orthant (boundary stagnation)
//  70 internal invariant      14 line_search_failure
enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kValidationError = 2,
  kDomainError = 3,
  kInternalError = 70,
};

int exit_code_for(Termination t) {
  switch (t) {
    case Termination::converged: return 0;
    case Termination::max_iters: return 10;
    case Termination::max_time: return 11;
    case Termination::step_underflow: return 12;
    case Termination::left_positive_orthant: return 13;
    case Termination::line_search_failure: return 14;
  }
  return kInternalError;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == '[' || c == ']' || c == '\n' || c == '\t') c = ' ';
  std::istringstream ss(cleaned);
  double x;
  while (ss >> x) out.push_back(x);
  ss.clear();
  std::string leftover;
  if (ss >> leftover) throw DomainError("cannot parse number list near '" + leftover + "'");
  return out;
}

// Sources: "@file" (numbers or JSON array), inline comma list, or a single
// constant broadcast to length n.
Eigen::VectorXd parse_vector_source(const std::string& src, int n, const std::string& what) {
  std::vector<double> vals;
  if (!src.empty() && src[0] == '@') {
    vals = parse_number_list(read_file(src.substr(1)));
  } else {
    vals = parse_number_list(src);
  }
  if (vals.empty()) throw DomainError(what + ": no numbers given");
  if (vals.size() == 1) {
    return Eigen::VectorXd::Constant(n, vals[0]);
  }
  if (static_cast<int>(vals.size()) != n)
    throw DomainError(what + ": got " + std::to_string(vals.size()) + " values, need " +
                      std::to_string(n));
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = vals[i];
  return v;
}

void warn_if_saturated(const Eigen::VectorXd& r) {
  if (metric_saturated(r))
    std::cerr << "warning: radii above " << kRadiusSaturationThreshold
              << " saturate tanh and degrade derivative information\n";
}

void write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ParseError("cannot open output file: " + out_path);
  out << payload;
}

struct CommonArgs {
  std::string input;
  std::string radii;
  std::string format = "json";
  std::string out_path;
};

int cmd_validate(const std::string& input, const std::string& format,
                 const std::string& out_path) {
  Triangulation T = Triangulation::parse(read_file(input));
  std::ostringstream os;
  if (format == "json") {
    os << validation_report(T).dump(2) << "\n";
  } else {
    os << "N=" << T.num_vertices() << " tets=" << T.num_tets()
       << " edges=" << T.num_edge_classes() << "\n";
    for (int i = 0; i < T.num_vertices(); ++i) {
      auto L = T.vertex_link(i);
      os << "vertex " << i << ": d=" << L.degree << " chi=" << L.euler_char
         << " link F=" << L.faces << " E=" << L.edges << " V=" << L.vertices << "\n";
    }
  }
  write_output(out_path, os.str());
  return kOk;
}

int cmd_curvature(const CommonArgs& args, bool with_jacobian) {
  Triangulation T = Triangulation::parse(read_file(args.input));
  Eigen::VectorXd r = parse_vector_source(args.radii, T.num_vertices(), "--radii");
  warn_if_saturated(r);
  std::ostringstream os;
  if (args.format == "csv") {
    write_curvature_csv(os, T, r);
  } else {
    os << curvature_report(T, r, with_jacobian).dump(2) << "\n";
  }
  write_output(args.out_path, os.str());
  return kOk;
}

int cmd_flow(const CommonArgs& args, const std::string& target, const std::string& method,
             double tol, int max_iters, double max_time, int sample_every) {
  Triangulation T = Triangulation::parse(read_file(args.input));
  FlowOptions opts;
  opts.tol = tol;
  opts.max_iters = max_iters;
  opts.max_time = max_time;
  opts.r0 = parse_vector_source(args.radii, T.num_vertices(), "--radii");
  warn_if_saturated(opts.r0);
  if (target == "current") {
    opts.K_target = scalar_curvature(T, opts.r0);
  } else {
    opts.K_target = parse_vector_source(target, T.num_vertices(), "--target");
  }

  FlowTrace trace;
  std::string method_name = method;
  if (method == "ricci") {
    opts.method = FlowMethod::ricci;
    trace = ricci_flow(T, opts);
  } else if (method == "calabi") {
    opts.method = FlowMethod::calabi;
    trace = calabi_flow(T, opts);
  } else if (method == "newton") {
    opts.method = FlowMethod::newton;
    trace = newton_solve(T, opts).trace;
  } else {
    throw DomainError("--method must be one of ricci|calabi|newton");
  }

  std::ostringstream os;
  if (args.format == "csv") {
    write_trace_csv(os, trace, sample_every);
  } else {
    auto j = trace_to_json(trace, sample_every);
    j["method"] = method_name;
    os << j.dump(2) << "\n";
  }
  write_output(args.out_path, os.str());

  std::ostream& summary = args.out_path.empty() ? std::cerr : std::cout;
  summary << "method=" << method_name << " termination=" << to_string(trace.termination)
          << " steps=" << (trace.samples.empty() ? 0 : trace.samples.size() - 1)
          << " final_residual=" << format_double(trace.final_residual) << " rate_estimate="
          << (std::isnan(trace.rate_estimate) ? std::string("nan")
                                              : format_double(trace.rate_estimate));
  if (!trace.message.empty()) summary << " message=\"" << trace.message << "\"";
  summary << "\n";
  return exit_code_for(trace.termination);
}

int cmd_bounds(double M, double c, int chi, int d, const std::string& format,
               const std::string& out_path) {
  CurvatureBounds b = bounds(M, c, chi, d);
  std::ostringstream os;
  if (format == "csv") {
    os << "Ctilde1,Ctilde2,AreaBound1,AreaBound2,C1,C2\n"
       << format_double(b.cos_uniform) << ',' << format_double(b.cos_pinched) << ','
       << format_double(b.area_uniform) << ',' << format_double(b.area_pinched) << ','
       << format_double(b.K_low) << ',' << format_double(b.K_high) << "\n";
  } else if (format == "json") {
    os << bounds_report(b).dump(2) << "\n";
  } else {
    os << "Ctilde1=" << format_double(b.cos_uniform)
       << " Ctilde2=" << format_double(b.cos_pinched)
       << " AreaBound1=" << format_double(b.area_uniform)
       << " AreaBound2=" << format_double(b.area_pinched)
       << " C1=" << format_double(b.K_low) << " C2=" << format_double(b.K_high) << "\n";
  }
  write_output(out_path, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature and flow computations for generalized sphere packing "
               "metrics on ideally triangulated 3-manifolds with boundary"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "parse and validate a triangulation file");
  std::string v_input, v_format = "text", v_out;
  validate->add_option("input", v_input, "triangulation JSON file")->required();
  validate->add_option("--format", v_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  validate->add_option("--out", v_out, "output path (default stdout)");

  // curvature
  auto* curv = app.add_subcommand("curvature", "evaluate curvature at a metric");
  CommonArgs c_args;
  bool c_jacobian = false;
  curv->add_option("input", c_args.input, "triangulation JSON file")->required();
  curv->add_option("--radii", c_args.radii,
                   "metric radii: comma list, @file, or a single constant")
      ->required();
  curv->add_option("--format", c_args.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  curv->add_option("--out", c_args.out_path, "output path (default stdout)");
  curv->add_flag("--jacobian", c_jacobian, "include the curvature Jacobian (json only)");

  // flow
  auto* flow = app.add_subcommand("flow", "run a curvature flow or Newton solve");
  CommonArgs f_args;
  f_args.format = "csv";
  std::string f_target = "current", f_method = "ricci";
  double f_tol = 1e-10, f_max_time = 1e4;
  int f_max_iters = 100000, f_sample_every = 1;
  flow->add_option("input", f_args.input, "triangulation JSON file")->required();
  flow->add_option("--radii", f_args.radii, "initial radii")->required();
  flow->add_option("--target", f_target,
                   "target curvature: comma list, @file, constant, or 'current'");
  flow->add_option("--method", f_method, "ricci|calabi|newton")
      ->check(CLI::IsMember({"ricci", "calabi", "newton"}));
  flow->add_option("--tol", f_tol, "residual tolerance on max|K - K_target|");
  flow->add_option("--max-iters", f_max_iters, "max accepted steps / iterations");
  flow->add_option("--max-time", f_max_time, "flow time horizon");
  flow->add_option("--sample-every", f_sample_every, "keep every k-th trace sample");
  flow->add_option("--format", f_args.format, "csv|json")
      ->check(CLI::IsMember({"json", "csv"}));
  flow->add_option("--out", f_args.out_path, "trace output path (default stdout)");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "convergence-threshold constants");
  double b_M = 0, b_c = 0;
  int b_chi = 0, b_d = 0;
  std::string b_format = "text", b_out;
  bnd->add_option("M", b_M, "radius ceiling")->required();
  bnd->add_option("c", b_c, "radius floor parameter, in (0, M)")->required();
  bnd->add_option("chi", b_chi, "Euler characteristic of the vertex link")->required();
  bnd->add_option("d", b_d, "vertex degree")->required();
  bnd->add_option("--format", b_format, "text|json|csv")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  bnd->add_option("--out", b_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*validate) return cmd_validate(v_input, v_format, v_out);
    if (*curv) return cmd_curvature(c_args, c_jacobian);
    if (*flow)
      return cmd_flow(f_args, f_target, f_method, f_tol, f_max_iters, f_max_time,
                      f_sample_every);
    if (*bnd) return cmd_bounds(b_M, b_c, b_chi, b_d, b_format, b_out);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kOk;
}
