#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "randers/randers.hpp"

namespace {

using randers::ConfigError;
using randers::MetricSpec;
namespace rep = randers::report;

struct GlobalOptions {
  std::optional<double> K;
  std::optional<std::string> sign;
  std::optional<std::string> hemisphere;
  std::string config;
  std::string format = "text";
  std::string out;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

MetricSpec resolve_spec(const GlobalOptions& g, double default_K) {
  MetricSpec s{default_K, +1, +1, 1.0};
  if (!g.config.empty()) {
    try {
      s = MetricSpec::from_config(read_file(g.config));
    } catch (const randers::DomainError& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    }
  }
  if (g.K) s.K = *g.K;
  if (g.sign) s.sign = MetricSpec::parse_sign(*g.sign);
  if (g.hemisphere) s.hemisphere = MetricSpec::parse_hemisphere(*g.hemisphere);
  return s;
}

std::string checks_csv(const rep::Report& r) {
  std::ostringstream os;
  os << std::setprecision(17) << "check,value,relation,tolerance,pass\n";
  for (const auto& c : r.checks)
    os << '"' << c.name << '"' << ',' << c.value << ',' << c.relation << ',' << c.tolerance << ','
       << (c.pass ? "true" : "false") << '\n';
  return os.str();
}

void flatten(std::ostringstream& os, const std::string& prefix, const nlohmann::json& j) {
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten(os, prefix.empty() ? std::to_string(i + 1) : prefix + ":" + std::to_string(i + 1), j[i]);
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(os, prefix.empty() ? k : prefix + "/" + k, v);
  } else {
    os << prefix << ',' << j.get<double>() << '\n';
  }
}

std::string table_csv(const rep::Report& r) {
  std::ostringstream os;
  os << std::setprecision(17) << "index,value\n";
  flatten(os, "", r.doc.at("table"));
  return os.str();
}

void emit(const std::string& text, const GlobalOptions& g) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(g.out);
  if (!os) throw ConfigError("cannot write " + g.out);
  os << text;
}

std::string render(const rep::Report& r, const GlobalOptions& g, const std::string& csv) {
  if (g.format == "json") return r.doc.dump(2) + "\n";
  if (g.format == "csv") return csv;
  return r.text;
}

int finish(const rep::Report& r, const GlobalOptions& g, const std::string& csv) {
  emit(render(r, g, csv), g);
  if (r.pass()) return 0;
  std::cerr << "failing checks:\n";
  for (const auto& name : r.failing()) std::cerr << "  " << name << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for a family of Randers metrics of constant flag curvature on S^3"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--K", g.K, "flag curvature K");
  app.add_option("--sign", g.sign, "drift sign (+ or -)");
  app.add_option("--hemisphere", g.hemisphere, "chart hemisphere (right or left)");
  app.add_option("--config", g.config, "metric config file (K = .., sign = .., hemisphere = ..)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--out", g.out, "write the report to this path");
  app.add_flag("--timing", g.timing, "include wall-clock timing in the report");

  rep::VerifyConfig vc;
  std::string vprec = "auto";
  std::string samples_file;
  std::optional<int> vorder;
  auto* verify = app.add_subcommand("verify", "constant flag curvature check at sampled points");
  verify->add_option("--samples", vc.samples, "number of random samples");
  verify->add_option("--seed", vc.seed, "random seed");
  verify->add_option("--order", vorder, "jet order (default FINSLER_JET_ORDER or 6)");
  verify->add_option("--tol", vc.tol, "normalized residual tolerance");
  verify->add_option("--quot-tol", vc.quot_tol, "quot deviation tolerance on reference samples");
  verify->add_option("--flag-tol", vc.flag_tol, "relative flag curvature tolerance");
  verify->add_flag("--paper-samples", vc.paper_samples, "also evaluate the seven reference tuples");
  verify->add_option("--sample-file", samples_file, "explicit reference sample fixture (CSV)");
  verify->add_option("--precision", vprec, "auto, double or quad")->check(CLI::IsMember({"auto", "double", "quad"}));
  verify->add_option("--threads", vc.threads, "worker threads (0: all cores)");

  rep::YSConfig yc;
  std::optional<double> lam, eps;
  auto* ys = app.add_subcommand("ys-criteria", "closed-form Yasuda-Shimada criteria");
  ys->add_option("--lambda-override", lam, "use this lambda instead of the solved one");
  ys->add_option("--epsilon-override", eps, "use this epsilon instead of the solved one");

  rep::FrameTablesConfig fc;
  std::vector<double> fv;
  auto* ft = app.add_subcommand("frame-tables", "orthonormal-frame tables");
  ft->add_option("--table", fc.table, "table name");
  ft->add_option("--frame-vector", fv, "frame components u v w")->expected(3);

  rep::ProjectiveConfig pc;
  std::optional<int> porder;
  std::string pprec = "double";
  auto* pj = app.add_subcommand("projective", "projective Weyl and Douglas tensors");
  pj->add_option("--samples", pc.samples, "number of random samples");
  pj->add_option("--seed", pc.seed, "random seed");
  pj->add_option("--order", porder, "jet order (default FINSLER_JET_ORDER or 6)");
  pj->add_option("--precision", pprec, "double or quad")->check(CLI::IsMember({"double", "quad"}));
  pj->add_option("--threads", pc.threads, "worker threads (0: all cores)");

  rep::GeodesicConfig gc;
  std::vector<double> gp, gv;
  std::optional<double> speed;
  std::string trajectory;
  auto* geo = app.add_subcommand("geodesic", "RK4 geodesic with speed conservation");
  geo->add_option("--point", gp, "initial chart point x y z")->expected(3);
  geo->add_option("--velocity", gv, "initial velocity u v w")->expected(3);
  geo->add_option("--speed", speed, "rescale the initial velocity to this Finsler speed");
  geo->add_option("--seed", gc.seed, "seed for a random initial state");
  geo->add_option("--t-end", gc.t_end, "final time");
  geo->add_option("--dt", gc.dt, "step size");
  geo->add_option("--radius", gc.chart_radius, "chart radius at which the run stops");
  geo->add_option("--tol", gc.tol, "speed drift tolerance");
  geo->add_flag("--convergence", gc.convergence, "also check the RK4 order by dt halving");
  geo->add_option("--convergence-dt", gc.convergence_dt, "coarse step for the order check");
  geo->add_option("--trajectory", trajectory, "write the trajectory CSV here");
  geo->add_option("--record-every", gc.record_every, "record every n-th step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      vc.spec = resolve_spec(g, 2.0);
      vc.order = vorder ? *vorder : rep::default_jet_order();
      vc.precision = rep::parse_precision(vprec);
      vc.timing = g.timing;
      if (!samples_file.empty()) vc.explicit_samples = randers::load_reference_samples(samples_file);
      const auto r = rep::cmd_verify(vc);
      return finish(r, g, rep::verify_csv(r));
    }
    if (*ys) {
      const MetricSpec s = resolve_spec(g, 2.0);
      yc.K = s.K;
      yc.sign = s.sign;
      yc.lambda_override = lam;
      yc.epsilon_override = eps;
      const auto r = rep::cmd_ys_criteria(yc);
      return finish(r, g, checks_csv(r));
    }
    if (*ft) {
      const MetricSpec s = resolve_spec(g, 2.0);
      fc.K = s.K;
      fc.sign = s.sign;
      if (!fv.empty()) fc.y = {fv[0], fv[1], fv[2]};
      const auto r = rep::cmd_frame_tables(fc);
      return finish(r, g, table_csv(r));
    }
    if (*pj) {
      pc.spec = resolve_spec(g, 4.0);
      pc.order = porder ? *porder : rep::default_jet_order();
      pc.precision = rep::parse_precision(pprec);
      pc.timing = g.timing;
      const auto r = rep::cmd_projective(pc);
      return finish(r, g, checks_csv(r));
    }
    if (*geo) {
      gc.spec = resolve_spec(g, 4.0);
      if (!gp.empty()) gc.point = randers::ChartPoint{gp[0], gp[1], gp[2]};
      if (!gv.empty()) gc.velocity = randers::TangentCoords{gv[0], gv[1], gv[2]};
      gc.speed = speed;
      gc.timing = g.timing;
      const auto res = rep::cmd_geodesic(gc);
      std::ostringstream csv;
      randers::write_trajectory_csv(csv, res.run);
      if (!trajectory.empty()) {
        std::ofstream os(trajectory);
        if (!os) throw ConfigError("cannot write " + trajectory);
        os << csv.str();
      }
      return finish(res.report, g, csv.str());
    }
  } catch (const randers::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const randers::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
