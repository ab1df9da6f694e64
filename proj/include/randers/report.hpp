#pragma once

// Verification commands behind the command-line tool.  Each command takes a
// resolved config and returns a Report: a JSON document (the canonical form)
// plus check verdicts.  Text and CSV renderings are derived from it.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "randers/errors.hpp"
#include "randers/frame_geometry.hpp"
#include "randers/geodesics.hpp"
#include "randers/parallel.hpp"
#include "randers/quad.hpp"
#include "randers/randers_engine.hpp"
#include "randers/s3_model.hpp"
#include "randers/samples.hpp"

namespace randers::report {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

enum class Precision { Auto, Double, Quad };

inline std::string to_string(Precision p) {
  switch (p) {
    case Precision::Double:
      return "double";
    case Precision::Quad:
      return "quad";
    default:
      return "auto";
  }
}

inline Precision parse_precision(const std::string& s) {
  if (s == "auto") return Precision::Auto;
  if (s == "double") return Precision::Double;
  if (s == "quad") return Precision::Quad;
  throw ConfigError("precision must be auto, double or quad (got '" + s + "')");
}

/// Jet order default: FINSLER_JET_ORDER if set, else 6.
inline int default_jet_order() {
  const char* env = std::getenv("FINSLER_JET_ORDER");
  if (env == nullptr || *env == '\0') return kDefaultJetOrder;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > kMaxJetOrder) {
    throw ConfigError(std::string("FINSLER_JET_ORDER must be an integer in [0, 12] (got '") + env + "')");
  }
  return static_cast<int>(v);
}

struct Check {
  std::string name;
  double value = 0;
  double tolerance = 0;
  std::string relation = "<";  // value relation tolerance must hold
  bool pass = false;
};

inline Check check_below(std::string name, double value, double tol) {
  return {std::move(name), value, tol, "<", value < tol};
}

inline Check check_above(std::string name, double value, double floor) {
  return {std::move(name), value, floor, ">", value > floor};
}

struct Report {
  json doc;
  std::vector<Check> checks;
  std::string text;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

namespace detail {

inline json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json to_json(const Mat3& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(to_json(row));
  return a;
}

/// NaN entries become null.
inline json to_json_nullable(const Mat3& m) {
  json a = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (double x : row) r.push_back(std::isnan(x) ? json(nullptr) : json(x));
    a.push_back(r);
  }
  return a;
}

inline json to_json(const frame::Tensor3& t) {
  json a = json::array();
  for (const auto& m : t) a.push_back(to_json(m));
  return a;
}

inline json to_json(const frame::Tensor4& t) {
  json a = json::array();
  for (const auto& m : t) a.push_back(to_json(m));
  return a;
}

inline json spec_json(const MetricSpec& s) {
  json j = {{"K", s.K}, {"sign", s.sign > 0 ? "+" : "-"}, {"hemisphere", s.hemisphere > 0 ? "right" : "left"}};
  if (s.drift_scale != 1.0) j["drift_scale"] = s.drift_scale;
  return j;
}

inline json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name},
                 {"value", c.value},
                 {"relation", c.relation},
                 {"tolerance", c.tolerance},
                 {"pass", c.pass}});
  return a;
}

inline json environment_json() {
  json env = {{"tool_version", kVersion}, {"scalar", "binary64"}, {"extended_scalar", "binary128"}};
#ifdef __VERSION__
  env["compiler"] = __VERSION__;
#endif
  return env;
}

inline std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

inline void finish(Report& r) {
  r.doc["checks"] = checks_json(r.checks);
  r.doc["verdict"] = r.pass() ? "pass" : "fail";
  r.doc["failing_checks"] = r.failing();
  std::ostringstream os;
  os << r.text;
  for (const auto& c : r.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << fmt(c.value, 4) << " " << c.relation << " "
       << fmt(c.tolerance, 4) << "\n";
  }
  os << "verdict: " << (r.pass() ? "pass" : "fail") << "\n";
  r.text = os.str();
}

/// Wraps the Yasuda-Shimada solve so K < 1 surfaces as a config error.
inline frame::YSSolution solve_or_config_error(const MetricSpec& spec) {
  try {
    spec.validate();
    return frame::solve_ys(spec.K, spec.sign);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid metric: ") + e.what());
  }
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace detail

// verify

struct VerifyConfig {
  MetricSpec spec;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  int order = kDefaultJetOrder;
  double tol = 1e-8;        // normalized constant-curvature residual
  double quot_tol = 1e-9;   // defined quot entries of reference samples
  double flag_tol = 1e-7;   // relative flag-curvature deviation
  bool paper_samples = false;
  std::vector<ReferenceSample> explicit_samples;  // replaces the built-in reference set when non-empty
  Precision precision = Precision::Auto;  // Auto: double for random, quad for reference samples
  unsigned threads = 0;                    // 0: hardware concurrency
  bool timing = false;
  SampleRanges ranges;

  void validate() const {
    detail::solve_or_config_error(spec);
    if (samples < 1) throw ConfigError("sample count must be >= 1");
    if (order < kMinOrderBerwald) {
      throw ConfigError("verify needs jet order >= " + std::to_string(kMinOrderBerwald) + " (got " +
                        std::to_string(order) + ")");
    }
    if (!(tol > 0) || !(quot_tol > 0) || !(flag_tol > 0)) throw ConfigError("tolerances must be positive");
  }

  json to_json() const {
    return {{"metric", detail::spec_json(spec)},
            {"samples", samples},
            {"seed", seed},
            {"order", order},
            {"tol", tol},
            {"quot_tol", quot_tol},
            {"flag_tol", flag_tol},
            {"paper_samples", paper_samples},
            {"precision", report::to_string(precision)},
            {"ranges", {{"position", ranges.position}, {"velocity", ranges.velocity}}}};
  }
};

struct SampleOutcome {
  std::string kind;  // "random" or "reference"
  std::string label;
  MetricSpec spec;
  ChartPoint p;
  TangentCoords y;
  Precision precision = Precision::Double;
  CurvatureResidual residual;
  std::optional<double> flag;  // flag curvature for random samples
  std::vector<std::pair<int, int>> entries;
};

inline CurvatureResidual residual_at(const MetricSpec& spec, const ChartPoint& p, const TangentCoords& y, int order,
                                     Precision precision) {
  if (precision == Precision::Quad) return constant_curvature_residual<Quad>(spec, p, y, order);
  return constant_curvature_residual<double>(spec, p, y, order);
}

inline Report cmd_verify(const VerifyConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  struct Job {
    bool reference;
    std::size_t index;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.samples; ++i) jobs.push_back({false, i});
  const std::vector<ReferenceSample>& refs =
      cfg.explicit_samples.empty() ? reference_samples() : cfg.explicit_samples;
  if (cfg.paper_samples || !cfg.explicit_samples.empty())
    for (std::size_t i = 0; i < refs.size(); ++i) jobs.push_back({true, i});

  const unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
  const auto outcomes = parallel_map(jobs.size(), threads, [&](std::size_t j) {
    SampleOutcome o;
    if (jobs[j].reference) {
      const ReferenceSample& r = refs[jobs[j].index];
      o.kind = "reference";
      o.label = r.label;
      o.spec = r.spec();
      o.p = r.p;
      o.y = r.y;
      o.entries = r.entries;
      o.precision = cfg.precision == Precision::Double ? Precision::Double : Precision::Quad;
    } else {
      const RandomSample s = random_sample(cfg.seed, jobs[j].index, cfg.ranges);
      o.kind = "random";
      o.label = "r" + std::to_string(jobs[j].index);
      o.spec = cfg.spec;
      o.p = s.p;
      o.y = s.y;
      o.precision = cfg.precision == Precision::Quad ? Precision::Quad : Precision::Double;
    }
    o.residual = residual_at(o.spec, o.p, o.y, cfg.order, o.precision);
    if (!jobs[j].reference) {
      // Edge V: a random tangent, redrawn while the flag is degenerate.
      double flag = 0;
      for (std::uint64_t stream = 0;; ++stream) {
        const TangentCoords V = random_tangent(cfg.seed, jobs[j].index, stream, cfg.ranges);
        try {
          flag = flag_curvature(o.spec, o.p, o.y, V, cfg.order);
          break;
        } catch (const DegenerateFlagError&) {
        }
      }
      o.flag = flag;
    }
    return o;
  });

  double max_random = 0, max_reference = 0, max_quot = 0, max_flag = 0;
  bool any_reference = false;
  std::size_t undefined_quot = 0;
  json samples = json::array();
  for (const auto& o : outcomes) {
    const auto& r = o.residual;
    json s = {{"kind", o.kind},
              {"label", o.label},
              {"metric", detail::spec_json(o.spec)},
              {"point", detail::to_json(o.p.vec())},
              {"velocity", detail::to_json(o.y.vec())},
              {"precision", report::to_string(o.precision)},
              {"F", r.F},
              {"max_normalized", r.max_normalized},
              {"max_quot_deviation", r.max_quot_deviation},
              {"kay", detail::to_json(r.kay)},
              {"ktau", detail::to_json(r.ktau)},
              {"dif", detail::to_json(r.dif)},
              {"normalized", detail::to_json(r.normalized)},
              {"quot", detail::to_json_nullable(r.quot)}};
    if (o.flag) {
      s["flag_curvature"] = *o.flag;
      max_flag = std::max(max_flag, std::abs(*o.flag - o.spec.K) / o.spec.K);
    }
    if (o.kind == "reference") {
      any_reference = true;
      max_reference = std::max(max_reference, r.max_normalized);
      max_quot = std::max(max_quot, r.max_quot_deviation);
      json tab = json::array();
      for (auto [i, k] : o.entries) {
        tab.push_back({{"entry", {i + 1, k + 1}},
                       {"dif", r.dif[i][k]},
                       {"quot", std::isnan(r.quot[i][k]) ? json(nullptr) : json(r.quot[i][k])}});
      }
      s["tabulated_entries"] = tab;
    } else {
      max_random = std::max(max_random, r.max_normalized);
    }
    for (const auto& row : r.quot_defined)
      for (bool d : row) undefined_quot += !d;
    samples.push_back(std::move(s));
  }

  Report rep;
  rep.doc["command"] = "verify";
  rep.doc["config"] = cfg.to_json();
  rep.doc["environment"] = detail::environment_json();
  rep.doc["samples"] = std::move(samples);
  rep.doc["undefined_quot_entries"] = undefined_quot;
  rep.checks.push_back(check_below("constant-curvature residual (random samples)", max_random, cfg.tol));
  rep.checks.push_back(check_below("flag curvature relative deviation", max_flag, cfg.flag_tol));
  if (any_reference) {
    rep.checks.push_back(check_below("constant-curvature residual (reference samples)", max_reference, cfg.tol));
    rep.checks.push_back(check_below("quot deviation (reference samples)", max_quot, cfg.quot_tol));
  }
  if (cfg.timing) rep.doc["timing_seconds"] = clock.seconds();

  std::ostringstream os;
  os << "verify: K = " << detail::fmt(cfg.spec.K, 17) << ", sign " << (cfg.spec.sign > 0 ? "+" : "-")
     << ", hemisphere " << (cfg.spec.hemisphere > 0 ? "right" : "left") << ", " << cfg.samples
     << " random samples (seed " << cfg.seed << "), jet order " << cfg.order << "\n";
  if (cfg.spec.is_riemannian()) os << "Riemannian (lambda = 0)\n";
  os << "max normalized residual (random): " << detail::fmt(max_random, 4) << "\n";
  os << "max flag curvature deviation: " << detail::fmt(max_flag, 4) << "\n";
  if (any_reference) {
    os << "reference samples:\n";
    for (const auto& o : outcomes) {
      if (o.kind != "reference") continue;
      os << "  " << o.label << " K=" << detail::fmt(o.spec.K) << " max normalized "
         << detail::fmt(o.residual.max_normalized, 3) << ", max |quot - 1| "
         << detail::fmt(o.residual.max_quot_deviation, 3);
      for (auto [i, k] : o.entries)
        os << ", quot[" << i + 1 << "," << k + 1 << "] = " << std::setprecision(12) << o.residual.quot[i][k];
      os << "\n";
    }
  }
  rep.text = os.str();
  detail::finish(rep);
  return rep;
}

/// One row per sample and matrix entry.
inline std::string verify_csv(const Report& rep) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "label,kind,i,k,kay,ktau,dif,normalized,quot\n";
  for (const auto& s : rep.doc.at("samples")) {
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        os << s.at("label").get<std::string>() << ',' << s.at("kind").get<std::string>() << ',' << i + 1 << ','
           << k + 1 << ',' << s["kay"][i][k].get<double>() << ',' << s["ktau"][i][k].get<double>() << ','
           << s["dif"][i][k].get<double>() << ',' << s["normalized"][i][k].get<double>() << ',';
        if (!s["quot"][i][k].is_null()) os << s["quot"][i][k].get<double>();
        os << '\n';
      }
  }
  return os.str();
}

// ys-criteria

struct YSConfig {
  double K = 2;
  int sign = +1;
  std::optional<double> lambda_override;
  std::optional<double> epsilon_override;

  json to_json() const {
    json j = {{"K", K}, {"sign", sign > 0 ? "+" : "-"}};
    j["lambda_override"] = lambda_override ? json(*lambda_override) : json(nullptr);
    j["epsilon_override"] = epsilon_override ? json(*epsilon_override) : json(nullptr);
    return j;
  }
};

inline Report cmd_ys_criteria(const YSConfig& cfg) {
  if (cfg.sign != 1 && cfg.sign != -1) throw ConfigError("sign must be + or -");
  const frame::YSSolution sol = detail::solve_or_config_error(MetricSpec{cfg.K, cfg.sign, 1, 1.0});
  const double eps = cfg.epsilon_override.value_or(sol.epsilon);
  const double lambda = cfg.lambda_override.value_or(sol.lambda);
  if (!(eps > 0)) throw ConfigError("epsilon must be positive");
  const frame::YSReport ys = frame::ys_criteria_check(cfg.K, lambda, eps);

  Report rep;
  rep.doc["command"] = "ys-criteria";
  rep.doc["config"] = cfg.to_json();
  rep.doc["environment"] = detail::environment_json();
  rep.doc["epsilon"] = eps;
  rep.doc["lambda"] = lambda;
  rep.doc["riemannian"] = ys.riemannian();
  rep.doc["norm"] = ys.norm_value;
  rep.doc["worst_curvature_slot"] = {ys.worst_curvature_slot[0] + 1, ys.worst_curvature_slot[1] + 1,
                                     ys.worst_curvature_slot[2] + 1, ys.worst_curvature_slot[3] + 1};
  rep.checks.push_back(check_below("criterion 1: Killing (b_{p|q} + b_{q|p})", ys.killing_residual,
                                   frame::kYSTolerance));
  rep.checks.push_back(check_below("criterion 2: constant norm ||b|| < 1", ys.norm_value, 1.0));
  rep.checks.push_back(check_below("criterion 3: b_{p|q|r} = T_pqr", ys.second_derivative_residual,
                                   frame::kYSTolerance));
  rep.checks.push_back(check_below("criterion 4: R_qprs = script-T_qprs", ys.curvature_residual,
                                   frame::kYSTolerance));

  std::ostringstream os;
  os << "ys-criteria: K = " << detail::fmt(cfg.K, 17) << ", epsilon = " << detail::fmt(eps, 17)
     << ", lambda = " << detail::fmt(lambda, 17) << "\n";
  if (ys.riemannian()) os << "Riemannian (lambda = 0)\n";
  rep.text = os.str();
  detail::finish(rep);
  return rep;
}

// frame-tables

inline const std::vector<std::string>& frame_table_names() {
  static const std::vector<std::string> names = {"connection", "riemann",       "killing",   "T",
                                                 "script-T",   "k-tilde",       "zeta",      "zeta-partials",
                                                 "zeta-hcov",  "E",             "tau"};
  return names;
}

struct FrameTablesConfig {
  double K = 2;
  int sign = +1;
  FrameVector y{1, 0, 0};
  std::string table = "riemann";
};

namespace detail {

/// Maps -0 to 0 so text tables are sign-stable.
inline double clean(double x) { return x + 0.0; }

inline std::string index_label(std::initializer_list<int> idx) {
  std::string s;
  for (int i : idx) s += std::to_string(i + 1);
  return s;
}

inline void list_nonzero(std::ostringstream& os, const std::string& name, const frame::Tensor3& t) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        if (t[a][b][c] != 0.0) os << name << "[" << index_label({a, b, c}) << "] = " << clean(t[a][b][c]) << "\n";
}

inline void list_nonzero(std::ostringstream& os, const std::string& name, const frame::Tensor4& t) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          if (t[a][b][c][d] != 0.0) os << name << "[" << index_label({a, b, c, d}) << "] = " << clean(t[a][b][c][d]) << "\n";
}

inline void print_matrix(std::ostringstream& os, const std::string& name, const Mat3& m) {
  for (int i = 0; i < 3; ++i) {
    os << name << "[" << i + 1 << ",*] =";
    for (int k = 0; k < 3; ++k) os << " " << clean(m[i][k]);
    os << "\n";
  }
}

}  // namespace detail

inline Report cmd_frame_tables(const FrameTablesConfig& cfg) {
  const auto& names = frame_table_names();
  if (std::find(names.begin(), names.end(), cfg.table) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown table '" + cfg.table + "'; valid tables: " + valid);
  }
  const frame::YSSolution sol = detail::solve_or_config_error(MetricSpec{cfg.K, cfg.sign, 1, 1.0});
  const double eps = sol.epsilon, lambda = sol.lambda;
  const bool needs_y = cfg.table == "k-tilde" || cfg.table == "zeta" || cfg.table == "zeta-partials" ||
                       cfg.table == "zeta-hcov" || cfg.table == "E" || cfg.table == "tau";
  if (needs_y && cfg.y.is_zero()) throw ConfigError("table '" + cfg.table + "' needs a nonzero frame vector");

  json data;
  std::ostringstream os;
  os << std::setprecision(17);
  const std::string& t = cfg.table;
  if (t == "connection") {
    const auto w = frame::connection_forms(eps);
    data = detail::to_json(w.c);
    detail::list_nonzero(os, "omega", w.c);
  } else if (t == "riemann") {
    const auto R = frame::riemann_frame(eps);
    data = detail::to_json(R.R);
    detail::list_nonzero(os, "R", R.R);
  } else if (t == "killing") {
    const auto kd = frame::killing_cov_deriv(lambda, eps);
    data = {{"b", detail::to_json(kd.b)}, {"b1", detail::to_json(kd.b1)}, {"b2", detail::to_json(kd.b2)}};
    os << "b = " << detail::clean(kd.b[0]) << " " << detail::clean(kd.b[1]) << " " << detail::clean(kd.b[2]) << "\n";
    detail::print_matrix(os, "b1", kd.b1);
    detail::list_nonzero(os, "b2", kd.b2);
  } else if (t == "T") {
    const auto kd = frame::killing_cov_deriv(lambda, eps);
    const auto T = frame::ys_T(cfg.K, kd.b);
    data = detail::to_json(T);
    detail::list_nonzero(os, "T", T);
  } else if (t == "script-T") {
    const auto kd = frame::killing_cov_deriv(lambda, eps);
    const auto ST = frame::ys_script_T(cfg.K, kd.b, kd.b1);
    data = detail::to_json(ST);
    detail::list_nonzero(os, "script-T", ST);
  } else if (t == "k-tilde") {
    const Mat3 m = frame::riemann_spray_frame(cfg.y, cfg.K);
    data = detail::to_json(m);
    detail::print_matrix(os, "Ktilde", m);
  } else if (t == "zeta") {
    const Vec3 z = frame::zeta_frame(cfg.y, cfg.K, cfg.sign);
    data = detail::to_json(z);
    os << "zeta = " << detail::clean(z[0]) << " " << detail::clean(z[1]) << " " << detail::clean(z[2]) << "\n";
  } else if (t == "zeta-partials") {
    const auto z = frame::zeta_partials(cfg.y, cfg.K, cfg.sign);
    data = {{"d1", detail::to_json(z.d1)}, {"d2", detail::to_json(z.d2)}};
    detail::print_matrix(os, "dzeta", z.d1);
    detail::list_nonzero(os, "ddzeta", z.d2);
  } else if (t == "zeta-hcov") {
    const auto z = frame::zeta_hcov(cfg.y, cfg.K, cfg.sign);
    data = {{"hcov", detail::to_json(z.hcov)}, {"d1", detail::to_json(z.d1)}};
    detail::print_matrix(os, "zeta_hcov", z.hcov);
    detail::list_nonzero(os, "dzeta_hcov", z.d1);
  } else if (t == "E") {
    const Mat3 m = frame::E_correction(cfg.y, cfg.K, cfg.sign);
    data = detail::to_json(m);
    detail::print_matrix(os, "E", m);
  } else {
    const Mat3 m = frame::tau_frame(cfg.y, cfg.K, cfg.sign);
    data = detail::to_json(m);
    detail::print_matrix(os, "Ktau", m);
  }

  Report rep;
  rep.doc["command"] = "frame-tables";
  rep.doc["config"] = {{"K", cfg.K},
                       {"sign", cfg.sign > 0 ? "+" : "-"},
                       {"frame_vector", detail::to_json(cfg.y.vec())},
                       {"table", cfg.table}};
  rep.doc["epsilon"] = eps;
  rep.doc["lambda"] = lambda;
  rep.doc["table"] = data;
  rep.text = "table " + cfg.table + " (K = " + detail::fmt(cfg.K, 17) + ", sign " + (cfg.sign > 0 ? "+" : "-") +
             ")\n" + os.str();
  rep.doc["checks"] = json::array();
  rep.doc["verdict"] = "pass";
  rep.doc["failing_checks"] = json::array();
  return rep;
}

// projective

/// Frozen Douglas floors: about half the smallest normalized |D| observed over
/// the 20 samples of seed 1, all four sign/hemisphere choices.
inline double douglas_floor(double K) {
  static const std::map<double, double> floors = {{4.0, 0.35}, {29.0, 0.14}};
  if (const auto it = floors.find(K); it != floors.end()) return it->second;
  return 1e-6;
}

struct ProjectiveConfig {
  MetricSpec spec;
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  int order = kDefaultJetOrder;
  double weyl_tol = 1e-6;
  double douglas_zero_tol = 1e-7;
  Precision precision = Precision::Double;
  unsigned threads = 0;
  bool timing = false;
  SampleRanges ranges;

  void validate() const {
    detail::solve_or_config_error(spec);
    if (samples < 1) throw ConfigError("sample count must be >= 1");
    if (order < kMinOrderDouglas) {
      throw ConfigError("projective needs jet order >= " + std::to_string(kMinOrderDouglas) + " (got " +
                        std::to_string(order) + ")");
    }
  }
};

inline constexpr const char* kVerdictNotFlat = "not projectively flat";
inline constexpr const char* kVerdictFlatRound = "projectively flat (Riemannian round sphere)";

inline Report cmd_projective(const ProjectiveConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const bool quad = cfg.precision == Precision::Quad;
  struct Row {
    RandomSample s;
    double W, D;
  };
  const unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
  const auto rows = parallel_map(cfg.samples, threads, [&](std::size_t i) {
    const RandomSample s = random_sample(cfg.seed, i, cfg.ranges);
    const double W = quad ? weyl_normalized<Quad>(cfg.spec, s.p, s.y, cfg.order)
                          : weyl_normalized<double>(cfg.spec, s.p, s.y, cfg.order);
    const double D = quad ? douglas_normalized<Quad>(cfg.spec, s.p, s.y, cfg.order)
                          : douglas_normalized<double>(cfg.spec, s.p, s.y, cfg.order);
    return Row{s, W, D};
  });
  double wmax = 0, dmax = 0, dmin = std::numeric_limits<double>::infinity();
  json samples = json::array();
  for (const auto& r : rows) {
    wmax = std::max(wmax, r.W);
    dmax = std::max(dmax, r.D);
    dmin = std::min(dmin, r.D);
    samples.push_back({{"point", detail::to_json(r.s.p.vec())},
                       {"velocity", detail::to_json(r.s.y.vec())},
                       {"weyl_normalized", r.W},
                       {"douglas_normalized", r.D}});
  }
  const bool riemannian = cfg.spec.is_riemannian();
  Report rep;
  rep.checks.push_back(check_below("Weyl tensor vanishes (max |W|/F^2)", wmax, cfg.weyl_tol));
  if (riemannian) {
    rep.checks.push_back(check_below("Douglas tensor vanishes (max |D| F)", dmax, cfg.douglas_zero_tol));
  } else {
    rep.checks.push_back(check_above("Douglas tensor nonzero (min |D| F)", dmin, douglas_floor(cfg.spec.K)));
  }
  const bool d_zero = dmax < cfg.douglas_zero_tol;
  const bool w_zero = wmax < cfg.weyl_tol;
  std::string verdict;
  if (!d_zero) {
    verdict = kVerdictNotFlat;
  } else if (w_zero) {
    verdict = riemannian ? kVerdictFlatRound : "projectively flat";
  } else {
    verdict = kVerdictNotFlat;
  }
  rep.doc["command"] = "projective";
  rep.doc["config"] = {{"metric", detail::spec_json(cfg.spec)},
                       {"samples", cfg.samples},
                       {"seed", cfg.seed},
                       {"order", cfg.order},
                       {"weyl_tol", cfg.weyl_tol},
                       {"douglas_zero_tol", cfg.douglas_zero_tol},
                       {"douglas_floor", douglas_floor(cfg.spec.K)},
                       {"precision", report::to_string(cfg.precision)},
                       {"ranges", {{"position", cfg.ranges.position}, {"velocity", cfg.ranges.velocity}}}};
  rep.doc["environment"] = detail::environment_json();
  rep.doc["samples"] = std::move(samples);
  rep.doc["weyl_max"] = wmax;
  rep.doc["douglas_min"] = dmin;
  rep.doc["douglas_max"] = dmax;
  rep.doc["projective_verdict"] = verdict;
  if (cfg.timing) rep.doc["timing_seconds"] = clock.seconds();
  std::ostringstream os;
  os << "projective: K = " << detail::fmt(cfg.spec.K, 17) << ", " << cfg.samples << " samples (seed " << cfg.seed
     << ")\n";
  os << "max |W|/F^2 = " << detail::fmt(wmax, 4) << "\n";
  os << "|D| F in [" << detail::fmt(dmin, 4) << ", " << detail::fmt(dmax, 4) << "]\n";
  os << "Douglas theorem: " << verdict << "\n";
  rep.text = os.str();
  detail::finish(rep);
  return rep;
}

// geodesic

struct GeodesicConfig {
  MetricSpec spec;
  std::optional<ChartPoint> point;
  std::optional<TangentCoords> velocity;
  std::optional<double> speed;  // rescale the initial velocity to this F
  std::uint64_t seed = 1;
  double t_end = 10;
  double dt = 1e-3;
  double chart_radius = kDefaultChartRadius;
  double tol = 1e-6;
  bool convergence = false;
  double convergence_dt = 0.05;
  std::size_t record_every = 1;
  bool timing = false;

  void validate() const {
    detail::solve_or_config_error(spec);
    if (!(dt > 0) || !(t_end >= 0) || !(chart_radius > 0)) throw ConfigError("dt, t_end, radius must be positive");
    if (speed && !(*speed > 0)) throw ConfigError("speed must be positive");
    if (!(convergence_dt > 0)) throw ConfigError("convergence dt must be positive");
  }
};

inline constexpr double kRk4Ratio = 16.0;
inline constexpr double kRk4RatioTolerance = 0.30;

/// Initial state from the config: explicit point/velocity, else a seeded
/// random draw; the velocity is rescaled to `speed` when given.
inline GeodesicState geodesic_initial_state(const GeodesicConfig& cfg) {
  const RandomSample r = random_sample(cfg.seed, 0, SampleRanges{0.5, 1.0});
  const ChartPoint p = cfg.point.value_or(r.p);
  TangentCoords y = cfg.velocity.value_or(r.y);
  if (y.is_zero()) throw ConfigError("initial velocity must be nonzero");
  if (cfg.speed) {
    const double s = *cfg.speed / finsler_F(p, y, cfg.spec);
    y = {y.u * s, y.v * s, y.w * s};
  }
  return make_geodesic_state(cfg.spec, p, y);
}

struct GeodesicResult {
  Report report;
  GeodesicRun run;
};

inline GeodesicResult cmd_geodesic(const GeodesicConfig& cfg) {
  cfg.validate();
  detail::Stopwatch clock;
  const GeodesicState init = geodesic_initial_state(cfg);
  GeodesicOptions opts;
  opts.chart_radius = cfg.chart_radius;
  opts.record_every = cfg.record_every;
  GeodesicResult out;
  out.run = integrate_geodesic(cfg.spec, init, cfg.t_end, cfg.dt, opts);
  Report& rep = out.report;
  const auto& last = out.run.trajectory.back();
  rep.checks.push_back(check_below("speed conservation (max |F - F0|/F0)", out.run.conservation.max_relative_drift,
                                   cfg.tol));
  json conv = nullptr;
  if (cfg.convergence) {
    GeodesicOptions o = opts;
    o.record_every = std::numeric_limits<std::size_t>::max();
    const double d1 = integrate_geodesic(cfg.spec, init, cfg.t_end, cfg.convergence_dt, o).conservation.max_relative_drift;
    const double d2 =
        integrate_geodesic(cfg.spec, init, cfg.t_end, cfg.convergence_dt / 2, o).conservation.max_relative_drift;
    const double ratio = d1 / d2;
    conv = {{"dt", cfg.convergence_dt}, {"drift_dt", d1}, {"drift_half_dt", d2}, {"ratio", ratio}};
    rep.checks.push_back(check_below("RK4 order (|drift ratio / 16 - 1|)", std::abs(ratio / kRk4Ratio - 1),
                                     kRk4RatioTolerance));
  }
  rep.doc["command"] = "geodesic";
  rep.doc["config"] = {{"metric", detail::spec_json(cfg.spec)},
                       {"point", detail::to_json(init.p.vec())},
                       {"velocity", detail::to_json(init.y.vec())},
                       {"seed", cfg.seed},
                       {"t_end", cfg.t_end},
                       {"dt", cfg.dt},
                       {"chart_radius", cfg.chart_radius},
                       {"tol", cfg.tol},
                       {"convergence", cfg.convergence},
                       {"convergence_dt", cfg.convergence_dt},
                       {"record_every", cfg.record_every}};
  rep.doc["environment"] = detail::environment_json();
  rep.doc["F0"] = init.F0;
  rep.doc["status"] = to_string(out.run.status);
  rep.doc["t_final"] = last.t;
  rep.doc["steps"] = out.run.conservation.steps;
  rep.doc["max_relative_drift"] = out.run.conservation.max_relative_drift;
  rep.doc["final_relative_drift"] = out.run.conservation.final_relative_drift;
  rep.doc["convergence"] = conv;
  if (cfg.timing) rep.doc["timing_seconds"] = clock.seconds();
  std::ostringstream os;
  os << "geodesic: K = " << detail::fmt(cfg.spec.K, 17) << ", F0 = " << detail::fmt(init.F0, 10) << ", dt = "
     << cfg.dt << "\n";
  os << "status " << to_string(out.run.status) << " at t = " << detail::fmt(last.t, 10) << " after "
     << out.run.conservation.steps << " steps\n";
  os << "max relative speed drift " << detail::fmt(out.run.conservation.max_relative_drift, 4) << "\n";
  if (cfg.convergence) {
    os << "drift at dt " << cfg.convergence_dt << ": " << detail::fmt(conv["drift_dt"].get<double>(), 4)
       << ", at dt/2: " << detail::fmt(conv["drift_half_dt"].get<double>(), 4)
       << ", ratio " << detail::fmt(conv["ratio"].get<double>(), 4) << "\n";
  }
  rep.text = os.str();
  detail::finish(rep);
  return out;
}

}  // namespace randers::report
