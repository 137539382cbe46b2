#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmx/catalog.hpp"
#include "bmx/core.hpp"
#include "bmx/errors.hpp"
#include "bmx/expr.hpp"
#include "bmx/geometry.hpp"
#include "bmx/group.hpp"
#include "bmx/reduced.hpp"
#include "bmx/rng.hpp"

namespace bmx {

using nlohmann::json;

// Exit codes shared by every subcommand.
enum ExitCode : int {
  exit_pass = 0,
  exit_check_failed = 1,
  exit_config_error = 2,
  exit_numeric_error = 3,
};

namespace harness {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << body;
}

inline double get_num(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError("field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::string get_str(const json& j, const std::string& key,
                           const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string())
    throw ConfigError("field '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

inline Group group_from_config(const json& j) {
  if (!j.contains("group")) throw ConfigError("missing 'group' field");
  const std::string name = j.at("group").get<std::string>();
  const GroupKind kind = parse_group_kind(name);
  if (kind == GroupKind::VII) {
    if (!j.contains("alpha"))
      throw ConfigError("group VII requires an 'alpha' angle");
    return Group::make_vii(j.at("alpha").get<double>());
  }
  return Group::make(kind);
}

inline dsl::Expr parse_expr_field(const std::string& src,
                                  const std::string& what) {
  try {
    return dsl::parse(src);
  } catch (const dsl::ParseError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

inline SpatialMetricFn metric_from_config(const json& j) {
  if (!j.contains("eta") || !j.at("eta").is_object())
    throw ConfigError("missing 'eta' object with six component expressions");
  const json& eta = j.at("eta");
  static const char* keys[6] = {"eta11", "eta12", "eta13",
                                "eta22", "eta23", "eta33"};
  SpatialMetricFn fnset;
  for (int k = 0; k < 6; ++k) {
    if (!eta.contains(keys[k]))
      throw ConfigError(std::string("eta block missing '") + keys[k] + "'");
    fnset.comp[k] =
        dsl::compile(parse_expr_field(eta.at(keys[k]).get<std::string>(),
                                      std::string("eta.") + keys[k]));
  }
  return fnset;
}

inline SolutionCase case_from_config(const json& j) {
  SolutionCase c;
  c.id = parse_case_id(get_str(j, "case", ""));
  c.group_alpha = get_num(j, "alpha", 1.0);
  if (j.contains("interval")) {
    const auto& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2)
      throw ConfigError("'interval' must be [t0, t1]");
    c.t0 = iv[0].get<double>();
    c.t1 = iv[1].get<double>();
  }
  if (j.contains("constants")) {
    for (const auto& [k, v] : j.at("constants").items()) {
      if (!v.is_number())
        throw ConfigError("constant '" + k + "' must be a number");
      c.constants[k] = v.get<double>();
    }
  }
  if (j.contains("functions")) {
    for (const auto& [k, v] : j.at("functions").items()) {
      if (!v.is_string())
        throw ConfigError("function '" + k + "' must be an expression string");
      c.functions[k] = parse_expr_field(v.get<std::string>(), "functions." + k);
    }
  }
  validate_case(c);
  return c;
}

inline std::vector<double> sample_times(const SolutionCase& c, int samples) {
  // Keep samples strictly inside the interval so finite-difference stencils
  // of the free-function derivatives stay in range.
  std::vector<double> ts;
  const double pad = 0.01 * (c.t1 - c.t0);
  for (int i = 0; i < samples; ++i)
    ts.push_back(c.t0 + pad + (c.t1 - c.t0 - 2 * pad) * i /
                                  std::max(1, samples - 1));
  return ts;
}

inline json report_json(const ResidualReport& r) {
  json out;
  out["equations"] = json::object();
  for (const auto& [k, v] : r.equation_max) out["equations"][k] = v;
  out["det_identity_max"] = r.det_identity_max;
  out["spd_ok"] = r.spd_all;
  out["max_residual"] = r.overall_max();
  if (r.evaluation_failed) out["evaluation_failed"] = r.failure_note;
  return out;
}

// ---- verify-group ---------------------------------------------------------

inline json run_verify_group(const json& cfg) {
  const Group g = group_from_config(cfg);
  const int points = static_cast<int>(get_num(cfg, "points", 100));
  const std::uint64_t seed =
      static_cast<std::uint64_t>(get_num(cfg, "seed", 42));
  const double h = get_num(cfg, "h_frame", 1e-5);
  if (points < 1) throw ConfigError("'points' must be >= 1");

  const json thr_in = cfg.contains("thresholds") ? cfg.at("thresholds") : json::object();
  const double thr_comm = get_num(thr_in, "commutator", 1e-7);
  const double thr_dual = get_num(thr_in, "duality", 1e-12);
  const double thr_jacobi = get_num(thr_in, "jacobi", 1e-14);
  const double thr_eps = get_num(thr_in, "epsilon", 1e-9);
  const double thr_div = get_num(thr_in, "frame_divergence", 1e-7);
  const double thr_det = get_num(thr_in, "det_closed_form", 1e-12);

  SplitMix64 rng(seed);
  double worst_comm = 0, worst_dual = 0, worst_div = 0, worst_det = 0;
  const Vec3 omega_exact = frame_omega(g);
  for (int i = 0; i < points; ++i) {
    const FramePoint p{rng.uniform(-1, 1), rng.uniform(-1, 1),
                       rng.uniform(-1, 1)};
    worst_comm = std::max(worst_comm, verify_commutators(g, p, h));
    const FrameSample fs = frame_at(g, p);
    const Mat3 prod = mat3_mul(fs.up, fs.down);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        worst_dual = std::max(worst_dual,
                              std::abs(prod(r, c) - (r == c ? 1.0 : 0.0)));
    const Vec3 om = frame_divergence(g, p, h);
    for (int a = 0; a < 3; ++a)
      worst_div = std::max(worst_div, std::abs(om[a] - omega_exact[a]));
    if (g.kind() == GroupKind::VII) {
      const double closed = std::exp(-2.0 * p[2] * g.cos_angle()) *
                            std::sin(g.angle());
      worst_det = std::max(worst_det, std::abs(fs.det_up - closed));
    }
  }
  double worst_eps = 0;
  for (int i = 0; i < points; ++i)
    worst_eps = std::max(worst_eps,
                         epsilon_expansion_residual(random_spd_sym3(rng)));
  const double jac = jacobi_residual(g);

  json checks = json::array();
  auto add = [&checks](const std::string& name, double value, double thr) {
    checks.push_back({{"name", name},
                      {"max_residual", value},
                      {"threshold", thr},
                      {"pass", value < thr}});
  };
  add("commutators", worst_comm, thr_comm);
  add("duality", worst_dual, thr_dual);
  add("jacobi", jac, thr_jacobi);
  add("epsilon-identities", worst_eps, thr_eps);
  add("frame-divergence", worst_div, thr_div);
  if (g.kind() == GroupKind::VII) add("det-closed-form", worst_det, thr_det);

  bool all = true;
  for (const auto& c : checks) all = all && c.at("pass").get<bool>();

  json resolved = cfg;
  resolved["points"] = points;
  resolved["seed"] = seed;
  resolved["h_frame"] = h;
  resolved["thresholds"] = {{"commutator", thr_comm}, {"duality", thr_dual},
                            {"jacobi", thr_jacobi},   {"epsilon", thr_eps},
                            {"frame_divergence", thr_div},
                            {"det_closed_form", thr_det}};

  return json{{"command", "verify-group"},
              {"scenario", resolved},
              {"seed", seed},
              {"checks", checks},
              {"pass", all}};
}

// ---- integrate ------------------------------------------------------------

struct IntegrateOutcome {
  json report;
  std::string csv;
};

inline IntegrateOutcome run_integrate(const json& cfg) {
  const Group g = group_from_config(cfg);
  if (!cfg.contains("interval"))
    throw ConfigError("integrate: missing 'interval'");
  const double t0 = cfg.at("interval").at(0).get<double>();
  const double t1 = cfg.at("interval").at(1).get<double>();
  if (!(t1 > t0)) throw ConfigError("interval must satisfy t1 > t0");
  const SpatialMetricFn eta = metric_from_config(cfg);

  if (!cfg.contains("initial"))
    throw ConfigError("integrate: missing 'initial' state");
  FieldState s0;
  const json& init = cfg.at("initial");
  for (int a = 0; a < 3; ++a) {
    s0.alpha[a] = init.at("alpha").at(a).get<double>();
    s0.beta[a] = init.at("beta").at(a).get<double>();
  }

  const json ode_in = cfg.contains("ode") ? cfg.at("ode") : json::object();
  OdeOptions opts;
  opts.step = get_num(ode_in, "step", 1e-3);
  opts.adaptive = ode_in.contains("adaptive") &&
                  ode_in.at("adaptive").get<bool>();
  opts.tol = get_num(ode_in, "tol", 1e-9);

  const double constraint_thr = get_num(cfg, "constraint_threshold", 1e-8);
  const ConstraintResiduals c0 = constraint_check(g, s0);
  if (c0.omega_beta > constraint_thr || c0.beta3 > constraint_thr)
    throw ConstraintViolation(
        "initial data violates constraints: |omega_a beta^a| = " +
        std::to_string(c0.omega_beta) + ", |beta3| = " +
        std::to_string(c0.beta3));

  std::vector<double> out_times;
  const json out_in = cfg.contains("output") ? cfg.at("output") : json::object();
  if (out_in.contains("times")) {
    for (const auto& v : out_in.at("times")) out_times.push_back(v.get<double>());
  } else {
    const int count = static_cast<int>(get_num(out_in, "count", 101));
    if (count < 2) throw ConfigError("output count must be >= 2");
    for (int i = 0; i < count; ++i)
      out_times.push_back(t0 + (t1 - t0) * i / (count - 1.0));
  }
  std::sort(out_times.begin(), out_times.end());

  const Trajectory traj = integrate_reduced(g, eta, s0, t0, t1, opts, out_times);

  std::string csv = "u0,alpha_1,alpha_2,alpha_3,beta_1,beta_2,beta_3,"
                    "constraint_omega,constraint_beta3\n";
  char line[320];
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const FieldState& s = traj.state[i];
    const ConstraintResiduals cr = constraint_check(g, s);
    std::snprintf(line, sizeof line,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  traj.t[i], s.alpha[0], s.alpha[1], s.alpha[2], s.beta[0],
                  s.beta[1], s.beta[2], cr.omega_beta, cr.beta3);
    csv += line;
  }

  json report{{"command", "integrate"},
              {"seed", static_cast<std::uint64_t>(get_num(cfg, "seed", 42))}};
  json resolved = cfg;
  resolved["ode"] = {{"step", opts.step},
                     {"adaptive", opts.adaptive},
                     {"tol", opts.tol}};
  resolved["constraint_threshold"] = constraint_thr;
  resolved["output"] = {{"times", out_times}};
  report["scenario"] = resolved;
  report["constraint"] = {{"max_omega_beta", traj.max_omega_beta},
                          {"max_beta3", traj.max_beta3},
                          {"threshold", constraint_thr},
                          {"pass", traj.max_omega_beta < constraint_thr &&
                                       traj.max_beta3 < constraint_thr}};

  bool pass = report["constraint"]["pass"].get<bool>();

  if (cfg.contains("oracle") && get_num(cfg.at("oracle"), "points", 0) > 0 &&
      (!cfg.at("oracle").contains("enabled") ||
       cfg.at("oracle").at("enabled").get<bool>())) {
    const json& oc = cfg.at("oracle");
    const int pts = static_cast<int>(get_num(oc, "points", 20));
    const double hf = get_num(oc, "h_field", 1e-4);
    const double thr = get_num(oc, "threshold", 1e-5);
    const std::uint64_t seed =
        static_cast<std::uint64_t>(get_num(cfg, "seed", 42));
    SplitMix64 rng(seed);
    const PotentialFn pot = trajectory_potential(traj);
    const double margin = 0.01 * (t1 - t0) + 2.0 * hf;
    double worst = 0;
    for (int i = 0; i < pts; ++i) {
      const SpacetimePoint p{rng.uniform(t0 + margin, t1 - margin),
                             rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-1, 1)};
      worst = std::max(worst, max_abs(maxwell_residual_full(g, eta, pot, p, hf)));
    }
    report["oracle"] = {{"points", pts},
                        {"h_field", hf},
                        {"max_residual", worst},
                        {"threshold", thr},
                        {"pass", worst < thr}};
    pass = pass && worst < thr;
  }

  report["pass"] = pass;
  return {report, csv};
}

// ---- check-solution / adjudicate ------------------------------------------

inline json oracle_check_case(const SolutionCase& c, const std::string& variant,
                              const json& oc, std::uint64_t seed) {
  const int nodes = static_cast<int>(get_num(oc, "nodes", 1601));
  const int pts = static_cast<int>(get_num(oc, "points", 20));
  const double hf = get_num(oc, "h_field", 1e-4);
  const double thr = get_num(oc, "threshold", 1e-5);
  const double tol = get_num(oc, "quad_tol", 1e-11);
  const CatalogLift lift = catalog_lift(c, variant, nodes, tol);
  SplitMix64 rng(seed);
  const double margin = 0.02 * (c.t1 - c.t0) + 2.0 * hf;
  double worst = 0;
  for (int i = 0; i < pts; ++i) {
    const SpacetimePoint p{rng.uniform(c.t0 + margin, c.t1 - margin),
                           rng.uniform(-1, 1), rng.uniform(-1, 1),
                           rng.uniform(-1, 1)};
    worst = std::max(
        worst, max_abs(maxwell_residual_full(lift.group, lift.eta, lift.pot,
                                             p, hf)));
  }
  return json{{"variant", variant}, {"points", pts},     {"h_field", hf},
              {"nodes", nodes},     {"max_residual", worst},
              {"threshold", thr},   {"pass", worst < thr}};
}

inline json run_check_solution(const json& cfg) {
  const SolutionCase c = case_from_config(cfg);
  const std::string variant = get_str(cfg, "variant", "primary");
  const int samples = static_cast<int>(get_num(cfg, "samples", 50));
  const double quad_tol = get_num(cfg, "quad_tol", 1e-9);
  const double threshold = get_num(cfg, "threshold", 1e-6);
  const double det_threshold = get_num(cfg, "det_threshold", 1e-8);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(get_num(cfg, "seed", 42));
  if (samples < 1) throw ConfigError("'samples' must be >= 1");

  const std::vector<double> ts = sample_times(c, samples);
  const ResidualReport rep = residual_reduced(c, variant, ts, quad_tol);
  const bool res_pass = rep.overall_max() < threshold &&
                        rep.det_identity_max < det_threshold;

  json resolved = cfg;
  resolved["variant"] = variant;
  resolved["samples"] = samples;
  resolved["quad_tol"] = quad_tol;
  resolved["threshold"] = threshold;
  resolved["det_threshold"] = det_threshold;
  resolved["seed"] = seed;
  resolved["interval"] = {c.t0, c.t1};

  json out{{"command", "check-solution"},
           {"scenario", resolved},
           {"seed", seed},
           {"case", case_name(c.id)},
           {"variant", variant},
           {"residuals", report_json(rep)},
           {"threshold", threshold}};
  bool pass = res_pass;
  if (cfg.contains("oracle") &&
      (!cfg.at("oracle").contains("enabled") ||
       cfg.at("oracle").at("enabled").get<bool>())) {
    out["oracle"] = oracle_check_case(c, variant, cfg.at("oracle"), seed);
    pass = pass && out["oracle"]["pass"].get<bool>();
  }
  out["pass"] = pass;
  return out;
}

inline json adjudication_json(const AdjudicationReport& rep) {
  json variants = json::array();
  for (const auto& v : rep.variants) {
    json jv{{"name", v.info.name},
            {"description", v.info.description},
            {"pass", v.pass}};
    jv["residuals"] = report_json(v.report);
    variants.push_back(jv);
  }
  return json{{"threshold", rep.threshold},
              {"det_threshold", rep.det_threshold},
              {"variants", variants},
              {"passing_variants", rep.passing}};
}

/// Term-level comparison of the printed per-group systems against the
/// generic reduction, plus the documented adjudication notes.
inline json run_reduced_adjudication(const json& cfg) {
  const json& rc = cfg.at("reduced_systems");
  const int samples = static_cast<int>(get_num(rc, "samples", 100));
  const double threshold = get_num(rc, "threshold", 1e-10);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(get_num(cfg, "seed", 42));

  std::vector<std::string> names;
  if (rc.contains("groups")) {
    for (const auto& v : rc.at("groups")) names.push_back(v.get<std::string>());
  } else {
    names = {"I", "II", "III", "IV", "V", "VI", "VII"};
  }

  json groups = json::array();
  bool all = true;
  for (const auto& name : names) {
    const GroupKind kind = parse_group_kind(name);
    const Group g = kind == GroupKind::VII
                        ? Group::make_vii(get_num(rc, "alpha", 1.0))
                        : Group::make(kind);
    SplitMix64 rng(seed);
    const FormComparison cmp = compare_reduced_forms(g, samples, rng);
    json notes = json::array();
    for (const auto& n : printed_form_notes(kind))
      notes.push_back({{"component", n.component}, {"note", n.note}});
    json discrepancies = json::array();
    const char* comp_names[3] = {"beta1", "beta2", "beta3"};
    for (int a = 0; a < 3; ++a) {
      if (cmp.generic_vs_printed[a] > threshold)
        discrepancies.push_back(
            {{"component", comp_names[a]},
             {"max_abs_difference", cmp.generic_vs_printed[a]}});
    }
    double agree = 0;
    for (int a = 0; a < 3; ++a)
      agree = std::max(agree, cmp.generic_vs_specialized[a]);
    const bool pass = agree < threshold;
    all = all && pass;
    groups.push_back({{"group", name},
                      {"samples", samples},
                      {"generic_vs_adjudicated_max", agree},
                      {"printed_discrepancies", discrepancies},
                      {"adjudication_notes", notes},
                      {"pass", pass}});
  }
  json resolved = cfg;
  resolved["reduced_systems"]["samples"] = samples;
  resolved["reduced_systems"]["threshold"] = threshold;
  return json{{"command", "adjudicate"},
              {"scenario", resolved},
              {"seed", seed},
              {"target", "reduced-systems"},
              {"groups", groups},
              {"pass", all}};
}

inline json run_adjudicate(const json& cfg) {
  if (cfg.contains("reduced_systems")) return run_reduced_adjudication(cfg);

  const SolutionCase c = case_from_config(cfg);
  const int samples = static_cast<int>(get_num(cfg, "samples", 50));
  const double quad_tol = get_num(cfg, "quad_tol", 1e-9);
  const double threshold = get_num(cfg, "threshold", 1e-6);
  const double det_threshold = get_num(cfg, "det_threshold", 1e-8);
  const std::uint64_t seed =
      static_cast<std::uint64_t>(get_num(cfg, "seed", 42));

  std::vector<std::string> which;
  if (cfg.contains("variants")) {
    for (const auto& v : cfg.at("variants")) which.push_back(v.get<std::string>());
  }
  const std::vector<double> ts = sample_times(c, samples);
  const AdjudicationReport rep =
      adjudicate_variants(c, which, ts, quad_tol, threshold, det_threshold);

  json resolved = cfg;
  resolved["samples"] = samples;
  resolved["quad_tol"] = quad_tol;
  resolved["threshold"] = threshold;
  resolved["det_threshold"] = det_threshold;
  resolved["seed"] = seed;
  resolved["interval"] = {c.t0, c.t1};

  json out{{"command", "adjudicate"},
           {"scenario", resolved},
           {"seed", seed},
           {"case", case_name(c.id)},
           {"target", "case"},
           {"adjudication", adjudication_json(rep)}};

  bool pass = !rep.passing.empty();
  if (pass && cfg.contains("oracle") &&
      (!cfg.at("oracle").contains("enabled") ||
       cfg.at("oracle").at("enabled").get<bool>())) {
    out["oracle"] = oracle_check_case(c, rep.passing.front(), cfg.at("oracle"),
                                      seed);
    pass = pass && out["oracle"]["pass"].get<bool>();
  }
  out["pass"] = pass;
  return out;
}

/// Maps a thrown error to the subcommand exit code.
inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_config_error;
  if (dynamic_cast<const ConstraintViolation*>(&e)) return exit_config_error;
  return exit_numeric_error;
}

}  // namespace harness
}  // namespace bmx
