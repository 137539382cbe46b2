// Command-line driver: frame verification, reduced-system integration,
// catalog evaluation and formula adjudication.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bmx/harness.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::int64_t seed = -1;
  std::int64_t points = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "JSON scenario file")->required();
  cmd->add_option("--out", args.out, "report output path (JSON)");
  cmd->add_option("--seed", args.seed, "override the scenario RNG seed");
  cmd->add_option("--points", args.points, "override the sample-point count");
}

bmx::json load_config(const CommonArgs& args) {
  bmx::json cfg = bmx::harness::load_json_file(args.config);
  if (args.seed >= 0) cfg["seed"] = args.seed;
  if (args.points >= 0) {
    cfg["points"] = args.points;
    cfg["samples"] = args.points;
  }
  return cfg;
}

void emit(const bmx::json& report, const CommonArgs& args) {
  const std::string body = report.dump(2) + "\n";
  if (args.out.empty())
    std::fputs(body.c_str(), stdout);
  else
    bmx::harness::write_text_file(args.out, body);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reduced Maxwell systems on homogeneous spacetimes"};
  app.require_subcommand(1);

  CommonArgs verify_args, integrate_args, check_args, adjudicate_args;
  CLI::App* verify = app.add_subcommand(
      "verify-group", "frame algebra and identity checks for one group");
  add_common(verify, verify_args);

  CLI::App* integrate = app.add_subcommand(
      "integrate", "integrate the reduced system and emit a trajectory CSV");
  add_common(integrate, integrate_args);
  std::string csv_out;
  integrate->add_option("--csv", csv_out,
                        "trajectory CSV path (default: <out>.csv)");

  CLI::App* check = app.add_subcommand(
      "check-solution", "residual check of one catalog case variant");
  add_common(check, check_args);

  CLI::App* adjudicate = app.add_subcommand(
      "adjudicate", "run every registered formula variant and report");
  add_common(adjudicate, adjudicate_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      const bmx::json report = bmx::harness::run_verify_group(load_config(verify_args));
      emit(report, verify_args);
      return report.at("pass").get<bool>() ? bmx::exit_pass
                                           : bmx::exit_check_failed;
    }
    if (integrate->parsed()) {
      const auto outcome = bmx::harness::run_integrate(load_config(integrate_args));
      std::string csv_path = csv_out;
      if (csv_path.empty())
        csv_path = integrate_args.out.empty() ? "trajectory.csv"
                                              : integrate_args.out + ".csv";
      bmx::harness::write_text_file(csv_path, outcome.csv);
      bmx::json report = outcome.report;
      report["trajectory_csv"] = csv_path;
      emit(report, integrate_args);
      return report.at("pass").get<bool>() ? bmx::exit_pass
                                           : bmx::exit_check_failed;
    }
    if (check->parsed()) {
      const bmx::json report =
          bmx::harness::run_check_solution(load_config(check_args));
      emit(report, check_args);
      return report.at("pass").get<bool>() ? bmx::exit_pass
                                           : bmx::exit_check_failed;
    }
    if (adjudicate->parsed()) {
      const bmx::json report =
          bmx::harness::run_adjudicate(load_config(adjudicate_args));
      emit(report, adjudicate_args);
      return report.at("pass").get<bool>() ? bmx::exit_pass
                                           : bmx::exit_check_failed;
    }
  } catch (const bmx::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return bmx::harness::exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return bmx::exit_numeric_error;
  }
  return bmx::exit_config_error;
}
