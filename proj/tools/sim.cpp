// sim: command-line front end for the ring-actuator simulator.
//   sim run --config FILE [--experiment NAME] [--out DIR] [--svg]
//   sim calibrate --config FILE --targets FILE [--out DIR]
//   sim validate --config FILE
// Exit codes: 0 success, 1 validation/input error, 2 runtime error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmasim/config.hpp"
#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"
#include "cmasim/experiments.hpp"

namespace fs = std::filesystem;
using cmasim::csv::format_number;

namespace {

constexpr int kOk = 0;
constexpr int kInputFailure = 1;
constexpr int kRuntimeFailure = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cmasim::InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cmasim::InputError("cannot write " + path.string());
  out << text;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw cmasim::InputError("cannot create " + dir + ": " + ec.message());
  return p;
}

cmasim::ScenarioConfig load_config(const std::string& path) {
  return cmasim::parse_config(read_file(path));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

nlohmann::json manifest_base(const std::string& command, const cmasim::ScenarioConfig& cfg,
                             const std::string& config_path) {
  nlohmann::json m;
  m["command"] = command;
  m["config_path"] = config_path;
  m["config_hash"] = cmasim::config_hash(cfg);
  m["versions"] = {{"sim", cmasim::tool_version()}, {"nlohmann_json", NLOHMANN_JSON_VERSION_MAJOR * 10000 +
                                                                         NLOHMANN_JSON_VERSION_MINOR * 100 +
                                                                         NLOHMANN_JSON_VERSION_PATCH}};
  return m;
}

struct RunArgs {
  std::string config;
  std::string experiment;
  std::string out;
  bool svg = false;
};

int cmd_run(const RunArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = load_config(a.config);
  if (!a.experiment.empty()) {
    const auto e = cmasim::parse_experiment(a.experiment);
    if (!e) throw cmasim::InputError("unknown experiment '" + a.experiment + "'");
    cfg.run.experiment = *e;
  }
  if (!a.out.empty()) cfg.run.out_dir = a.out;
  const auto dir = prepare_dir(cfg.run.out_dir);
  const double t_parse = seconds_since(t0);

  const auto report = cmasim::run_experiment(cfg, cfg.run.experiment);
  const double t_sim = seconds_since(t0) - t_parse;

  const std::string stem(cmasim::to_string(cfg.run.experiment));
  nlohmann::json outputs = nlohmann::json::array();
  write_file(dir / (stem + ".csv"), cmasim::to_csv(report));
  outputs.push_back(stem + ".csv");
  if (a.svg) {
    write_file(dir / (stem + ".svg"), cmasim::emit_svg(report, cmasim::chart_kind(cfg.run.experiment)));
    outputs.push_back(stem + ".svg");
  }

  const bool incomplete = cmasim::has_incomplete_rows(report);
  auto m = manifest_base("run", cfg, a.config);
  m["experiment"] = stem;
  m["outputs"] = outputs;
  m["incomplete"] = incomplete;
  m["timings_s"] = {{"parse", t_parse}, {"simulate", t_sim}, {"total", seconds_since(t0)}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");

  std::cout << stem << ": " << report.rows.size() << " rows -> " << (dir / (stem + ".csv")).string() << "\n";
  if (incomplete) {
    std::cerr << "sim: at least one run ended with beads left in the lumen\n";
    return kRuntimeFailure;
  }
  return kOk;
}

struct CalibrateArgs {
  std::string config;
  std::string targets;
  std::string out;
  int max_sweeps = cmasim::TransportCalibrationOptions{}.max_sweeps;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = load_config(a.config);
  if (!a.out.empty()) cfg.run.out_dir = a.out;
  const auto targets = cmasim::parse_targets_csv(read_file(a.targets), cfg.run.pattern_cycles);
  const auto dir = prepare_dir(cfg.run.out_dir);

  cmasim::TransportCalibrationOptions options;
  options.max_sweeps = a.max_sweeps;
  const auto fit = cmasim::calibrate_transport(targets, cmasim::make_scene(cfg), options);

  cfg.transport = fit.params;
  write_file(dir / "calibrated_config.json", cmasim::serialize_config(cfg));

  std::string table = "pattern,t_on_s,target_gps,velocity_gps\n";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    table += std::string(cmasim::to_string(targets[i].pattern.kind)) + "," +
             format_number(targets[i].pattern.t_on_s) + "," + format_number(targets[i].velocity_gps) + "," +
             format_number(fit.velocities[i]) + "\n";
  }
  write_file(dir / "calibration_fit.csv", table);

  std::string history = "sweep,objective\n0," + format_number(fit.objective_initial) + "\n";
  for (std::size_t i = 0; i < fit.history.size(); ++i) {
    history += std::to_string(i + 1) + "," + format_number(fit.history[i]) + "\n";
  }
  write_file(dir / "calibration_history.csv", history);

  auto m = manifest_base("calibrate", cfg, a.config);
  m["targets_path"] = a.targets;
  m["outputs"] = {"calibrated_config.json", "calibration_fit.csv", "calibration_history.csv"};
  m["fit"] = {{"p_fric", fit.params.p_fric_kPa},
              {"mobility", fit.params.mobility_mm_s_kPa},
              {"objective_initial", fit.objective_initial},
              {"objective_final", fit.objective_final},
              {"evaluations", fit.evaluations}};
  m["timings_s"] = {{"total", seconds_since(t0)}};
  write_file(dir / "manifest.json", m.dump(2) + "\n");

  std::cout << "p_fric=" << format_number(fit.params.p_fric_kPa)
            << " mobility=" << format_number(fit.params.mobility_mm_s_kPa)
            << " objective=" << format_number(fit.objective_final) << "\n";
  return kOk;
}

int cmd_validate(const std::string& path) {
  const auto cfg = load_config(path);
  std::cout << "valid " << cmasim::config_hash(cfg) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ring-actuator rectum simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run one experiment and write its CSV (and SVG)");
  run->add_option("--config", run_args.config, "JSON scenario config")->required();
  run->add_option("--experiment", run_args.experiment, "sweep|pressure|patterns|scenario");
  run->add_option("--out", run_args.out, "Output directory (overrides run.out_dir)");
  run->add_flag("--svg", run_args.svg, "Also write an SVG chart");

  CalibrateArgs cal_args;
  auto* cal = app.add_subcommand("calibrate", "Fit p_fric and mobility to measured velocities");
  cal->add_option("--config", cal_args.config, "JSON scenario config")->required();
  cal->add_option("--targets", cal_args.targets, "CSV pattern,t_on_s,velocity_gps")->required();
  cal->add_option("--out", cal_args.out, "Output directory (overrides run.out_dir)");
  cal->add_option("--max-sweeps", cal_args.max_sweeps, "Coordinate-descent sweep budget")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Parse and validate a config");
  val->add_option("--config", validate_path, "JSON scenario config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputFailure;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*cal) return cmd_calibrate(cal_args);
    if (*val) return cmd_validate(validate_path);
  } catch (const cmasim::ParseError& e) {
    std::cerr << "sim: parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return kInputFailure;
  } catch (const cmasim::CalibrationError& e) {
    std::cerr << "sim: calibration failed: " << e.what() << "\n";
    return kRuntimeFailure;
  } catch (const cmasim::Error& e) {
    std::cerr << "sim: " << e.what() << "\n";
    return kInputFailure;
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kInputFailure;
}
