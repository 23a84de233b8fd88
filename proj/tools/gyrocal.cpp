// gyrocal: command-line front end for the calibration library.
//
// Subcommands: simulate, calibrate, montecarlo, sweep, compare, convergence.
// All commands are deterministic for a fixed (config, seed) pair.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gyrocal/errors.hpp"
#include "gyrocal/estimator.hpp"
#include "gyrocal/evaluation.hpp"
#include "gyrocal/io.hpp"
#include "gyrocal/model.hpp"
#include "gyrocal/protocol.hpp"
#include "gyrocal/simulator.hpp"

namespace {

using gyrocal::io::json;

// Exit codes, also documented in the README.
enum ExitCode {
  kOk = 0,
  kUsageOrConfig = 1,
  kIoFailure = 2,
  kLogParse = 3,
  kSegmentation = 4,
  kSingularDesign = 5,
  kNonConvergence = 6,
  kUnphysicalEstimate = 7,
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string solver = "ils";
  std::string units = "rad";
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  const char* env_config = std::getenv("GYROCAL_CONFIG");
  if (env_config != nullptr) opt.config_path = env_config;
  cmd->add_option("--config", opt.config_path, "JSON run configuration");
  cmd->add_option("--seed", opt.seed, "Random seed (overrides config)");
  cmd->add_option("--solver", opt.solver, "Solver: ils or lm")
      ->check(CLI::IsMember({"ils", "lm"}));
  cmd->add_option("--units", opt.units, "Units for sample logs and omega flags")
      ->check(CLI::IsMember({"rad", "deg"}));
  cmd->add_option("--out", opt.out_path, "Output path (default: stdout)");
  cmd->add_option("--format", opt.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

gyrocal::io::RunConfig effective_config(const CommonOptions& opt) {
  gyrocal::io::RunConfig cfg;
  if (!opt.config_path.empty()) {
    try {
      cfg = gyrocal::io::load_run_config(opt.config_path);
    } catch (const gyrocal::ParseError& e) {
      // Config problems are usage errors, unlike data-file parse failures.
      throw std::invalid_argument(e.what());
    }
  }
  if (opt.seed.has_value()) cfg.sim.seed = *opt.seed;
  if (opt.units == "deg") cfg.degrees = true;
  return cfg;
}

gyrocal::Solver solver_from(const std::string& name) {
  return name == "lm" ? gyrocal::Solver::LM : gyrocal::Solver::ILS;
}

gyrocal::io::ReportMeta meta_for(const gyrocal::io::RunConfig& cfg) {
  gyrocal::io::ReportMeta meta;
  meta.seed = cfg.sim.seed;
  meta.config_hash = gyrocal::io::config_hash(gyrocal::io::run_config_to_json(cfg));
  return meta;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw gyrocal::ParseError(std::string("bad JSON in '") + path + "': " + e.what());
  }
}

int cmd_simulate(const CommonOptions& opt, const std::string& truth_out) {
  const auto cfg = effective_config(opt);
  gyrocal::RngStream rng(cfg.sim.seed);
  const auto protocol = gyrocal::g_optimal_protocol(cfg.omega, cfg.sim.sample_rate);
  const auto truth = gyrocal::draw_truth(cfg.sim, rng);
  const auto run = gyrocal::simulate_protocol_run(truth, protocol, cfg.sim, rng);

  std::ostringstream log_text;
  gyrocal::io::write_sample_log(log_text, {run.log, run.labels}, cfg.degrees);
  write_text(opt.out_path, log_text.str());

  const auto meta = meta_for(cfg);
  const json truth_json = {{"params",
                            {{"kx", truth.scale.x},
                             {"ky", truth.scale.y},
                             {"kz", truth.scale.z},
                             {"bx", truth.bias.x},
                             {"by", truth.bias.y},
                             {"bz", truth.bias.z}}},
                           {"protocol", gyrocal::io::protocol_to_json(protocol)},
                           {"meta",
                            {{"seed", meta.seed},
                             {"config_hash", meta.config_hash},
                             {"tool_version", meta.tool_version}}}};
  std::string truth_path = truth_out;
  if (truth_path.empty() && !opt.out_path.empty()) truth_path = opt.out_path + ".truth.json";
  if (!truth_path.empty()) write_text(truth_path, truth_json.dump(2) + "\n");
  return kOk;
}

int cmd_calibrate(const CommonOptions& opt, const std::string& log_path,
                  const std::string& protocol_path) {
  const auto cfg = effective_config(opt);

  std::ifstream log_in(log_path);
  if (!log_in) throw std::ios_base::failure("cannot open '" + log_path + "'");
  const auto log = gyrocal::io::read_sample_log(log_in, cfg.degrees);

  gyrocal::Protocol protocol;
  if (!protocol_path.empty()) {
    protocol = gyrocal::io::protocol_from_json(load_json(protocol_path));
  } else {
    protocol = gyrocal::g_optimal_protocol(cfg.omega, cfg.sim.sample_rate);
  }

  std::optional<std::vector<int>> labels;
  if (log.labeled()) labels = log.labels;
  const auto segmented = gyrocal::segment_log(log.samples, protocol, labels, cfg.segmentation);
  const auto observations = gyrocal::observations_from(segmented, protocol);
  const auto result = gyrocal::solve(solver_from(opt.solver), observations, cfg.solver);

  const json report = gyrocal::io::calibration_report(result, observations, meta_for(cfg));
  write_text(opt.out_path, report.dump(2) + "\n");
  return kOk;
}

int cmd_montecarlo(const CommonOptions& opt) {
  const auto cfg = effective_config(opt);
  const auto campaign = gyrocal::run_campaign(cfg.sim, cfg.n_truths, cfg.n_trials, cfg.omega,
                                              solver_from(opt.solver), cfg.solver);
  if (opt.format == "csv") {
    std::ostringstream out;
    gyrocal::io::write_trial_errors_csv(out, campaign.records, cfg.omega);
    write_text(opt.out_path, out.str());
  } else {
    const json report = gyrocal::io::montecarlo_report_to_json(campaign.report, meta_for(cfg));
    write_text(opt.out_path, report.dump(2) + "\n");
  }
  return kOk;
}

int cmd_sweep(const CommonOptions& opt) {
  const auto cfg = effective_config(opt);
  const auto grid = cfg.sweep_grid.empty() ? gyrocal::default_sweep_grid() : cfg.sweep_grid;
  if (opt.format == "csv") {
    std::ostringstream out;
    bool first = true;
    for (double omega : grid) {
      const auto campaign = gyrocal::run_campaign(cfg.sim, cfg.n_truths, cfg.n_trials, omega,
                                                  solver_from(opt.solver), cfg.solver);
      std::ostringstream point;
      gyrocal::io::write_trial_errors_csv(point, campaign.records, omega);
      std::string text = point.str();
      if (!first) text.erase(0, text.find('\n') + 1);  // keep a single header
      out << text;
      first = false;
    }
    write_text(opt.out_path, out.str());
  } else {
    const auto report = gyrocal::speed_sweep(cfg.sim, grid, cfg.n_truths, cfg.n_trials,
                                             solver_from(opt.solver));
    write_text(opt.out_path, gyrocal::io::sweep_report_to_json(report, meta_for(cfg)).dump(2) + "\n");
  }
  return kOk;
}

int cmd_compare(const CommonOptions& opt, const std::string& path_a, const std::string& path_b,
                double flag_threshold) {
  const json a = load_json(path_a);
  const json b = load_json(path_b);
  const auto pa = gyrocal::io::params_from_report(a);
  const auto pb = gyrocal::io::params_from_report(b);

  json deltas = json::object();
  json flags = json::array();
  for (int p = 0; p < 6; ++p) {
    const char* name = gyrocal::kParameterNames[p];
    const double va = p < 3 ? pa.scale[p] : pa.bias[p - 3];
    const double vb = p < 3 ? pb.scale[p] : pb.bias[p - 3];
    const double delta = vb - va;
    deltas[name] = delta;
    if (std::abs(delta) >= flag_threshold) flags.push_back(name);
  }
  const json summary = {{"a", path_a},
                        {"b", path_b},
                        {"deltas", deltas},
                        {"flag_threshold", flag_threshold},
                        {"flags", flags}};
  write_text(opt.out_path, summary.dump(2) + "\n");
  return kOk;
}

int cmd_convergence(const CommonOptions& opt, const std::vector<double>& truth_values) {
  const auto cfg = effective_config(opt);

  std::vector<gyrocal::ConvergenceCase> cases;
  if (!truth_values.empty()) {
    if (truth_values.size() != 6) {
      throw gyrocal::ParseError("--truth needs six values: kx ky kz bx by bz");
    }
    gyrocal::ConvergenceCase cs;
    cs.truth.scale = {truth_values[0], truth_values[1], truth_values[2]};
    cs.truth.bias = {truth_values[3], truth_values[4], truth_values[5]};
    cs.config = cfg.sim;
    cs.omega = cfg.omega;
    cases.push_back(cs);
  } else {
    // Default study: a high-gain sensor, a high-bias sensor, and one with both.
    const double ks[3][3] = {{1.9074, 1.9529, 1.5635}, {1.0979, 1.1052, 0.9851},
                             {1.5044, 1.6494, 1.5282}};
    const double bs[3][3] = {{0.0827, 0.0265, -0.0805}, {-0.1046, 0.1995, 0.1565},
                             {0.1483, -0.1282, 0.1794}};
    for (int c = 0; c < 3; ++c) {
      gyrocal::ConvergenceCase cs;
      cs.truth.scale = {ks[c][0], ks[c][1], ks[c][2]};
      cs.truth.bias = {bs[c][0], bs[c][1], bs[c][2]};
      cs.config = cfg.sim;
      cs.omega = cfg.omega;
      cases.push_back(cs);
    }
  }

  const auto rows = gyrocal::convergence_study(cases, cfg.solver);
  json out = json::array();
  for (const auto& row : rows) {
    json iterates = json::array();
    for (const auto& p : row.iterates) {
      iterates.push_back({{"kx", p.scale.x},
                          {"ky", p.scale.y},
                          {"kz", p.scale.z},
                          {"bx", p.bias.x},
                          {"by", p.bias.y},
                          {"bz", p.bias.z}});
    }
    out.push_back({{"truth",
                    {{"kx", row.truth.scale.x},
                     {"ky", row.truth.scale.y},
                     {"kz", row.truth.scale.z},
                     {"bx", row.truth.bias.x},
                     {"by", row.truth.bias.y},
                     {"bz", row.truth.bias.z}}},
                   {"iterates", iterates},
                   {"iterations", row.iterations},
                   {"converged", row.converged}});
  }
  write_text(opt.out_path, out.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Servomotor-aided triaxial gyroscope calibration toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic calibration log");
  std::string truth_out;
  add_common(simulate, opt);
  simulate->add_option("--truth-out", truth_out, "Ground-truth JSON path");

  auto* calibrate = app.add_subcommand("calibrate", "Estimate parameters from a sample log");
  std::string log_path, protocol_path;
  add_common(calibrate, opt);
  calibrate->add_option("log", log_path, "Sample log CSV")->required();
  calibrate->add_option("--protocol", protocol_path, "Protocol sidecar JSON");

  auto* montecarlo = app.add_subcommand("montecarlo", "Repeated-simulation error study");
  add_common(montecarlo, opt);

  auto* sweep = app.add_subcommand("sweep", "Error study across rotation speeds");
  add_common(sweep, opt);

  auto* compare = app.add_subcommand("compare", "Diff two calibration reports");
  std::string report_a, report_b;
  double flag_threshold = 1e-3;
  add_common(compare, opt);
  compare->add_option("report_a", report_a, "First report JSON")->required();
  compare->add_option("report_b", report_b, "Second report JSON")->required();
  compare->add_option("--flag-threshold", flag_threshold,
                      "Flag parameters whose |delta| reaches this value");

  auto* convergence = app.add_subcommand("convergence", "Iteration table for scripted sensors");
  std::vector<double> truth_values;
  add_common(convergence, opt);
  convergence->add_option("--truth", truth_values, "Six values: kx ky kz bx by bz");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(opt, truth_out);
    if (calibrate->parsed()) return cmd_calibrate(opt, log_path, protocol_path);
    if (montecarlo->parsed()) return cmd_montecarlo(opt);
    if (sweep->parsed()) return cmd_sweep(opt);
    if (compare->parsed()) return cmd_compare(opt, report_a, report_b, flag_threshold);
    if (convergence->parsed()) return cmd_convergence(opt, truth_values);
  } catch (const gyrocal::SegmentationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSegmentation;
  } catch (const gyrocal::SingularDesignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSingularDesign;
  } catch (const gyrocal::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const gyrocal::UnphysicalEstimateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnphysicalEstimate;
  } catch (const gyrocal::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLogParse;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageOrConfig;
  }
  return kUsageOrConfig;
}
