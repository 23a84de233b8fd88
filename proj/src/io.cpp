#include "gyrocal/io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gyrocal/errors.hpp"

namespace gyrocal::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& token, std::size_t line_no, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size() || !std::isfinite(v)) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw ParseError("sample log line " + std::to_string(line_no) + ": bad " + field +
                     " value '" + token + "'");
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ParseError("config: unknown key '" + key + "' in " + where);
  }
}

Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw ParseError("protocol: unknown axis '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
  if (s == "ccw") return Direction::CCW;
  if (s == "cw") return Direction::CW;
  throw ParseError("protocol: unknown direction '" + s + "'");
}

json quantiles_to_json(const Quantiles& q) {
  return json{{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

json sim_config_to_json(const SimConfig& cfg) {
  return json{{"scale_range", {cfg.scale_lo, cfg.scale_hi}},
              {"bias_range", {cfg.bias_lo, cfg.bias_hi}},
              {"bias_random_sign", cfg.bias_random_sign},
              {"misalignment_max", cfg.misalignment_max},
              {"noise_sigma", cfg.noise_sigma},
              {"speed_jitter_frac", cfg.speed_jitter_frac},
              {"sample_rate_hz", cfg.sample_rate},
              {"seed", cfg.seed}};
}

}  // namespace

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

void write_sample_log(std::ostream& out, const SampleLog& log, bool degrees) {
  if (log.samples.size() != log.labels.size()) {
    throw Error("write_sample_log: labels must parallel samples");
  }
  out << kSampleLogHeader << "\n";
  const double scale = degrees ? 180.0 / std::numbers::pi : 1.0;
  for (std::size_t i = 0; i < log.samples.size(); ++i) {
    const auto& s = log.samples[i];
    out << log.labels[i] << ',' << fmt(s.t) << ',' << fmt(s.m.x * scale) << ','
        << fmt(s.m.y * scale) << ',' << fmt(s.m.z * scale) << "\n";
  }
}

SampleLog read_sample_log(std::istream& in, bool degrees) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("sample log: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSampleLogHeader) {
    throw ParseError("sample log: expected header '" + std::string(kSampleLogHeader) +
                     "', got '" + line + "'");
  }
  SampleLog log;
  const double scale = degrees ? std::numbers::pi / 180.0 : 1.0;
  std::size_t line_no = 1;
  double prev_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 5> tokens;
    std::size_t field = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (field >= tokens.size()) {
          throw ParseError("sample log line " + std::to_string(line_no) + ": too many fields");
        }
        tokens[field++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (field != tokens.size()) {
      throw ParseError("sample log line " + std::to_string(line_no) + ": expected 5 fields");
    }
    int obs_id = 0;
    try {
      std::size_t used = 0;
      obs_id = std::stoi(tokens[0], &used);
      if (used != tokens[0].size()) throw std::invalid_argument(tokens[0]);
    } catch (const std::exception&) {
      throw ParseError("sample log line " + std::to_string(line_no) + ": bad obs_id '" +
                       tokens[0] + "'");
    }
    GyroSample s;
    s.t = parse_double(tokens[1], line_no, "t");
    s.m.x = parse_double(tokens[2], line_no, "mx") * scale;
    s.m.y = parse_double(tokens[3], line_no, "my") * scale;
    s.m.z = parse_double(tokens[4], line_no, "mz") * scale;
    if (s.t < prev_t) {
      throw ParseError("sample log line " + std::to_string(line_no) +
                       ": timestamps must be non-decreasing");
    }
    prev_t = s.t;
    log.samples.push_back(s);
    log.labels.push_back(obs_id);
  }
  if (log.samples.empty()) throw ParseError("sample log: no samples");
  return log;
}

json protocol_to_json(const Protocol& protocol) {
  json steps = json::array();
  for (std::size_t i = 0; i < protocol.steps.size(); ++i) {
    const auto& s = protocol.steps[i];
    steps.push_back(json{{"obs_id", i},
                         {"axis", axis_name(s.axis)},
                         {"direction", s.direction == Direction::CCW ? "ccw" : "cw"},
                         {"omega_rad_s", s.omega},
                         {"revolutions", s.revolutions},
                         {"dwell_after_s", s.dwell_after}});
  }
  return json{{"sample_rate_hz", protocol.sample_rate}, {"steps", steps}};
}

Protocol protocol_from_json(const json& j) {
  reject_unknown_keys(j, {"sample_rate_hz", "steps"}, "protocol");
  Protocol protocol;
  protocol.sample_rate = j.value("sample_rate_hz", 200.0);
  if (!(protocol.sample_rate > 0.0)) throw ParseError("protocol: sample_rate_hz must be > 0");
  if (!j.contains("steps")) throw ParseError("protocol: missing steps");
  for (const auto& step_json : j.at("steps")) {
    reject_unknown_keys(step_json,
                        {"obs_id", "axis", "direction", "omega_rad_s", "revolutions",
                         "dwell_after_s"},
                        "protocol step");
    ProtocolStep step;
    step.axis = axis_from_string(step_json.at("axis").get<std::string>());
    step.direction = direction_from_string(step_json.at("direction").get<std::string>());
    step.omega = step_json.at("omega_rad_s").get<double>();
    step.revolutions = step_json.value("revolutions", 1);
    step.dwell_after = step_json.value("dwell_after_s", 3.0);
    if (!(step.omega > 0.0)) throw ParseError("protocol: omega_rad_s must be > 0");
    if (step.revolutions < 1) throw ParseError("protocol: revolutions must be >= 1");
    protocol.steps.push_back(step);
  }
  if (protocol.steps.empty()) throw ParseError("protocol: no steps");
  return protocol;
}

json calibration_report(const EstimationResult& result, const ObservationSet& obs,
                        const ReportMeta& meta) {
  json residuals = json::array();
  const double beta0 = result.beta.consistent_beta0();
  for (const auto& o : obs.rows) {
    double y = beta0;
    for (int j = 0; j < 3; ++j) {
      const double m = o.mean(j);
      y += result.beta.coeff[j] * m * m + result.beta.coeff[j + 3] * m;
    }
    residuals.push_back(y - o.response_y);
  }
  json beta = json::array();
  beta.push_back(result.beta.beta0);
  for (double c : result.beta.coeff) beta.push_back(c);

  return json{{"params",
               {{"kx", result.params.scale.x},
                {"ky", result.params.scale.y},
                {"kz", result.params.scale.z},
                {"bx", result.params.bias.x},
                {"by", result.params.bias.y},
                {"bz", result.params.bias.z}}},
              {"beta", beta},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"cost", result.final_cost},
              {"residuals", residuals},
              {"meta",
               {{"seed", meta.seed},
                {"config_hash", meta.config_hash},
                {"tool_version", meta.tool_version}}}};
}

CalibrationParams params_from_report(const json& report) {
  const auto& p = report.at("params");
  CalibrationParams params;
  params.scale = {p.at("kx").get<double>(), p.at("ky").get<double>(), p.at("kz").get<double>()};
  params.bias = {p.at("bx").get<double>(), p.at("by").get<double>(), p.at("bz").get<double>()};
  return params;
}

json montecarlo_report_to_json(const MonteCarloReport& report, const ReportMeta& meta) {
  json params = json::object();
  for (int p = 0; p < 6; ++p) {
    params[kParameterNames[p]] = json{{"mse", report.mse[p]},
                                      {"error_quantiles", quantiles_to_json(report.error_quantiles[p])}};
  }
  return json{{"trials", report.trials},
              {"non_converged", report.non_converged},
              {"omega_rad_s", report.omega},
              {"solver", report.solver == Solver::ILS ? "ils" : "lm"},
              {"parameters", params},
              {"iteration_histogram", report.iteration_histogram},
              {"config", sim_config_to_json(report.config)},
              {"meta",
               {{"seed", meta.seed},
                {"config_hash", meta.config_hash},
                {"tool_version", meta.tool_version}}}};
}

json sweep_report_to_json(const SweepReport& report, const ReportMeta& meta) {
  json points = json::array();
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    json mse = json::object();
    for (int p = 0; p < 6; ++p) mse[kParameterNames[p]] = report.reports[i].mse[p];
    points.push_back(json{{"omega_rad_s", report.grid[i]},
                          {"mse", mse},
                          {"non_converged", report.reports[i].non_converged},
                          {"trials", report.reports[i].trials}});
  }
  return json{{"points", points},
              {"meta",
               {{"seed", meta.seed},
                {"config_hash", meta.config_hash},
                {"tool_version", meta.tool_version}}}};
}

void write_trial_errors_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                            double omega) {
  out << "omega,trial,parameter,truth,estimate,error\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    for (int p = 0; p < 6; ++p) {
      const double truth = p < 3 ? rec.truth.scale[p] : rec.truth.bias[p - 3];
      const double est = p < 3 ? rec.estimate.scale[p] : rec.estimate.bias[p - 3];
      out << fmt(omega) << ',' << i << ',' << kParameterNames[p] << ',' << fmt(truth) << ','
          << fmt(est) << ',' << fmt(rec.error(p)) << "\n";
    }
  }
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"sim", "solver", "segmentation", "omega_rad_s", "n_truths", "n_trials",
                       "sweep_grid", "units", "seed"},
                      "top level");
  RunConfig cfg;
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    reject_unknown_keys(s,
                        {"scale_range", "bias_range", "bias_random_sign", "misalignment_max",
                         "noise_sigma", "speed_jitter_frac", "sample_rate_hz", "extreme"},
                        "sim");
    if (s.value("extreme", false)) cfg.sim = SimConfig::extreme();
    if (s.contains("scale_range")) {
      cfg.sim.scale_lo = s.at("scale_range").at(0).get<double>();
      cfg.sim.scale_hi = s.at("scale_range").at(1).get<double>();
    }
    if (s.contains("bias_range")) {
      cfg.sim.bias_lo = s.at("bias_range").at(0).get<double>();
      cfg.sim.bias_hi = s.at("bias_range").at(1).get<double>();
    }
    if (s.contains("bias_random_sign")) cfg.sim.bias_random_sign = s.at("bias_random_sign").get<bool>();
    if (s.contains("misalignment_max")) cfg.sim.misalignment_max = s.at("misalignment_max").get<double>();
    if (s.contains("noise_sigma")) cfg.sim.noise_sigma = s.at("noise_sigma").get<double>();
    if (s.contains("speed_jitter_frac")) cfg.sim.speed_jitter_frac = s.at("speed_jitter_frac").get<double>();
    if (s.contains("sample_rate_hz")) cfg.sim.sample_rate = s.at("sample_rate_hz").get<double>();
    if (!cfg.sim.valid()) throw ParseError("config: sim values violate invariants");
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown_keys(s, {"tolerance", "max_iterations", "condition_bound"}, "solver");
    if (s.contains("tolerance")) cfg.solver.tolerance = s.at("tolerance").get<double>();
    if (s.contains("max_iterations")) cfg.solver.max_iterations = s.at("max_iterations").get<int>();
    if (s.contains("condition_bound")) cfg.solver.condition_bound = s.at("condition_bound").get<double>();
    if (!(cfg.solver.tolerance > 0.0) || cfg.solver.max_iterations < 1) {
      throw ParseError("config: solver values violate invariants");
    }
  }
  if (j.contains("segmentation")) {
    const auto& s = j.at("segmentation");
    reject_unknown_keys(s, {"motion_threshold_frac", "min_duration_frac", "smoothing_window_s"},
                        "segmentation");
    if (s.contains("motion_threshold_frac")) cfg.segmentation.motion_threshold_frac = s.at("motion_threshold_frac").get<double>();
    if (s.contains("min_duration_frac")) cfg.segmentation.min_duration_frac = s.at("min_duration_frac").get<double>();
    if (s.contains("smoothing_window_s")) cfg.segmentation.smoothing_window_s = s.at("smoothing_window_s").get<double>();
  }
  if (j.contains("omega_rad_s")) cfg.omega = j.at("omega_rad_s").get<double>();
  if (!(cfg.omega > 0.0)) throw ParseError("config: omega_rad_s must be > 0");
  if (j.contains("n_truths")) cfg.n_truths = j.at("n_truths").get<std::size_t>();
  if (j.contains("n_trials")) cfg.n_trials = j.at("n_trials").get<std::size_t>();
  if (cfg.n_truths < 1 || cfg.n_trials < 1) throw ParseError("config: counts must be >= 1");
  if (j.contains("sweep_grid")) {
    for (const auto& v : j.at("sweep_grid")) cfg.sweep_grid.push_back(v.get<double>());
  }
  if (j.contains("units")) {
    const std::string units = j.at("units").get<std::string>();
    if (units == "deg") {
      cfg.degrees = true;
    } else if (units != "rad") {
      throw ParseError("config: units must be 'rad' or 'deg'");
    }
  }
  if (j.contains("seed")) cfg.sim.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  return json{{"sim", sim_config_to_json(cfg.sim)},
              {"solver",
               {{"tolerance", cfg.solver.tolerance},
                {"max_iterations", cfg.solver.max_iterations},
                {"condition_bound", cfg.solver.condition_bound}}},
              {"segmentation",
               {{"motion_threshold_frac", cfg.segmentation.motion_threshold_frac},
                {"min_duration_frac", cfg.segmentation.min_duration_frac},
                {"smoothing_window_s", cfg.segmentation.smoothing_window_s}}},
              {"omega_rad_s", cfg.omega},
              {"n_truths", cfg.n_truths},
              {"n_trials", cfg.n_trials},
              {"sweep_grid", cfg.sweep_grid},
              {"units", cfg.degrees ? "deg" : "rad"}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config: " + std::string(e.what()));
  }
  return run_config_from_json(j);
}

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gyrocal::io
