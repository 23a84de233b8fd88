#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gyrocal/estimator.hpp"
#include "gyrocal/evaluation.hpp"
#include "gyrocal/protocol.hpp"
#include "gyrocal/simulator.hpp"

namespace gyrocal::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSampleLogHeader = "obs_id,t,mx,my,mz";

// Degrees<->radians conversion applied only at file and flag boundaries.
double deg_to_rad(double deg);
double rad_to_deg(double rad);

// ---- Sample logs -----------------------------------------------------------
// CSV with the exact header `obs_id,t,mx,my,mz`: obs_id is the protocol step
// index (-1 for dwell samples), t is seconds, rates are rad/s. Values are
// written with 17 significant digits so a round trip is lossless.

struct SampleLog {
  std::vector<GyroSample> samples;
  std::vector<int> labels;  // parallel to samples

  bool labeled() const {
    for (int l : labels) {
      if (l >= 0) return true;
    }
    return false;
  }
};

void write_sample_log(std::ostream& out, const SampleLog& log, bool degrees = false);
SampleLog read_sample_log(std::istream& in, bool degrees = false);

// ---- Protocol sidecar ------------------------------------------------------
// JSON description of the commanded rotations, one entry per obs_id.

json protocol_to_json(const Protocol& protocol);
Protocol protocol_from_json(const json& j);

// ---- Calibration report ----------------------------------------------------

struct ReportMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string tool_version = kToolVersion;
};

json calibration_report(const EstimationResult& result, const ObservationSet& obs,
                        const ReportMeta& meta);

// Parses the params/beta blocks of a report back into library types.
CalibrationParams params_from_report(const json& report);

// ---- Campaign / sweep reports ----------------------------------------------

json montecarlo_report_to_json(const MonteCarloReport& report, const ReportMeta& meta);
json sweep_report_to_json(const SweepReport& report, const ReportMeta& meta);

// Plot-ready long format: one row per trial per parameter.
void write_trial_errors_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                            double omega);

// ---- Run configuration ------------------------------------------------------
// Strict parser: unknown keys anywhere are an error, values are validated
// against the library invariants.

struct RunConfig {
  SimConfig sim;
  SolverConfig solver;
  SegmentationConfig segmentation;
  double omega = 1.0;  // rad/s, protocol speed
  std::size_t n_truths = 30;
  std::size_t n_trials = 500;
  std::vector<double> sweep_grid;  // empty = default grid
  bool degrees = false;
};

RunConfig run_config_from_json(const json& j);
json run_config_to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

// FNV-1a hash of the canonical config serialization, as fixed-width hex.
std::string config_hash(const json& config);

}  // namespace gyrocal::io
