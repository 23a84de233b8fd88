#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gyrocal/estimator.hpp"
#include "gyrocal/simulator.hpp"

namespace gyrocal {

// Parameter indexing used throughout the reports: 0..2 scale factors, 3..5
// biases.
inline constexpr std::array<const char*, 6> kParameterNames = {
    "kx", "ky", "kz", "bx", "by", "bz"};

struct TrialRecord {
  CalibrationParams truth;
  CalibrationParams estimate;
  int iterations = 0;
  bool converged = false;
  Solver solver = Solver::ILS;

  double error(int p) const {
    return p < 3 ? estimate.scale[p] - truth.scale[p] : estimate.bias[p - 3] - truth.bias[p - 3];
  }
};

struct Quantiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Per-parameter error statistics over a campaign.
struct MonteCarloReport {
  std::array<Quantiles, 6> error_quantiles{};
  std::array<double, 6> mse{};
  std::size_t trials = 0;
  std::size_t non_converged = 0;
  std::vector<std::size_t> iteration_histogram;  // index = iteration count
  SimConfig config;
  double omega = 1.0;
  Solver solver = Solver::ILS;
};

struct CampaignResult {
  std::vector<TrialRecord> records;  // converged trials only
  MonteCarloReport report;
};

// Repeated synthetic calibrations: n_truths ground-truth sensors, each
// calibrated n_trials times with fresh noise. Solver failures are counted as
// non-converged trials; they do not abort the campaign. Trials run in
// parallel; every trial derives its own random stream from
// (cfg.seed, truth index, trial index), so results do not depend on
// scheduling.
CampaignResult run_campaign(const SimConfig& cfg, std::size_t n_truths, std::size_t n_trials,
                            double omega, Solver solver = Solver::ILS,
                            const SolverConfig& solver_cfg = {});

// Per-parameter mean squared error over converged records.
std::array<double, 6> mse(const std::vector<TrialRecord>& records);

// Aggregates records into a report (quantiles, MSE, iteration histogram).
MonteCarloReport make_report(const std::vector<TrialRecord>& records, const SimConfig& cfg,
                             double omega, Solver solver, std::size_t non_converged);

struct SweepReport {
  std::vector<double> grid;  // rad/s, strictly increasing
  std::vector<MonteCarloReport> reports;
};

// run_campaign at every grid speed.
SweepReport speed_sweep(const SimConfig& cfg, const std::vector<double>& grid,
                        std::size_t n_truths, std::size_t n_trials,
                        Solver solver = Solver::ILS);

// Default sweep grid, 0.3 to 3.0 rad/s in 0.1 steps.
std::vector<double> default_sweep_grid();

// Convergence behaviour of the iterative solver on one scripted case.
struct ConvergenceCase {
  CalibrationParams truth;
  SimConfig config;
  double omega = 1.0;
};
struct ConvergenceRow {
  CalibrationParams truth;
  std::vector<CalibrationParams> iterates;  // parameter estimate after each solve
  int iterations = 0;
  bool converged = false;
};
std::vector<ConvergenceRow> convergence_study(const std::vector<ConvergenceCase>& cases,
                                              const SolverConfig& solver_cfg = {});

// Per-axis mean squared error of raw and calibrated series against the truth.
struct BeforeAfter {
  std::array<double, 3> before{};  // raw vs actual
  std::array<double, 3> after{};   // calibrated vs actual
};
BeforeAfter before_after_metrics(const std::vector<Vec3>& actual,
                                 const std::vector<Vec3>& raw,
                                 const std::vector<Vec3>& calibrated);

}  // namespace gyrocal
