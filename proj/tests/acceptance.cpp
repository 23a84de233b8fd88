// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// numbers next to the required thresholds. The exit code is the number of
// failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "gyrocal/errors.hpp"
#include "gyrocal/estimator.hpp"
#include "gyrocal/evaluation.hpp"
#include "gyrocal/io.hpp"
#include "gyrocal/model.hpp"
#include "gyrocal/protocol.hpp"
#include "gyrocal/simulator.hpp"

using namespace gyrocal;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s — %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text) {
  std::printf("       note: %s\n", text.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

constexpr std::uint64_t kSeed = 20240817;

CalibrationParams make_params(std::array<double, 3> k, std::array<double, 3> b) {
  CalibrationParams p;
  p.scale = {k[0], k[1], k[2]};
  p.bias = {b[0], b[1], b[2]};
  return p;
}

// The three scripted convergence-study sensors: high gains, high biases, both.
const std::array<CalibrationParams, 3> kStudyRegimes = {
    make_params({1.9074, 1.9529, 1.5635}, {0.0827, 0.0265, -0.0805}),
    make_params({1.0979, 1.1052, 0.9851}, {-0.1046, 0.1995, 0.1565}),
    make_params({1.5044, 1.6494, 1.5282}, {0.1483, -0.1282, 0.1794}),
};
// Published converged estimate for the first regime under study noise.
const CalibrationParams kRegime1Converged =
    make_params({1.9071, 1.9539, 1.5640}, {0.0822, 0.0243, -0.0797});

// Criterion 1: noiseless six-observation runs identify any normal-range
// sensor to 1e-9, a thousand times, in under five seconds.
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  SimConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.speed_jitter_frac = 0.0;
  cfg.misalignment_max = 0.0;
  cfg.seed = kSeed;
  SolverConfig tight;
  tight.tolerance = 1e-12;
  const Protocol protocol = g_optimal_protocol(1.0, cfg.sample_rate);

  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    RngStream rng(cfg.seed, 1, i);
    const CalibrationParams truth = draw_truth(cfg, rng);
    const ProtocolRun run = simulate_protocol_run(truth, protocol, cfg, rng);
    const EstimationResult est = solve_ils(run.observations, tight);
    for (int j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(est.params.scale[j] - truth.scale[j]));
      worst = std::max(worst, std::abs(est.params.bias[j] - truth.bias[j]));
    }
  }
  const double elapsed = seconds_since(start);
  report(1, "exact identifiability (noiseless, 1000 sensors)",
         worst < 1e-9 && elapsed < 5.0,
         "max parameter error " + fmt(worst) + " (require < 1e-9), runtime " + fmt(elapsed) +
             " s (require < 5)");
}

// Criterion 2: iteration counts and estimate reproduction for the scripted
// regimes under study noise at 1 rad/s.
void criterion_2() {
  SimConfig cfg;
  cfg.seed = kSeed + 2;
  const Protocol protocol = g_optimal_protocol(1.0, cfg.sample_rate);

  std::size_t within_three = 0, total = 0;
  int max_iterations_seen = 0;
  std::array<std::vector<double>, 6> regime1_estimates;
  for (std::size_t regime = 0; regime < kStudyRegimes.size(); ++regime) {
    for (int trial = 0; trial < 1000; ++trial) {
      RngStream rng(cfg.seed, regime + 1, trial);
      const ProtocolRun run = simulate_protocol_run(kStudyRegimes[regime], protocol, cfg, rng);
      try {
        const EstimationResult est = solve_ils(run.observations);
        ++total;
        if (est.iterations <= 3) ++within_three;
        max_iterations_seen = std::max(max_iterations_seen, est.iterations);
        if (regime == 0) {
          for (int p = 0; p < 3; ++p) {
            regime1_estimates[p].push_back(est.params.scale[p]);
            regime1_estimates[p + 3].push_back(est.params.bias[p]);
          }
        }
      } catch (const Error&) {
        ++total;
      }
    }
  }
  const double frac = static_cast<double>(within_three) / static_cast<double>(total);

  double worst_delta = 0.0;
  for (int p = 0; p < 6; ++p) {
    auto& v = regime1_estimates[p];
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    const double median = v[v.size() / 2];
    const double want = p < 3 ? kRegime1Converged.scale[p] : kRegime1Converged.bias[p - 3];
    worst_delta = std::max(worst_delta, std::abs(median - want));
  }

  const bool pass = frac >= 0.99 && worst_delta <= 5e-3;
  report(2, "solver convergence count and estimate reproduction", pass,
         fmt(100.0 * frac) + "% of trials took <= 3 solves (require >= 99%), max solves " +
             std::to_string(max_iterations_seen) + "; regime-1 median estimates within " +
             fmt(worst_delta) + " of the reference row (require <= 5e-3)");
  if (frac < 0.99) {
    note("the beta0 fixed-point contraction rate at 1 rad/s is beta0 itself (0.04-0.17 for "
         "these sensors), so reaching the 1e-6 stopping sum takes 7-12 solves; at 3 rad/s "
         "the same sensors settle at the published rows by solve 2-3");
  }
}

struct BandCheck {
  double in_band_frac;
  double band;
};

BandCheck scale_band(const std::vector<TrialRecord>& records, double band) {
  std::size_t in = 0, n = 0;
  for (const auto& rec : records) {
    for (int p = 0; p < 3; ++p) {
      if (std::abs(rec.error(p)) <= band) ++in;
      ++n;
    }
  }
  return {static_cast<double>(in) / static_cast<double>(n), band};
}

BandCheck bias_band(const std::vector<TrialRecord>& records, double band) {
  std::size_t in = 0, n = 0;
  for (const auto& rec : records) {
    for (int p = 3; p < 6; ++p) {
      if (std::abs(rec.error(p)) <= band) ++in;
      ++n;
    }
  }
  return {static_cast<double>(in) / static_cast<double>(n), band};
}

// Criterion 3: desk-scale error bands at both study noise levels.
void criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  SimConfig cfg;
  cfg.seed = kSeed + 3;

  cfg.noise_sigma = 0.035;
  const CampaignResult low = run_campaign(cfg, 10, 200, 1.0);
  cfg.noise_sigma = 0.2;
  const CampaignResult high = run_campaign(cfg, 10, 200, 1.0);
  const double elapsed = seconds_since(start);

  const BandCheck k_low = scale_band(low.records, 9.3e-4);
  const BandCheck k_high = scale_band(high.records, 5.4e-3);
  const BandCheck b_low = bias_band(low.records, 3.0e-3);
  const BandCheck b_high = bias_band(high.records, 1.7e-2);

  const bool pass = k_low.in_band_frac >= 0.9 && k_high.in_band_frac >= 0.9 &&
                    b_low.in_band_frac >= 0.9 && b_high.in_band_frac >= 0.9 && elapsed < 120.0;
  report(3, "error bands, normal sensors (10 truths x 200 trials)", pass,
         "scale errors in band: " + fmt(100 * k_low.in_band_frac) + "% @ sigma 0.035, " +
             fmt(100 * k_high.in_band_frac) + "% @ sigma 0.2; bias errors in band: " +
             fmt(100 * b_low.in_band_frac) + "% / " + fmt(100 * b_high.in_band_frac) +
             "% (require >= 90% each); runtime " + fmt(elapsed) + " s (require < 120)");
  if (k_low.in_band_frac < 0.9) {
    note("the six-observation design propagates the per-revolution mean noise "
         "(sigma/sqrt(N) = 9.9e-4 at 200 Hz, 1 rev, 1 rad/s) into scale errors with factor "
         "~0.7*k^2, so the 9.3e-4 band can hold ~80% of errors at best, not 90%");
  }
}

// Criterion 4: error bands for poor-quality sensors.
void criterion_4() {
  SimConfig cfg = SimConfig::extreme();
  cfg.seed = kSeed + 4;

  auto pooled_band = [](const std::vector<TrialRecord>& records, double band) {
    std::size_t in = 0, n = 0;
    for (const auto& rec : records) {
      for (int p = 0; p < 6; ++p) {
        if (std::abs(rec.error(p)) <= band) ++in;
        ++n;
      }
    }
    return static_cast<double>(in) / static_cast<double>(n);
  };

  cfg.noise_sigma = 0.035;
  const double low = pooled_band(run_campaign(cfg, 10, 200, 1.0).records, 3e-3);
  cfg.noise_sigma = 0.2;
  const double high = pooled_band(run_campaign(cfg, 10, 200, 1.0).records, 1.8e-2);

  report(4, "error bands, poor-quality sensors", low >= 0.9 && high >= 0.9,
         fmt(100 * low) + "% of errors within 3e-3 @ sigma 0.035, " + fmt(100 * high) +
             "% within 1.8e-2 @ sigma 0.2 (require >= 90% each)");
}

// Criterion 5: speed-sweep shape at both noise levels.
void criterion_5() {
  const std::vector<double> grid = default_sweep_grid();
  SimConfig cfg;
  cfg.seed = kSeed + 5;

  auto curve = [&](double sigma) {
    SimConfig c = cfg;
    c.noise_sigma = sigma;
    std::vector<double> k_mse, b_mse;
    for (double omega : grid) {
      const MonteCarloReport rep = run_campaign(c, 5, 100, omega).report;
      k_mse.push_back((rep.mse[0] + rep.mse[1] + rep.mse[2]) / 3.0);
      b_mse.push_back((rep.mse[3] + rep.mse[4] + rep.mse[5]) / 3.0);
    }
    return std::make_pair(k_mse, b_mse);
  };

  const auto [k_low, b_low] = curve(0.035);
  const auto [k_high, b_high] = curve(0.2);

  const std::size_t i03 = 0;   // omega = 0.3
  const std::size_t i10 = 7;   // omega = 1.0
  const double drop_ratio = k_low[i03] / k_low[i10];

  double plateau_mean = 0.0;
  for (std::size_t i = i10; i < grid.size(); ++i) plateau_mean += k_low[i];
  plateau_mean /= static_cast<double>(grid.size() - i10);
  double plateau_dev = 0.0;
  for (std::size_t i = i10; i < grid.size(); ++i) {
    plateau_dev = std::max(plateau_dev,
                           std::max(k_low[i] / plateau_mean, plateau_mean / k_low[i]));
  }

  const double bias_ratio = *std::max_element(b_low.begin(), b_low.end()) /
                            *std::min_element(b_low.begin(), b_low.end());

  bool noisier_above = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (k_high[i] < k_low[i]) noisier_above = false;
  }

  const bool pass =
      drop_ratio >= 5.0 && plateau_dev < 2.0 && bias_ratio < 3.0 && noisier_above;
  report(5, "speed-sweep shape (0.3..3.0 rad/s)", pass,
         "scale MSE drop 0.3->1.0: " + fmt(drop_ratio) + "x (require >= 5x); plateau variation " +
             fmt(plateau_dev) + "x (require < 2x); bias MSE max/min " + fmt(bias_ratio) +
             "x (require < 3x); high-noise curve point-wise above: " +
             (noisier_above ? "yes" : "no"));
  if (drop_ratio < 5.0 || bias_ratio >= 3.0) {
    note("with one revolution per observation the averaging window shrinks as speed grows "
         "(N = 2*pi*rate/omega), so scale MSE falls only ~1/omega (3.3x from 0.3 to 1.0) and "
         "bias MSE grows ~omega (10x across the grid); the published flat-bias curve "
         "implies a fixed averaging duration, which the one-revolution protocol cannot give");
  }
}

// Criterion 6: the two solvers agree parameter-wise on shared data.
void criterion_6() {
  SimConfig cfg;
  cfg.seed = kSeed + 6;
  const Protocol protocol = g_optimal_protocol(1.0, cfg.sample_rate);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    RngStream truth_rng(cfg.seed, 60, i);
    const CalibrationParams truth = draw_truth(cfg, truth_rng);
    RngStream rng(cfg.seed, 61, i);
    const ProtocolRun run = simulate_protocol_run(truth, protocol, cfg, rng);
    const EstimationResult a = solve_ils(run.observations);
    const EstimationResult b = solve_lm(run.observations);
    for (int j = 0; j < 3; ++j) {
      worst = std::max(worst, std::abs(a.params.scale[j] - b.params.scale[j]));
      worst = std::max(worst, std::abs(a.params.bias[j] - b.params.bias[j]));
    }
  }
  report(6, "iterative and Levenberg-Marquardt solvers agree", worst < 1e-6,
         "max per-parameter difference over 100 shared datasets: " + fmt(worst) +
             " (require < 1e-6)");
}

// Criterion 7: unbiasedness of the campaign error medians.
void criterion_7() {
  SimConfig cfg;
  cfg.seed = kSeed + 7;
  const CampaignResult campaign = run_campaign(cfg, 30, 500, 1.0);

  double worst_frac_of_sd = 0.0, worst_z = 0.0;
  for (int p = 0; p < 6; ++p) {
    std::vector<double> errs;
    errs.reserve(campaign.records.size());
    for (const auto& rec : campaign.records) errs.push_back(rec.error(p));
    std::sort(errs.begin(), errs.end());
    const double median = errs[errs.size() / 2];
    double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    var /= static_cast<double>(errs.size() - 1);
    const double sd = std::sqrt(var);
    const double se_median = 1.2533 * sd / std::sqrt(static_cast<double>(errs.size()));
    worst_frac_of_sd = std::max(worst_frac_of_sd, std::abs(median) / sd);
    worst_z = std::max(worst_z, std::abs(median) / se_median);
  }
  report(7, "unbiasedness (median error vs Monte-Carlo noise)", worst_frac_of_sd <= 1.0,
         "max |median| = " + fmt(worst_frac_of_sd) + " of the per-trial error sd (require <= 1); "
             "informational: max |median|/SE(median) = " + fmt(worst_z));
}

// Criterion 8: sine-wave tracking improves at least tenfold after calibration.
void criterion_8() {
  const CalibrationParams truth =
      make_params({0.9070, 1.0501, 0.8734}, {0.0528, 0.0813, -0.0992});

  // Calibrate from one noisy protocol run at defaults.
  SimConfig cfg;
  cfg.seed = kSeed + 8;
  RngStream rng(cfg.seed);
  const Protocol protocol = g_optimal_protocol(1.0, cfg.sample_rate);
  const ProtocolRun run = simulate_protocol_run(truth, protocol, cfg, rng);
  const EstimationResult est = solve_ils(run.observations);

  // Tracking error is evaluated without measurement noise: the comparison
  // isolates what calibration can correct.
  SimConfig track = cfg;
  track.noise_sigma = 0.0;
  RngStream track_rng(cfg.seed + 1);
  const auto series =
      simulate_sine_tracking(truth, est.params, 1.0, 0.75, 8.0, track, track_rng);

  double worst_ratio = 0.0;
  for (int j = 0; j < 3; ++j) {
    double before = 0.0, after = 0.0;
    for (const auto& s : series) {
      before += (s.raw[j] - s.actual[j]) * (s.raw[j] - s.actual[j]);
      after += (s.calibrated[j] - s.actual[j]) * (s.calibrated[j] - s.actual[j]);
    }
    worst_ratio = std::max(worst_ratio, std::sqrt(after / before));
  }
  report(8, "sine-tracking error after calibration", worst_ratio <= 0.10,
         "worst per-axis RMS(after)/RMS(before) = " + fmt(worst_ratio) + " (require <= 0.10)");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GYROCAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Criterion 9: hardware-style study replayed in simulation; before/after
// improvement plus cross-solver report comparison through the CLI.
void criterion_9() {
  const CalibrationParams truth = make_params({1.18, 1.16, 1.14}, {0.008, -0.010, -0.004});
  const double omega = io::deg_to_rad(60.0);

  SimConfig cfg;
  cfg.seed = kSeed + 9;
  RngStream rng(cfg.seed);
  const Protocol protocol = g_optimal_protocol(omega, cfg.sample_rate);
  const ProtocolRun run = simulate_protocol_run(truth, protocol, cfg, rng);

  const fs::path dir = fs::temp_directory_path() / "gyrocal_acceptance";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "log.csv", std::ios::binary);
    io::write_sample_log(out, {run.log, run.labels});
  }

  bool cli_ok = run_cli("calibrate --solver ils " + (dir / "log.csv").string() + " --out " +
                        (dir / "ils.json").string()) == 0;
  cli_ok = cli_ok && run_cli("calibrate --solver lm " + (dir / "log.csv").string() + " --out " +
                             (dir / "lm.json").string()) == 0;
  cli_ok = cli_ok && run_cli("compare " + (dir / "ils.json").string() + " " +
                             (dir / "lm.json").string() + " --out " +
                             (dir / "diff.json").string()) == 0;
  std::size_t flag_count = 99;
  CalibrationParams estimate;
  if (cli_ok) {
    const json diff = json::parse(slurp(dir / "diff.json"));
    flag_count = diff.at("flags").size();
    estimate = io::params_from_report(json::parse(slurp(dir / "ils.json")));
  }

  // Noise-free replay of the same motion to isolate the calibration error.
  SimConfig clean = cfg;
  clean.noise_sigma = 0.0;
  RngStream replay_rng(cfg.seed + 1);
  const ProtocolRun replay = simulate_protocol_run(truth, protocol, clean, replay_rng);
  std::vector<Vec3> actual, raw, calibrated;
  for (const auto& seg : replay.segmented.segments) {
    for (const auto& s : seg.samples) {
      raw.push_back(s.m);
      actual.push_back(apply_calibration(truth, s.m));
      calibrated.push_back(apply_calibration(estimate, s.m));
    }
  }
  const BeforeAfter metrics = before_after_metrics(actual, raw, calibrated);
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 3; ++j) {
    min_ratio = std::min(min_ratio, metrics.before[j] / metrics.after[j]);
  }

  fs::remove_all(dir);
  report(9, "hardware-style study in simulation", cli_ok && min_ratio >= 10.0 && flag_count == 0,
         "per-axis before/after MSE ratio >= " + fmt(min_ratio) +
             " (require >= 10); cross-solver compare flags: " + std::to_string(flag_count) +
             " (require 0)");
}

// Criterion 10: byte-identical outputs when a command reruns with the same
// configuration and seed.
void criterion_10() {
  const fs::path dir = fs::temp_directory_path() / "gyrocal_acceptance_det";
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"n_truths": 2, "n_trials": 5, "omega_rad_s": 1.0, "sweep_grid": [0.5, 1.0], "seed": 77})";
  }

  bool ok = true;
  for (const char* tag : {"a", "b"}) {
    ok = ok && run_cli("simulate --seed 77 --out " + (dir / (std::string("sim_") + tag + ".csv")).string()) == 0;
    ok = ok && run_cli("montecarlo --config " + (dir / "cfg.json").string() + " --out " +
                       (dir / (std::string("mc_") + tag + ".json")).string()) == 0;
    ok = ok && run_cli("sweep --config " + (dir / "cfg.json").string() +
                       " --out " + (dir / (std::string("sweep_") + tag + ".json")).string()) == 0;
  }
  const bool identical = ok && slurp(dir / "sim_a.csv") == slurp(dir / "sim_b.csv") &&
                         slurp(dir / "mc_a.json") == slurp(dir / "mc_b.json") &&
                         slurp(dir / "sweep_a.json") == slurp(dir / "sweep_b.json");
  fs::remove_all(dir);
  report(10, "determinism of seeded commands", identical,
         identical ? "simulate, montecarlo, and sweep reruns are byte-identical"
                   : "rerun outputs differ or a command failed");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria failed\n", g_failures);
  }
  return g_failures;
}
