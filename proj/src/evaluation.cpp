#include "gyrocal/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "gyrocal/errors.hpp"

namespace gyrocal {

namespace {

// Runs fn(i) for i in [0, count) across hardware threads. Work items are
// independent; results must be written to disjoint slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

Quantiles quantiles_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    if (values.empty()) return 0.0;
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  Quantiles q;
  q.min = values.empty() ? 0.0 : values.front();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.max = values.empty() ? 0.0 : values.back();
  return q;
}

}  // namespace

std::array<double, 6> mse(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw Error("mse: no records");
  std::array<double, 6> out{};
  for (const auto& rec : records) {
    if (!rec.converged) throw Error("mse: non-converged record in input");
    for (int p = 0; p < 6; ++p) {
      const double e = rec.error(p);
      out[p] += e * e;
    }
  }
  for (auto& v : out) v /= static_cast<double>(records.size());
  return out;
}

MonteCarloReport make_report(const std::vector<TrialRecord>& records, const SimConfig& cfg,
                             double omega, Solver solver, std::size_t non_converged) {
  MonteCarloReport report;
  report.config = cfg;
  report.omega = omega;
  report.solver = solver;
  report.trials = records.size() + non_converged;
  report.non_converged = non_converged;
  if (!records.empty()) {
    report.mse = mse(records);
    for (int p = 0; p < 6; ++p) {
      std::vector<double> errs;
      errs.reserve(records.size());
      for (const auto& rec : records) errs.push_back(rec.error(p));
      report.error_quantiles[p] = quantiles_of(std::move(errs));
    }
    for (const auto& rec : records) {
      if (static_cast<std::size_t>(rec.iterations) >= report.iteration_histogram.size()) {
        report.iteration_histogram.resize(rec.iterations + 1, 0);
      }
      ++report.iteration_histogram[rec.iterations];
    }
  }
  return report;
}

CampaignResult run_campaign(const SimConfig& cfg, std::size_t n_truths, std::size_t n_trials,
                            double omega, Solver solver, const SolverConfig& solver_cfg) {
  if (n_truths == 0 || n_trials == 0) throw Error("run_campaign: counts must be >= 1");
  if (!cfg.valid()) throw Error("run_campaign: invalid simulation config");

  std::vector<CalibrationParams> truths(n_truths);
  for (std::size_t t = 0; t < n_truths; ++t) {
    RngStream truth_rng(mix_seed(cfg.seed, 0x7472757468ULL, t));  // truth-draw stream
    truths[t] = draw_truth(cfg, truth_rng);
  }

  Protocol protocol = g_optimal_protocol(omega, cfg.sample_rate);
  for (auto& step : protocol.steps) step.dwell_after = 0.0;  // dwells add no observations
  const std::size_t total = n_truths * n_trials;
  struct Slot {
    TrialRecord record;
    bool ok = false;
  };
  std::vector<Slot> slots(total);

  parallel_for(total, [&](std::size_t i) {
    const std::size_t truth_index = i / n_trials;
    const std::size_t trial_index = i % n_trials;
    RngStream rng(cfg.seed, truth_index + 1, trial_index + 1);
    TrialRecord rec;
    rec.truth = truths[truth_index];
    rec.solver = solver;
    try {
      const ProtocolRun run = simulate_protocol_run(rec.truth, protocol, cfg, rng);
      const EstimationResult est = solve(solver, run.observations, solver_cfg);
      rec.estimate = est.params;
      rec.iterations = est.iterations;
      rec.converged = est.converged;
      slots[i].ok = true;
    } catch (const Error&) {
      rec.converged = false;
      slots[i].ok = false;
    }
    slots[i].record = rec;
  });

  CampaignResult result;
  std::size_t non_converged = 0;
  for (const auto& slot : slots) {
    if (slot.ok) {
      result.records.push_back(slot.record);
    } else {
      ++non_converged;
    }
  }
  result.report = make_report(result.records, cfg, omega, solver, non_converged);
  return result;
}

std::vector<double> default_sweep_grid() {
  std::vector<double> grid;
  for (int i = 3; i <= 30; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

SweepReport speed_sweep(const SimConfig& cfg, const std::vector<double>& grid,
                        std::size_t n_truths, std::size_t n_trials, Solver solver) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) throw Error("speed_sweep: grid must be strictly increasing");
  }
  SweepReport report;
  report.grid = grid;
  for (double omega : grid) {
    if (!(omega > 0.0)) throw Error("speed_sweep: speeds must be positive");
    report.reports.push_back(run_campaign(cfg, n_truths, n_trials, omega, solver).report);
  }
  return report;
}

std::vector<ConvergenceRow> convergence_study(const std::vector<ConvergenceCase>& cases,
                                              const SolverConfig& solver_cfg) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c];
    RngStream rng(cs.config.seed, 0xc0117ULL, c);
    const Protocol protocol = g_optimal_protocol(cs.omega, cs.config.sample_rate);
    const ProtocolRun run = simulate_protocol_run(cs.truth, protocol, cs.config, rng);

    ConvergenceRow row;
    row.truth = cs.truth;
    std::vector<BetaVector> trace;
    try {
      const EstimationResult est = solve_ils_traced(run.observations, solver_cfg, trace);
      row.iterations = est.iterations;
      row.converged = est.converged;
    } catch (const Error&) {
      row.converged = false;
      row.iterations = static_cast<int>(trace.size());
    }
    for (const auto& beta : trace) {
      try {
        row.iterates.push_back(beta_to_params(beta));
      } catch (const UnphysicalEstimateError&) {
        break;  // iterate left the physical region; stop the table here
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

BeforeAfter before_after_metrics(const std::vector<Vec3>& actual,
                                 const std::vector<Vec3>& raw,
                                 const std::vector<Vec3>& calibrated) {
  if (actual.size() != raw.size() || actual.size() != calibrated.size() || actual.empty()) {
    throw Error("before_after_metrics: series must be non-empty and equal length");
  }
  BeforeAfter out;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    for (int j = 0; j < 3; ++j) {
      const double eb = raw[i][j] - actual[i][j];
      const double ea = calibrated[i][j] - actual[i][j];
      out.before[j] += eb * eb;
      out.after[j] += ea * ea;
    }
  }
  for (int j = 0; j < 3; ++j) {
    out.before[j] /= static_cast<double>(actual.size());
    out.after[j] /= static_cast<double>(actual.size());
  }
  return out;
}

}  // namespace gyrocal
