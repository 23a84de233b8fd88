#pragma once

#include <array>
#include <vector>

#include "gyrocal/model.hpp"
#include "gyrocal/observation.hpp"

namespace gyrocal {

enum class Solver { ILS, LM };

struct SolverConfig {
  double tolerance = 1e-6;        // stop when sum_j |beta_j change| falls below this
  int max_iterations = 100;       // least-squares solves (ILS) or damped steps (LM)
  double condition_bound = 1e12;  // reject designs with condition number above this
};

struct EstimationResult {
  CalibrationParams params;
  BetaVector beta;
  int iterations = 0;      // least-squares solves performed (ILS) / accepted steps (LM)
  double final_cost = 0.0; // sum_i |y_hat_i - y_i| at the solution, (rad/s)^2
  bool converged = false;
};

// Regression design: row i = [mx^2, my^2, mz^2, mx, my, mz] built from the
// per-revolution means, so that column j carries coefficient beta_j. The
// squared columns use the squared means (the mean-of-squares would fold the
// sensor noise variance into the regressors and bias every scale estimate;
// equivalently, the squared mean is the Jensen-gap-corrected mean of squares).
// Rejects rank-deficient designs.
struct DesignMatrix {
  std::vector<std::array<double, 6>> rows;
  std::vector<double> response;
};
DesignMatrix build_design_matrix(const ObservationSet& obs,
                                 double condition_bound = SolverConfig{}.condition_bound);

// Diagnostic cost: sum_i |y_hat_i(beta) - y_i| with beta0 taken from the
// consistency identity. Zero on noiseless data at the true coefficients.
double cost(const BetaVector& beta, const ObservationSet& obs);

// Squared-error objective the solvers minimize: sum_i (y_hat_i - y_i)^2.
double cost_squared(const BetaVector& beta, const ObservationSet& obs);

// Iterative least squares: beta0 starts at zero, then alternates the
// consistency update gamma = beta4^2/(4 beta1) + beta5^2/(4 beta2) +
// beta6^2/(4 beta3) with an ordinary least-squares solve on (X, Y - gamma)
// until the coefficient change falls below the tolerance. `iterations` counts
// least-squares solves, so the initial estimate is iteration 1.
EstimationResult solve_ils(const ObservationSet& obs, const SolverConfig& cfg = {});

// As solve_ils, but records the coefficient vector after every solve.
EstimationResult solve_ils_traced(const ObservationSet& obs, const SolverConfig& cfg,
                                  std::vector<BetaVector>& trace);

// Levenberg-Marquardt over the six physical parameters directly, started from
// the identity sensor. Minimizes the same squared-error objective; used to
// cross-validate the iterative solver.
EstimationResult solve_lm(const ObservationSet& obs, const SolverConfig& cfg = {});

inline EstimationResult solve(Solver solver, const ObservationSet& obs,
                              const SolverConfig& cfg = {}) {
  return solver == Solver::ILS ? solve_ils(obs, cfg) : solve_lm(obs, cfg);
}

}  // namespace gyrocal
