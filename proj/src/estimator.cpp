#include "gyrocal/estimator.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "gyrocal/errors.hpp"

namespace gyrocal {

namespace {

Eigen::MatrixXd to_eigen(const DesignMatrix& design) {
  Eigen::MatrixXd X(design.rows.size(), 6);
  for (std::size_t i = 0; i < design.rows.size(); ++i) {
    for (int j = 0; j < 6; ++j) X(i, j) = design.rows[i][j];
  }
  return X;
}

double predict(const BetaVector& beta, const Observation& o, double beta0) {
  double y = beta0;
  for (int j = 0; j < 3; ++j) {
    const double m = o.mean(j);
    y += beta.coeff[j] * m * m + beta.coeff[j + 3] * m;
  }
  return y;
}

double gamma_update(const Eigen::VectorXd& beta) {
  for (int j = 0; j < 3; ++j) {
    if (!(beta[j] > 0.0)) {
      throw UnphysicalEstimateError(
          "solve_ils: non-positive squared gain while updating the intercept");
    }
  }
  return beta[3] * beta[3] / (4.0 * beta[0]) + beta[4] * beta[4] / (4.0 * beta[1]) +
         beta[5] * beta[5] / (4.0 * beta[2]);
}

BetaVector to_beta_vector(const Eigen::VectorXd& v) {
  BetaVector beta;
  for (int j = 0; j < 6; ++j) beta.coeff[j] = v[j];
  beta.beta0 = beta.consistent_beta0();
  return beta;
}

}  // namespace

DesignMatrix build_design_matrix(const ObservationSet& obs, double condition_bound) {
  if (obs.size() < kMinObservations) {
    throw SingularDesignError("build_design_matrix: need at least 6 observations, got " +
                              std::to_string(obs.size()));
  }
  DesignMatrix design;
  design.rows.reserve(obs.size());
  design.response.reserve(obs.size());
  for (const auto& o : obs.rows) {
    const double mx = o.mean_mx, my = o.mean_my, mz = o.mean_mz;
    design.rows.push_back({mx * mx, my * my, mz * mz, mx, my, mz});
    design.response.push_back(o.response_y);
  }

  const Eigen::MatrixXd X = to_eigen(design);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 0.0) || smax / smin > condition_bound) {
    throw SingularDesignError("build_design_matrix: design matrix is singular or "
                              "ill-conditioned (condition number above bound)");
  }
  return design;
}

double cost(const BetaVector& beta, const ObservationSet& obs) {
  const double beta0 = beta.consistent_beta0();
  double j = 0.0;
  for (const auto& o : obs.rows) j += std::abs(predict(beta, o, beta0) - o.response_y);
  return j;
}

double cost_squared(const BetaVector& beta, const ObservationSet& obs) {
  const double beta0 = beta.consistent_beta0();
  double j = 0.0;
  for (const auto& o : obs.rows) {
    const double r = predict(beta, o, beta0) - o.response_y;
    j += r * r;
  }
  return j;
}

EstimationResult solve_ils_traced(const ObservationSet& obs, const SolverConfig& cfg,
                                  std::vector<BetaVector>& trace) {
  const DesignMatrix design = build_design_matrix(obs, cfg.condition_bound);
  const Eigen::MatrixXd X = to_eigen(design);
  const Eigen::VectorXd Y =
      Eigen::Map<const Eigen::VectorXd>(design.response.data(), design.response.size());
  const auto qr = X.colPivHouseholderQr();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(Y.size());

  // Initial estimate ignores the intercept entirely.
  Eigen::VectorXd beta = qr.solve(Y);
  trace.clear();
  trace.push_back(to_beta_vector(beta));

  EstimationResult result;
  result.iterations = 1;
  while (result.iterations < cfg.max_iterations) {
    const double gamma = gamma_update(beta);
    const Eigen::VectorXd next = qr.solve(Y - gamma * ones);
    ++result.iterations;
    trace.push_back(to_beta_vector(next));
    const double change = (next - beta).cwiseAbs().sum();
    beta = next;
    if (change <= cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    throw NonConvergenceError("solve_ils: no fixed point within " +
                              std::to_string(cfg.max_iterations) + " iterations");
  }

  result.beta = to_beta_vector(beta);
  result.params = beta_to_params(result.beta);
  result.final_cost = cost(result.beta, obs);
  return result;
}

EstimationResult solve_ils(const ObservationSet& obs, const SolverConfig& cfg) {
  std::vector<BetaVector> trace;
  return solve_ils_traced(obs, cfg, trace);
}

EstimationResult solve_lm(const ObservationSet& obs, const SolverConfig& cfg) {
  const DesignMatrix design = build_design_matrix(obs, cfg.condition_bound);
  const std::size_t n = design.rows.size();

  // Parameters ordered [kx, ky, kz, bx, by, bz], identity start.
  Eigen::VectorXd theta(6);
  theta << 1.0, 1.0, 1.0, 0.0, 0.0, 0.0;

  auto residuals = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = design.rows[i];
      double y = 0.0;
      for (int j = 0; j < 3; ++j) {
        const double k = p[j], b = p[j + 3];
        const double msq = row[j], m = row[j + 3];
        y += k * k * (msq + 2.0 * b * m + b * b);
        if (jac) {
          (*jac)(i, j) = 2.0 * k * (msq + 2.0 * b * m + b * b);
          (*jac)(i, j + 3) = 2.0 * k * k * (m + b);
        }
      }
      r[i] = y - design.response[i];
    }
  };

  Eigen::VectorXd r(n);
  Eigen::MatrixXd jac(n, 6);
  residuals(theta, r, &jac);
  double sq = r.squaredNorm();

  double lambda = 1e-3;
  EstimationResult result;
  int evals = 0;
  // Stopping is much tighter than the cross-solver agreement tolerance so the
  // two solvers land on the same optimum to well below 1e-6 per parameter.
  const double step_tol = 1e-11;
  while (evals < cfg.max_iterations * 10) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    ++evals;

    const Eigen::VectorXd candidate = theta + step;
    Eigen::VectorXd r_new(n);
    residuals(candidate, r_new, nullptr);
    const double sq_new = r_new.squaredNorm();
    if (sq_new < sq) {
      const double improvement = sq - sq_new;
      theta = candidate;
      r = r_new;
      sq = sq_new;
      lambda = std::max(lambda * 0.3, 1e-12);
      residuals(theta, r, &jac);
      ++result.iterations;
      if (step.cwiseAbs().sum() <= step_tol || improvement <= 1e-14 * sq) {
        result.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {  // stalled: accept the current point as converged
        result.converged = true;
        break;
      }
    }
  }
  if (!result.converged) {
    throw NonConvergenceError("solve_lm: no convergence within the iteration budget");
  }
  for (int j = 0; j < 3; ++j) {
    if (!(theta[j] > 0.0)) {
      throw UnphysicalEstimateError("solve_lm: non-positive scale factor estimate");
    }
  }

  result.params.scale = {theta[0], theta[1], theta[2]};
  result.params.bias = {theta[3], theta[4], theta[5]};
  result.beta = params_to_beta(result.params);
  result.final_cost = cost(result.beta, obs);
  return result;
}

}  // namespace gyrocal
