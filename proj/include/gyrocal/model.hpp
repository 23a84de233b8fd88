#pragma once

#include <array>

#include "gyrocal/vec3.hpp"

namespace gyrocal {

// The six physical parameters of the diagonal sensor error model: per-axis
// scale factors (dimensionless, > 0) and biases (rad/s). The model maps a raw
// reading M to the true angular velocity G via G_j = k_j * (m_j + b_j).
struct CalibrationParams {
  Vec3 scale{1.0, 1.0, 1.0};  // k_x, k_y, k_z
  Vec3 bias{0.0, 0.0, 0.0};   // b_x, b_y, b_z, rad/s

  bool valid() const {
    return scale.x > 0.0 && scale.y > 0.0 && scale.z > 0.0 && scale.all_finite() &&
           bias.all_finite();
  }
};

// Coefficients of the linearized regression y = beta0 + sum_j beta_j * x_j.
// beta1..beta3 are squared gains, beta4..beta6 the gain-scaled bias cross
// terms, and beta0 is determined by the others:
//   beta0 = beta4^2/(4 beta1) + beta5^2/(4 beta2) + beta6^2/(4 beta3).
struct BetaVector {
  double beta0 = 0.0;
  std::array<double, 6> coeff{};  // beta1..beta6

  double operator[](int i) const { return i == 0 ? beta0 : coeff[i - 1]; }

  // beta0 recomputed from the remaining six coefficients.
  double consistent_beta0() const {
    return coeff[3] * coeff[3] / (4.0 * coeff[0]) +
           coeff[4] * coeff[4] / (4.0 * coeff[1]) +
           coeff[5] * coeff[5] / (4.0 * coeff[2]);
  }
};

// True angular velocity from a raw reading: G_j = k_j * (m_j + b_j).
Vec3 apply_calibration(const CalibrationParams& params, const Vec3& measured);

// Raw reading that a sensor with the given parameters would report for a true
// angular velocity: m_j = g_j / k_j - b_j. Rejects zero scale factors.
Vec3 inverse_model(const CalibrationParams& params, const Vec3& actual);

// Regression coefficients for a parameter set.
BetaVector params_to_beta(const CalibrationParams& params);

// Physical parameters recovered from regression coefficients:
//   k_j = sqrt(beta_j), b_j = beta_{j+3} / (2 beta_j).
// Rejects beta1..beta3 <= 0 (an unidentifiable or unphysical fit).
CalibrationParams beta_to_params(const BetaVector& beta);

}  // namespace gyrocal
