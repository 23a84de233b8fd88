#include "gyrocal/model.hpp"

#include <cmath>

#include "gyrocal/errors.hpp"

namespace gyrocal {

Vec3 apply_calibration(const CalibrationParams& params, const Vec3& measured) {
  return {params.scale.x * (measured.x + params.bias.x),
          params.scale.y * (measured.y + params.bias.y),
          params.scale.z * (measured.z + params.bias.z)};
}

Vec3 inverse_model(const CalibrationParams& params, const Vec3& actual) {
  if (params.scale.x == 0.0 || params.scale.y == 0.0 || params.scale.z == 0.0) {
    throw UnphysicalEstimateError("inverse_model: zero scale factor");
  }
  return {actual.x / params.scale.x - params.bias.x,
          actual.y / params.scale.y - params.bias.y,
          actual.z / params.scale.z - params.bias.z};
}

BetaVector params_to_beta(const CalibrationParams& params) {
  BetaVector beta;
  for (int j = 0; j < 3; ++j) {
    const double k2 = params.scale[j] * params.scale[j];
    beta.coeff[j] = k2;
    beta.coeff[j + 3] = 2.0 * k2 * params.bias[j];
    beta.beta0 += k2 * params.bias[j] * params.bias[j];
  }
  return beta;
}

CalibrationParams beta_to_params(const BetaVector& beta) {
  for (int j = 0; j < 3; ++j) {
    if (!(beta.coeff[j] > 0.0)) {
      throw UnphysicalEstimateError(
          "beta_to_params: non-positive squared gain (data too noisy or "
          "model unidentifiable)");
    }
  }
  CalibrationParams params;
  for (int j = 0; j < 3; ++j) {
    params.scale[j] = std::sqrt(beta.coeff[j]);
    params.bias[j] = beta.coeff[j + 3] / (2.0 * beta.coeff[j]);
  }
  return params;
}

}  // namespace gyrocal
