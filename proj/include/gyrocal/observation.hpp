#pragma once

#include <cstddef>
#include <vector>

namespace gyrocal {

// One averaged regression row: per-revolution means of the measured
// components and of their squares, plus the squared commanded rotation speed
// as the response. The mean-of-squares fields dominate the squared means
// (Jensen); their gap estimates the per-sample noise variance on that axis.
struct Observation {
  double mean_mx = 0.0;   // rad/s
  double mean_my = 0.0;
  double mean_mz = 0.0;
  double mean_mx2 = 0.0;  // (rad/s)^2, mean of squared samples
  double mean_my2 = 0.0;
  double mean_mz2 = 0.0;
  double response_y = 0.0;  // (rad/s)^2, squared commanded speed

  double mean(int axis) const {
    return axis == 0 ? mean_mx : (axis == 1 ? mean_my : mean_mz);
  }
  double mean_sq(int axis) const {
    return axis == 0 ? mean_mx2 : (axis == 1 ? mean_my2 : mean_mz2);
  }

  // Excess of the mean of squares over the squared mean, per axis.
  double jensen_gap(int axis) const {
    const double m = mean(axis);
    return mean_sq(axis) - m * m;
  }
};

// An ordered batch of observations. The regression has six free coefficients,
// so at least six rows are required.
struct ObservationSet {
  std::vector<Observation> rows;

  std::size_t size() const { return rows.size(); }
};

inline constexpr std::size_t kMinObservations = 6;

}  // namespace gyrocal
