#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gyrocal/model.hpp"
#include "gyrocal/protocol.hpp"
#include "gyrocal/rng.hpp"

namespace gyrocal {

// Synthetic-gyroscope generation settings. Defaults model a typical low-cost
// MEMS part: gains within +-20%, biases within +-0.1 rad/s, up to 10% mounting
// misalignment, white measurement noise, and servo speed jitter at 5% of the
// commanded speed.
struct SimConfig {
  double scale_lo = 0.8;
  double scale_hi = 1.2;
  double bias_lo = -0.1;          // rad/s
  double bias_hi = 0.1;
  bool bias_random_sign = false;  // draw |b| from [bias_lo, bias_hi], then flip a coin
  double misalignment_max = 0.10;
  double noise_sigma = 0.035;     // rad/s per sample (alternative study level: 0.2)
  double speed_jitter_frac = 0.05;
  double sample_rate = 200.0;     // Hz
  std::uint64_t seed = 0;

  // Poor-quality sensor variant: gains in [1.2, 2.0], bias magnitudes in
  // [0.1, 0.2] rad/s with random sign.
  static SimConfig extreme() {
    SimConfig cfg;
    cfg.scale_lo = 1.2;
    cfg.scale_hi = 2.0;
    cfg.bias_lo = 0.1;
    cfg.bias_hi = 0.2;
    cfg.bias_random_sign = true;
    return cfg;
  }

  bool valid() const {
    return scale_lo > 0.0 && scale_hi >= scale_lo && bias_hi >= bias_lo &&
           misalignment_max >= 0.0 && misalignment_max < 1.0 && noise_sigma >= 0.0 &&
           speed_jitter_frac >= 0.0 && sample_rate > 0.0;
  }
};

// Ground-truth parameters drawn from the configured ranges, independently per
// axis.
CalibrationParams draw_truth(const SimConfig& cfg, RngStream& rng);

// Realized rotation axis for an imperfect mounting: each off-nominal
// direction cosine gets a magnitude from U(0, misalignment_max) with random
// sign, then the vector is renormalized. The nominal component stays positive.
Vec3 draw_misaligned_axis(Axis nominal, double misalignment_max, RngStream& rng);

// Samples for one constant-speed rotation. The instantaneous speed is
// omega * direction_sign plus Gaussian jitter with sigma = jitter_frac * omega;
// the jitter is centered over the segment because the servo closes each
// commanded revolution exactly, so the per-revolution mean speed carries no
// jitter. Measurements run the true rate through the inverse sensor model and
// add white noise per axis. t_start offsets the timestamps.
std::vector<GyroSample> simulate_step(const CalibrationParams& truth,
                                      const ProtocolStep& step, const Vec3& axis,
                                      const SimConfig& cfg, RngStream& rng,
                                      double t_start = 0.0);

// One full protocol execution.
struct ProtocolRun {
  std::vector<GyroSample> log;     // rotations and dwell gaps, concatenated
  std::vector<int> labels;         // per-sample step index, -1 for dwell
  SegmentedLog segmented;          // ground-truth segmentation (rotations only)
  ObservationSet observations;     // averaged rows in step order
};

// Runs every protocol step against one mounting: a single misaligned axis is
// drawn per nominal axis and shared by its two rotation directions. Dwell
// samples see a stationary sensor (true rate zero).
ProtocolRun simulate_protocol_run(const CalibrationParams& truth, const Protocol& protocol,
                                  const SimConfig& cfg, RngStream& rng);

// Time-varying-speed comparison run: the rotation speed follows
// amplitude * sin(2*pi*freq*t) about an axis projecting equally onto all
// three sensor axes. Returns, per sample, the true rate, the raw reading, and
// the reading corrected with `estimate`.
struct TrackingSample {
  double t = 0.0;
  Vec3 actual;
  Vec3 raw;
  Vec3 calibrated;
};
std::vector<TrackingSample> simulate_sine_tracking(const CalibrationParams& truth,
                                                   const CalibrationParams& estimate,
                                                   double amplitude, double freq,
                                                   double duration, const SimConfig& cfg,
                                                   RngStream& rng);

}  // namespace gyrocal
