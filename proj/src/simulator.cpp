#include "gyrocal/simulator.hpp"

#include <cmath>
#include <numbers>

#include "gyrocal/errors.hpp"

namespace gyrocal {

CalibrationParams draw_truth(const SimConfig& cfg, RngStream& rng) {
  if (!cfg.valid()) throw Error("draw_truth: invalid simulation config");
  CalibrationParams truth;
  for (int j = 0; j < 3; ++j) truth.scale[j] = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  for (int j = 0; j < 3; ++j) {
    double b = rng.uniform(cfg.bias_lo, cfg.bias_hi);
    if (cfg.bias_random_sign) b = std::abs(b) * rng.sign();
    truth.bias[j] = b;
  }
  return truth;
}

Vec3 draw_misaligned_axis(Axis nominal, double misalignment_max, RngStream& rng) {
  if (misalignment_max < 0.0 || misalignment_max >= 1.0) {
    throw Error("draw_misaligned_axis: misalignment fraction out of range");
  }
  Vec3 axis = unit_vector(nominal);
  for (int j = 0; j < 3; ++j) {
    if (j == static_cast<int>(nominal)) continue;
    axis[j] = rng.uniform(0.0, misalignment_max) * rng.sign();
  }
  return axis.normalized();
}

std::vector<GyroSample> simulate_step(const CalibrationParams& truth,
                                      const ProtocolStep& step, const Vec3& axis,
                                      const SimConfig& cfg, RngStream& rng,
                                      double t_start) {
  const long count = std::lround(cfg.sample_rate * step.rotation_duration());
  const double dt = 1.0 / cfg.sample_rate;
  const double commanded = direction_sign(step.direction) * step.omega;

  // Jitter draws, centered so the segment's mean speed equals the commanded
  // speed: the servo completes each commanded revolution exactly, leaving all
  // speed noise inside the revolution.
  std::vector<double> jitter(count, 0.0);
  if (cfg.speed_jitter_frac > 0.0 && count > 0) {
    double mean = 0.0;
    for (auto& j : jitter) {
      j = rng.gaussian(cfg.speed_jitter_frac * step.omega);
      mean += j;
    }
    mean /= static_cast<double>(count);
    for (auto& j : jitter) j -= mean;
  }

  std::vector<GyroSample> samples;
  samples.reserve(count);
  for (long i = 0; i < count; ++i) {
    const double speed = commanded + jitter[i];
    const Vec3 true_rate = speed * axis;
    Vec3 m = inverse_model(truth, true_rate);
    for (int j = 0; j < 3; ++j) m[j] += rng.gaussian(cfg.noise_sigma);
    samples.push_back({t_start + static_cast<double>(i) * dt, m});
  }
  return samples;
}

ProtocolRun simulate_protocol_run(const CalibrationParams& truth, const Protocol& protocol,
                                  const SimConfig& cfg, RngStream& rng) {
  // One mounting per nominal axis, shared by both rotation directions.
  Vec3 mounted[3];
  for (int a = 0; a < 3; ++a) {
    mounted[a] = draw_misaligned_axis(static_cast<Axis>(a), cfg.misalignment_max, rng);
  }

  ProtocolRun run;
  double t = 0.0;
  const double dt = 1.0 / cfg.sample_rate;
  for (std::size_t s = 0; s < protocol.steps.size(); ++s) {
    const ProtocolStep& step = protocol.steps[s];
    auto samples =
        simulate_step(truth, step, mounted[static_cast<int>(step.axis)], cfg, rng, t);
    t += static_cast<double>(samples.size()) * dt;

    SegmentedLog::Segment seg;
    seg.step_index = static_cast<int>(s);
    seg.samples = samples;
    run.segmented.segments.push_back(std::move(seg));

    for (const auto& sample : samples) {
      run.log.push_back(sample);
      run.labels.push_back(static_cast<int>(s));
    }

    // Stationary dwell: the sensor sees only its own bias plus noise.
    const long dwell_count = std::lround(cfg.sample_rate * step.dwell_after);
    for (long i = 0; i < dwell_count; ++i) {
      Vec3 m = inverse_model(truth, Vec3{});
      for (int j = 0; j < 3; ++j) m[j] += rng.gaussian(cfg.noise_sigma);
      run.log.push_back({t, m});
      run.labels.push_back(-1);
      t += dt;
    }
  }

  run.observations = observations_from(run.segmented, protocol);
  return run;
}

std::vector<TrackingSample> simulate_sine_tracking(const CalibrationParams& truth,
                                                   const CalibrationParams& estimate,
                                                   double amplitude, double freq,
                                                   double duration, const SimConfig& cfg,
                                                   RngStream& rng) {
  const Vec3 axis = Vec3{1.0, 1.0, 1.0}.normalized();  // equal projection on all axes
  const long count = std::lround(cfg.sample_rate * duration);
  const double dt = 1.0 / cfg.sample_rate;

  std::vector<TrackingSample> out;
  out.reserve(count);
  for (long i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) * dt;
    double speed = amplitude * std::sin(2.0 * std::numbers::pi * freq * t);
    speed += rng.gaussian(cfg.speed_jitter_frac * std::abs(speed));
    TrackingSample s;
    s.t = t;
    s.actual = speed * axis;
    s.raw = inverse_model(truth, s.actual);
    for (int j = 0; j < 3; ++j) s.raw[j] += rng.gaussian(cfg.noise_sigma);
    s.calibrated = apply_calibration(estimate, s.raw);
    out.push_back(s);
  }
  return out;
}

}  // namespace gyrocal
