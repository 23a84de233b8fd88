#pragma once

#include <optional>
#include <vector>

#include "gyrocal/observation.hpp"
#include "gyrocal/vec3.hpp"

namespace gyrocal {

// One timestamped triaxial reading from the sensor under calibration.
struct GyroSample {
  double t = 0.0;  // seconds
  Vec3 m;          // measured angular velocity, rad/s
};

enum class Direction { CCW, CW };  // CCW about an axis = positive rate (right-hand rule)

inline double direction_sign(Direction d) { return d == Direction::CCW ? 1.0 : -1.0; }

// One constant-speed rotation of the experimental protocol.
struct ProtocolStep {
  Axis axis = Axis::X;
  Direction direction = Direction::CCW;
  double omega = 1.0;        // rad/s, > 0
  int revolutions = 1;       // full turns per observation
  double dwell_after = 3.0;  // rest time after the rotation, seconds

  double rotation_duration() const;  // revolutions * 2*pi / omega
};

// An ordered rotation plan plus the sensor sampling rate.
struct Protocol {
  std::vector<ProtocolStep> steps;
  double sample_rate = 200.0;  // Hz

  double min_omega() const;
};

// Raw samples grouped by protocol step, in step order.
struct SegmentedLog {
  struct Segment {
    int step_index = 0;
    std::vector<GyroSample> samples;
  };
  std::vector<Segment> segments;
};

// Tuning knobs for unlabeled-log segmentation. A sample counts as "moving"
// when the smoothed |M| exceeds motion_threshold_frac * omega; runs shorter
// than min_duration_frac of one revolution are discarded as noise.
struct SegmentationConfig {
  double motion_threshold_frac = 0.5;
  double min_duration_frac = 0.5;
  double smoothing_window_s = 0.05;
};

// The six-observation rotation plan: one CCW and one CW full revolution about
// each of x, y, z at the given speed. The ideal unit-speed design directions
// are (+-1,0,0), (0,+-1,0), (0,0,+-1).
Protocol g_optimal_protocol(double omega, double sample_rate);

// Reduces one rotation segment to an Observation: per-axis means of the
// samples and of their squares, with response omega^2 (the commanded speed;
// per-revolution timing makes it trustworthy). Rejects empty segments.
Observation average_revolution(const std::vector<GyroSample>& samples, double omega);

// Splits a raw stream into one segment per protocol step. With labels, groups
// by label (label = step index, negative = dwell). Without labels, detects
// motion runs against the protocol's speed; the run count must equal the
// protocol's step count.
SegmentedLog segment_log(const std::vector<GyroSample>& samples, const Protocol& protocol,
                         const std::optional<std::vector<int>>& labels = std::nullopt,
                         const SegmentationConfig& cfg = {});

// Observations for every segment, in step order.
ObservationSet observations_from(const SegmentedLog& log, const Protocol& protocol);

}  // namespace gyrocal
