#include "gyrocal/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include "gyrocal/errors.hpp"

namespace gyrocal {

double ProtocolStep::rotation_duration() const {
  return revolutions * 2.0 * std::numbers::pi / omega;
}

double Protocol::min_omega() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& s : steps) w = std::min(w, s.omega);
  return w;
}

Protocol g_optimal_protocol(double omega, double sample_rate) {
  Protocol p;
  p.sample_rate = sample_rate;
  for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
    for (Direction dir : {Direction::CCW, Direction::CW}) {
      ProtocolStep step;
      step.axis = axis;
      step.direction = dir;
      step.omega = omega;
      p.steps.push_back(step);
    }
  }
  return p;
}

Observation average_revolution(const std::vector<GyroSample>& samples, double omega) {
  if (samples.empty()) {
    throw SegmentationError("average_revolution: empty segment");
  }
  double sum[3] = {0.0, 0.0, 0.0};
  double sum_sq[3] = {0.0, 0.0, 0.0};
  for (const auto& s : samples) {
    for (int j = 0; j < 3; ++j) {
      sum[j] += s.m[j];
      sum_sq[j] += s.m[j] * s.m[j];
    }
  }
  const double n = static_cast<double>(samples.size());
  Observation obs;
  obs.mean_mx = sum[0] / n;
  obs.mean_my = sum[1] / n;
  obs.mean_mz = sum[2] / n;
  obs.mean_mx2 = sum_sq[0] / n;
  obs.mean_my2 = sum_sq[1] / n;
  obs.mean_mz2 = sum_sq[2] / n;
  obs.response_y = omega * omega;
  return obs;
}

namespace {

SegmentedLog segment_by_labels(const std::vector<GyroSample>& samples,
                               const Protocol& protocol, const std::vector<int>& labels) {
  if (labels.size() != samples.size()) {
    throw SegmentationError("segment_log: one label per sample required");
  }
  std::map<int, std::vector<GyroSample>> groups;
  std::set<int> closed;
  int current = -1;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int label = labels[i];
    if (label < 0) {  // dwell
      if (current >= 0) closed.insert(current);
      current = -1;
      continue;
    }
    if (label != current) {
      if (closed.count(label)) {
        throw SegmentationError("segment_log: label " + std::to_string(label) +
                                " appears in two separate runs");
      }
      if (current >= 0) closed.insert(current);
      current = label;
    }
    groups[label].push_back(samples[i]);
  }
  if (groups.size() != protocol.steps.size()) {
    throw SegmentationError("segment_log: found " + std::to_string(groups.size()) +
                            " labeled segments, protocol has " +
                            std::to_string(protocol.steps.size()));
  }
  SegmentedLog log;
  for (auto& [label, group] : groups) {
    if (label >= static_cast<int>(protocol.steps.size())) {
      throw SegmentationError("segment_log: label " + std::to_string(label) +
                              " out of range for protocol");
    }
    log.segments.push_back({label, std::move(group)});
  }
  return log;
}

SegmentedLog segment_by_motion(const std::vector<GyroSample>& samples,
                               const Protocol& protocol, const SegmentationConfig& cfg) {
  const double omega = protocol.min_omega();
  const double threshold = cfg.motion_threshold_frac * omega;
  const double min_duration = cfg.min_duration_frac * 2.0 * std::numbers::pi / omega;

  std::vector<double> magnitude(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) magnitude[i] = samples[i].m.norm();

  // Centered moving average tames per-sample noise around the threshold.
  const int half = std::max(0, static_cast<int>(std::lround(
                                   0.5 * cfg.smoothing_window_s * protocol.sample_rate)));
  std::vector<double> smooth(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::size_t lo = i >= static_cast<std::size_t>(half) ? i - half : 0;
    const std::size_t hi = std::min(samples.size() - 1, i + half);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += magnitude[j];
    smooth[i] = acc / static_cast<double>(hi - lo + 1);
  }

  SegmentedLog log;
  std::size_t run_start = 0;
  bool in_run = false;
  auto close_run = [&](std::size_t end) {  // [run_start, end)
    const double duration = samples[end - 1].t - samples[run_start].t;
    if (duration < min_duration) return;  // noise blip, not a rotation
    SegmentedLog::Segment seg;
    seg.step_index = static_cast<int>(log.segments.size());
    seg.samples.assign(samples.begin() + run_start, samples.begin() + end);
    log.segments.push_back(std::move(seg));
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool moving = smooth[i] > threshold;
    if (moving && !in_run) {
      run_start = i;
      in_run = true;
    } else if (!moving && in_run) {
      close_run(i);
      in_run = false;
    }
  }
  if (in_run) close_run(samples.size());

  if (log.segments.size() != protocol.steps.size()) {
    throw SegmentationError("segment_log: detected " + std::to_string(log.segments.size()) +
                            " rotation segments, protocol has " +
                            std::to_string(protocol.steps.size()));
  }
  return log;
}

}  // namespace

SegmentedLog segment_log(const std::vector<GyroSample>& samples, const Protocol& protocol,
                         const std::optional<std::vector<int>>& labels,
                         const SegmentationConfig& cfg) {
  if (samples.empty()) {
    throw SegmentationError("segment_log: empty sample stream");
  }
  if (labels.has_value()) {
    return segment_by_labels(samples, protocol, *labels);
  }
  return segment_by_motion(samples, protocol, cfg);
}

ObservationSet observations_from(const SegmentedLog& log, const Protocol& protocol) {
  ObservationSet set;
  for (const auto& seg : log.segments) {
    if (seg.step_index < 0 || seg.step_index >= static_cast<int>(protocol.steps.size())) {
      throw SegmentationError("observations_from: segment index out of range");
    }
    set.rows.push_back(
        average_revolution(seg.samples, protocol.steps[seg.step_index].omega));
  }
  return set;
}

}  // namespace gyrocal
