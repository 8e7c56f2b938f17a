#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "tsm/error.hpp"

namespace tsm {

/// Mono signal plus its sample rate. Immutable once built; every sample is
/// checked to be finite on construction.
class AudioBuffer {
 public:
  AudioBuffer(std::vector<double> samples, int sample_rate_hz)
      : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (sample_rate_hz_ <= 0) {
      throw Error(ErrorCode::InvalidValue, "sample rate must be positive");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i])) {
        throw Error(ErrorCode::InvalidValue,
                    "non-finite sample at index " + std::to_string(i));
      }
    }
  }

  std::span<const double> samples() const noexcept { return samples_; }
  const std::vector<double>& data() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  int sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }

  double duration_seconds() const noexcept {
    return static_cast<double>(samples_.size()) / static_cast<double>(sample_rate_hz_);
  }

  /// Copy of samples [begin, end) at the same rate.
  AudioBuffer slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, samples_.size());
    begin = std::min(begin, end);
    return AudioBuffer(std::vector<double>(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                           samples_.begin() + static_cast<std::ptrdiff_t>(end)),
                       sample_rate_hz_);
  }

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_hz_;
};

struct Scale {
  double beta;
  friend bool operator==(const Scale&, const Scale&) = default;
};

struct Duration {
  double seconds;
  friend bool operator==(const Duration&, const Duration&) = default;
};

using Target = std::variant<Scale, Duration>;

inline double target_value(const Target& target) {
  return std::visit([](const auto& t) -> double {
    if constexpr (std::is_same_v<std::decay_t<decltype(t)>, Scale>) {
      return t.beta;
    } else {
      return t.seconds;
    }
  }, target);
}

/// One user request: modify [start_s, end_s) towards `target`.
struct SegmentSpec {
  double start_s = 0.0;
  double end_s = 0.0;
  Target target = Scale{1.0};

  friend bool operator==(const SegmentSpec&, const SegmentSpec&) = default;
};

struct PlanEntry {
  std::size_t start_sample = 0;
  std::size_t end_sample = 0;  // exclusive
  double beta = 1.0;

  std::size_t length() const noexcept { return end_sample - start_sample; }

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Resolved, sorted, disjoint per-range scale factors.
struct ScalePlan {
  std::vector<PlanEntry> entries;

  bool empty() const noexcept { return entries.empty(); }

  /// Throws unless the plan is sorted, disjoint, non-empty per entry,
  /// has positive betas, and fits inside `signal_len`.
  void validate(std::size_t signal_len) const {
    std::size_t prev_end = 0;
    for (const auto& e : entries) {
      if (!(e.beta > 0.0) || !std::isfinite(e.beta)) {
        throw Error(ErrorCode::NonPositiveTarget, "plan entry with non-positive beta");
      }
      if (e.start_sample >= e.end_sample) {
        throw Error(ErrorCode::InvalidValue, "plan entry with start >= end");
      }
      if (e.end_sample > signal_len) {
        throw Error(ErrorCode::OutOfRange, "plan entry exceeds signal length");
      }
      if (e.start_sample < prev_end) {
        throw Error(ErrorCode::OverlappingSegments, "plan entries overlap or are unsorted");
      }
      prev_end = e.end_sample;
    }
  }

  friend bool operator==(const ScalePlan&, const ScalePlan&) = default;
};

inline constexpr double kMinRecommendedBeta = 0.25;
inline constexpr double kMaxRecommendedBeta = 4.0;

/// Rounds t * rate half-to-even (the default floating-point rounding mode).
inline std::size_t seconds_to_samples(double t, int sample_rate_hz) {
  if (!(t >= 0.0)) {
    throw Error(ErrorCode::InvalidValue, "negative time");
  }
  return static_cast<std::size_t>(std::nearbyint(t * static_cast<double>(sample_rate_hz)));
}

namespace detail {

inline std::string format_seconds(double s) {
  std::ostringstream os;
  os << s << " s";
  return os.str();
}

}  // namespace detail

/// Converts user segments into a sample-indexed plan. Duration targets become
/// beta = d / (end_s - start_s). Segments may touch but not overlap.
/// Betas outside [0.25, 4] are accepted; a note is appended to `warnings`.
inline ScalePlan resolve_plan(std::size_t buffer_len, int sample_rate_hz,
                              std::span<const SegmentSpec> segments,
                              std::vector<std::string>* warnings = nullptr) {
  if (buffer_len == 0) {
    throw Error(ErrorCode::InvalidValue, "empty signal");
  }
  if (sample_rate_hz <= 0) {
    throw Error(ErrorCode::InvalidValue, "sample rate must be positive");
  }
  const double total_s = static_cast<double>(buffer_len) / sample_rate_hz;
  // tolerance for end times written with fewer digits than the true duration
  const double slack_s = 0.5 / sample_rate_hz;

  std::vector<SegmentSpec> sorted(segments.begin(), segments.end());
  for (const auto& seg : sorted) {
    const double value = target_value(seg.target);
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::NonPositiveTarget,
                  "segment starting at " + detail::format_seconds(seg.start_s) +
                      " has a non-positive target");
    }
    if (!(seg.start_s >= 0.0) || !(seg.start_s < seg.end_s)) {
      throw Error(ErrorCode::InvalidValue,
                  "segment needs 0 <= start < end (got " + detail::format_seconds(seg.start_s) +
                      " to " + detail::format_seconds(seg.end_s) + ")");
    }
    if (seg.end_s > total_s + slack_s) {
      throw Error(ErrorCode::OutOfRange,
                  "segment " + detail::format_seconds(seg.start_s) + " to " +
                      detail::format_seconds(seg.end_s) + " exceeds signal duration " +
                      detail::format_seconds(total_s));
    }
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SegmentSpec& a, const SegmentSpec& b) { return a.start_s < b.start_s; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].start_s < sorted[i - 1].end_s) {
      throw Error(ErrorCode::OverlappingSegments,
                  "segment " + detail::format_seconds(sorted[i - 1].start_s) + " to " +
                      detail::format_seconds(sorted[i - 1].end_s) + " overlaps segment " +
                      detail::format_seconds(sorted[i].start_s) + " to " +
                      detail::format_seconds(sorted[i].end_s));
    }
  }

  ScalePlan plan;
  for (const auto& seg : sorted) {
    double beta = 0.0;
    if (const auto* scale = std::get_if<Scale>(&seg.target)) {
      beta = scale->beta;
    } else {
      beta = std::get<Duration>(seg.target).seconds / (seg.end_s - seg.start_s);
    }
    const std::size_t start = std::min(seconds_to_samples(seg.start_s, sample_rate_hz), buffer_len);
    const std::size_t end = std::min(seconds_to_samples(seg.end_s, sample_rate_hz), buffer_len);
    if (start >= end) {
      if (warnings) {
        warnings->push_back("segment at " + detail::format_seconds(seg.start_s) +
                            " covers no samples and is ignored");
      }
      continue;
    }
    if (warnings && (beta < kMinRecommendedBeta || beta > kMaxRecommendedBeta)) {
      std::ostringstream os;
      os << "beta " << beta << " for segment at " << seg.start_s
         << " s is outside [0.25, 4]; quality may degrade";
      warnings->push_back(os.str());
    }
    plan.entries.push_back({start, end, beta});
  }
  return plan;
}

inline ScalePlan resolve_plan(std::size_t buffer_len, int sample_rate_hz,
                              const std::vector<SegmentSpec>& segments,
                              std::vector<std::string>* warnings = nullptr) {
  return resolve_plan(buffer_len, sample_rate_hz, std::span<const SegmentSpec>(segments), warnings);
}

}  // namespace tsm
