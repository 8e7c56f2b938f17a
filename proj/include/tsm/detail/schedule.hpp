#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace tsm::detail {

struct FramePosition {
  std::size_t analysis = 0;
  std::size_t synthesis = 0;
};

/// Frame grid mapping [0, input_len - frame_len] onto [0, output_len - frame_len]
/// in J equal steps, J being the smallest count that keeps every analysis step
/// <= analysis_hop and every synthesis step <= synthesis_hop. Positions are the
/// rounded fractional grid, so per-frame hops differ by at most one sample and
/// the first/last frames sit flush with both signal ends.
inline std::vector<FramePosition> frame_schedule(std::size_t input_len, std::size_t output_len,
                                                 std::size_t frame_len, double analysis_hop,
                                                 double synthesis_hop) {
  const std::size_t span_a = input_len - frame_len;
  const std::size_t span_s = output_len - frame_len;
  const auto steps_for = [](std::size_t span, double hop) -> std::size_t {
    if (span == 0) return 0;
    return static_cast<std::size_t>(std::ceil(static_cast<double>(span) / std::max(hop, 1.0) - 1e-9));
  };
  const std::size_t steps = std::max({steps_for(span_a, analysis_hop), steps_for(span_s, synthesis_hop),
                                      std::size_t{1}});
  std::vector<FramePosition> grid(steps + 1);
  for (std::size_t m = 0; m <= steps; ++m) {
    // integer round-half-up of m * span / steps
    grid[m].analysis = (2 * m * span_a + steps) / (2 * steps);
    grid[m].synthesis = (2 * m * span_s + steps) / (2 * steps);
  }
  return grid;
}

/// Output for a target shorter than one frame: head faded into tail.
inline std::vector<double> short_crossfade(std::span<const double> x, std::size_t output_len) {
  std::vector<double> out(output_len);
  if (output_len == 0) return out;
  const std::size_t tail = x.size() - std::min(output_len, x.size());
  for (std::size_t n = 0; n < output_len; ++n) {
    const double r = output_len > 1 ? static_cast<double>(n) / static_cast<double>(output_len - 1) : 0.0;
    const double head = n < x.size() ? x[n] : 0.0;
    const double end = tail + n < x.size() ? x[tail + n] : 0.0;
    out[n] = (1.0 - r) * head + r * end;
  }
  return out;
}

inline std::size_t target_length(std::size_t input_len, double beta) {
  return static_cast<std::size_t>(std::llround(beta * static_cast<double>(input_len)));
}

}  // namespace tsm::detail
