#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/detail/schedule.hpp"
#include "tsm/error.hpp"
#include "tsm/ola.hpp"
#include "tsm/spectral.hpp"

namespace tsm {

enum class SimilarityMeasure { CrossCorrelation, NormalizedCrossCorrelation, CrossAMDF };

/// AMDF is a distance; the two correlations are similarities.
constexpr bool is_minimized(SimilarityMeasure m) noexcept { return m == SimilarityMeasure::CrossAMDF; }

inline double similarity(std::span<const double> a, std::span<const double> b, SimilarityMeasure measure) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::LengthMismatch, "similarity needs two sequences of equal, nonzero length");
  }
  switch (measure) {
    case SimilarityMeasure::CrossCorrelation: {
      double acc = 0.0;
      for (std::size_t n = 0; n < a.size(); ++n) acc += a[n] * b[n];
      return acc;
    }
    case SimilarityMeasure::NormalizedCrossCorrelation:
      return normalized_xcorr(a, b);
    case SimilarityMeasure::CrossAMDF: {
      double acc = 0.0;
      for (std::size_t n = 0; n < a.size(); ++n) acc += std::abs(a[n] - b[n]);
      return acc / static_cast<double>(a.size());
    }
  }
  return 0.0;
}

/// Searches delta in [-k_max, k_max] (clipped so the candidate window stays
/// inside `signal`) for the candidate signal[ideal + delta, + |reference|)
/// most similar to `reference`. Candidates are visited 0, -1, +1, -2, +2, ...
/// and only a strict improvement replaces the incumbent, so ties go to the
/// smallest |delta| and then to the negative side.
inline std::ptrdiff_t wsola_best_offset(std::span<const double> signal, std::size_t ideal, std::size_t k_max,
                                        std::size_t window_len, std::span<const double> reference,
                                        SimilarityMeasure measure) {
  const std::size_t cmp = reference.size();
  const auto lo = -static_cast<std::ptrdiff_t>(std::min(k_max, ideal));
  const std::size_t room = signal.size() >= ideal + window_len ? signal.size() - ideal - window_len : 0;
  const auto hi = static_cast<std::ptrdiff_t>(std::min(k_max, room));
  const bool minimize = is_minimized(measure);

  std::ptrdiff_t best_delta = 0;
  double best = 0.0;
  bool have = false;
  for (std::ptrdiff_t step = 0; step <= static_cast<std::ptrdiff_t>(k_max); ++step) {
    for (const std::ptrdiff_t delta : {-step, step}) {
      if (step == 0 && delta != 0) continue;
      if (delta < lo || delta > hi) continue;
      const auto start = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(ideal) + delta);
      if (start + cmp > signal.size()) continue;
      const double score = similarity(signal.subspan(start, cmp), reference, measure);
      if (!have || (minimize ? score < best : score > best)) {
        best = score;
        best_delta = delta;
        have = true;
      }
      if (step == 0) break;
    }
  }
  return best_delta;
}

/// Waveform-similarity overlap-add. Output frames sit on a fixed synthesis
/// grid; each analysis frame may move by up to +-k_max from its nominal
/// position so that its first W - Ss samples resemble the natural
/// continuation of the previously chosen frame. Frames are Hann-windowed on
/// both analysis and synthesis and normalised by the squared-window sum.
inline AudioBuffer wsola_stretch(const AudioBuffer& signal, double beta, const TsmParams& params,
                                 SimilarityMeasure measure = SimilarityMeasure::NormalizedCrossCorrelation,
                                 std::vector<std::ptrdiff_t>* offsets = nullptr) {
  detail::check_stretch_args(signal, beta, params, params.window_len + 2 * params.k_max, "wsola_stretch");
  const std::span<const double> x = signal.samples();
  const std::size_t W = params.window_len;
  const std::size_t out_len = detail::target_length(x.size(), beta);
  if (out_len < W) {
    return AudioBuffer(detail::short_crossfade(x, out_len), signal.sample_rate_hz());
  }
  const auto grid = detail::frame_schedule(x.size(), out_len, W, params.analysis_hop(beta), params.synthesis_hop(beta));
  const Window window = make_window(WindowKind::Hann, W);
  OverlapAdder ola(out_len, window);
  std::vector<double> frame(W);

  std::size_t prev_pos = 0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::size_t ideal = grid[m].analysis;
    std::size_t pos = ideal;
    if (m > 0) {
      const std::size_t ss = grid[m].synthesis - grid[m - 1].synthesis;
      const std::size_t overlap = std::max<std::size_t>(1, W - ss);
      // where the previous frame would have continued in the source
      const std::size_t natural = std::min(prev_pos + ss, x.size() - overlap);
      const auto delta = wsola_best_offset(x, ideal, params.k_max, W, x.subspan(natural, overlap), measure);
      pos = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(ideal) + delta);
      if (offsets) offsets->push_back(delta);
    }
    for (std::size_t n = 0; n < W; ++n) frame[n] = x[pos + n] * window[n];
    ola.add(grid[m].synthesis, frame);
    prev_pos = pos;
  }
  return AudioBuffer(std::move(ola).finish(), signal.sample_rate_hz());
}

inline std::string_view measure_name(SimilarityMeasure m) {
  switch (m) {
    case SimilarityMeasure::CrossCorrelation: return "xcorr";
    case SimilarityMeasure::NormalizedCrossCorrelation: return "nxcorr";
    case SimilarityMeasure::CrossAMDF: return "amdf";
  }
  return "nxcorr";
}

inline SimilarityMeasure parse_measure(std::string_view name) {
  if (name == "xcorr") return SimilarityMeasure::CrossCorrelation;
  if (name == "nxcorr") return SimilarityMeasure::NormalizedCrossCorrelation;
  if (name == "amdf") return SimilarityMeasure::CrossAMDF;
  throw Error(ErrorCode::InvalidValue, "unknown similarity measure '" + std::string(name) + "'");
}

}  // namespace tsm
