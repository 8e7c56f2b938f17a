#pragma once

// Time-domain overlap-add stretchers: plain OLA, SOLA (shift on the synthesis
// side) and SOLAFS (shift on the analysis side, fixed synthesis grid).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/detail/schedule.hpp"
#include "tsm/error.hpp"

namespace tsm {

enum class Crossfade { Linear };

/// Framing parameters shared by the OLA family and WSOLA.
///
/// `hop` is the larger of the two frame hops. For beta <= 1 it is the analysis
/// hop and the synthesis hop shrinks to beta * hop; for beta > 1 it is the
/// synthesis hop and the analysis hop shrinks to hop / beta. Both therefore
/// stay below the window length and the overlap W - Ss never vanishes.
struct TsmParams {
  std::size_t window_len = 400;
  std::size_t hop = 200;
  std::size_t k_max = 160;
  Crossfade crossfade = Crossfade::Linear;

  /// 25 ms window, half-window hop, 10 ms shift tolerance.
  static TsmParams for_sample_rate(int sample_rate_hz, double window_ms = 25.0, double kmax_ms = 10.0) {
    TsmParams p;
    p.window_len = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(window_ms * 1e-3 * sample_rate_hz)));
    p.hop = std::max<std::size_t>(1, p.window_len / 2);
    p.k_max = std::min(p.window_len, static_cast<std::size_t>(std::llround(kmax_ms * 1e-3 * sample_rate_hz)));
    return p;
  }

  double analysis_hop(double beta) const { return beta > 1.0 ? static_cast<double>(hop) / beta : static_cast<double>(hop); }
  double synthesis_hop(double beta) const { return beta > 1.0 ? static_cast<double>(hop) : beta * static_cast<double>(hop); }

  void validate() const {
    if (window_len < 2) throw Error(ErrorCode::InvalidValue, "window length must be at least 2");
    if (hop == 0 || hop >= window_len) {
      throw Error(ErrorCode::InvalidValue, "hop must satisfy 0 < hop < window length");
    }
    if (k_max > window_len) throw Error(ErrorCode::InvalidValue, "k_max must not exceed the window length");
  }

  friend bool operator==(const TsmParams&, const TsmParams&) = default;
};

inline constexpr double kEnergyFloor = 1e-12;

/// r_xy / sqrt(r_xx * r_yy), or 0 when either energy is below 1e-12.
inline double normalized_xcorr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::LengthMismatch, "normalized_xcorr needs two sequences of equal, nonzero length");
  }
  double rxy = 0.0;
  double rxx = 0.0;
  double ryy = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    rxy += x[n] * y[n];
    rxx += x[n] * x[n];
    ryy += y[n] * y[n];
  }
  if (rxx < kEnergyFloor || ryy < kEnergyFloor) return 0.0;
  return std::clamp(rxy / std::sqrt(rxx * ryy), -1.0, 1.0);
}

struct ShiftDecision {
  std::size_t shift = 0;
  bool natural = false;  // true when the continuation shift tau was in range
};

/// Chooses the analysis shift for the next SOLAFS frame. The continuation
/// tau = prev_k + (Ss - Sa) is taken whenever 0 <= tau <= k_max; otherwise the
/// shift in [0, k_max] maximising the normalised cross-correlation between
/// x_context[k, k + |y_overlap|) and y_overlap wins, ties to the smallest k.
/// x_context must hold at least k_max + |y_overlap| samples; a shorter
/// context narrows the search.
inline ShiftDecision select_shift(std::ptrdiff_t prev_k, std::ptrdiff_t analysis_hop, std::ptrdiff_t synthesis_hop,
                                  std::size_t k_max, std::span<const double> x_context,
                                  std::span<const double> y_overlap) {
  const std::ptrdiff_t tau = prev_k + (synthesis_hop - analysis_hop);
  if (tau >= 0 && tau <= static_cast<std::ptrdiff_t>(k_max)) {
    return {static_cast<std::size_t>(tau), true};
  }
  const std::size_t ov = y_overlap.size();
  if (ov == 0 || x_context.size() < ov) return {0, false};
  const std::size_t last = std::min(k_max, x_context.size() - ov);
  std::size_t best_k = 0;
  double best = -2.0;
  for (std::size_t k = 0; k <= last; ++k) {
    const double r = normalized_xcorr(x_context.subspan(k, ov), y_overlap);
    if (r > best) {
      best = r;
      best_k = k;
    }
  }
  return {best_k, false};
}

namespace detail {

inline void check_stretch_args(const AudioBuffer& signal, double beta, const TsmParams& params,
                               std::size_t min_len, const char* who) {
  params.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::NonPositiveTarget, std::string(who) + ": beta must be positive");
  }
  if (signal.size() < min_len) {
    throw Error(ErrorCode::SignalTooShort, std::string(who) + ": signal has " + std::to_string(signal.size()) +
                                               " samples, needs at least " + std::to_string(min_len));
  }
}

/// out[pos + n] = (1 - r) * out[pos + n] + r * src[n] for n < overlap with a
/// rising ramp r, then a plain copy for the remainder of src.
inline void crossfade_into(std::vector<double>& out, std::size_t pos, std::span<const double> src,
                           std::size_t overlap) {
  overlap = std::min(overlap, src.size());
  const double denom = static_cast<double>(overlap + 1);
  for (std::size_t n = 0; n < src.size() && pos + n < out.size(); ++n) {
    if (n < overlap) {
      const double r = static_cast<double>(n + 1) / denom;
      out[pos + n] = (1.0 - r) * out[pos + n] + r * src[n];
    } else {
      out[pos + n] = src[n];
    }
  }
}

/// Fixed synthesis grid with optional analysis-side shift search.
/// search == false gives plain OLA.
inline AudioBuffer fixed_grid_stretch(const AudioBuffer& signal, double beta, const TsmParams& params, bool search,
                                      std::vector<ShiftDecision>* trace) {
  const std::span<const double> x = signal.samples();
  const std::size_t W = params.window_len;
  const std::size_t out_len = target_length(x.size(), beta);
  if (out_len < W) {
    return AudioBuffer(short_crossfade(x, out_len), signal.sample_rate_hz());
  }
  const auto grid = frame_schedule(x.size(), out_len, W, params.analysis_hop(beta), params.synthesis_hop(beta));
  std::vector<double> out(out_len, 0.0);

  std::ptrdiff_t prev_k = 0;
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::size_t a = grid[m].analysis;
    const std::size_t s = grid[m].synthesis;
    std::size_t k = 0;
    std::size_t overlap = 0;
    if (m > 0) {
      const std::size_t prev_s = grid[m - 1].synthesis;
      overlap = prev_s + W - s;
      if (search) {
        // shifts that would read past the end of the input are not candidates
        const std::size_t k_room = std::min(params.k_max, x.size() - W - a);
        const auto decision = select_shift(
            prev_k, static_cast<std::ptrdiff_t>(a - grid[m - 1].analysis), static_cast<std::ptrdiff_t>(s - prev_s),
            k_room, x.subspan(a, std::min(x.size() - a, k_room + overlap)),
            std::span<const double>(out).subspan(s, overlap));
        k = decision.shift;
        if (trace) trace->push_back(decision);
      }
    }
    crossfade_into(out, s, x.subspan(a + k, W), overlap);
    prev_k = static_cast<std::ptrdiff_t>(k);
  }
  return AudioBuffer(std::move(out), signal.sample_rate_hz());
}

}  // namespace detail

/// Baseline overlap-add: frames read on the analysis grid are laid on the
/// synthesis grid with a linear crossfade and no similarity search.
inline AudioBuffer ola_stretch(const AudioBuffer& signal, double beta, const TsmParams& params) {
  detail::check_stretch_args(signal, beta, params, params.window_len, "ola_stretch");
  return detail::fixed_grid_stretch(signal, beta, params, false, nullptr);
}

/// SOLAFS: fixed output grid, each analysis window slid forward by k_m in
/// [0, k_max] so its head matches what is already in the output.
/// `trace`, when given, receives one ShiftDecision per frame after the first.
inline AudioBuffer solafs_stretch(const AudioBuffer& signal, double beta, const TsmParams& params,
                                  std::vector<ShiftDecision>* trace = nullptr) {
  detail::check_stretch_args(signal, beta, params, params.window_len + params.k_max, "solafs_stretch");
  return detail::fixed_grid_stretch(signal, beta, params, true, trace);
}

/// SOLA: fixed analysis grid, each window placed at its synthesis position
/// plus a shift k_m in [0, k_max] that best aligns it with the output
/// written so far. The overlap region is k_{m-1} - k_m + W - Ss samples.
inline AudioBuffer sola_stretch(const AudioBuffer& signal, double beta, const TsmParams& params) {
  detail::check_stretch_args(signal, beta, params, params.window_len, "sola_stretch");
  const std::span<const double> x = signal.samples();
  const std::size_t W = params.window_len;
  const std::size_t out_len = detail::target_length(x.size(), beta);
  if (out_len < W) {
    return AudioBuffer(detail::short_crossfade(x, out_len), signal.sample_rate_hz());
  }
  const auto grid = detail::frame_schedule(x.size(), out_len, W, params.analysis_hop(beta), params.synthesis_hop(beta));
  std::vector<double> out(out_len + params.k_max + W, 0.0);
  std::size_t written_end = 0;

  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::size_t a = grid[m].analysis;
    const std::size_t s = grid[m].synthesis;
    const auto frame = x.subspan(a, W);
    if (m == 0) {
      std::copy(frame.begin(), frame.end(), out.begin() + static_cast<std::ptrdiff_t>(s));
      written_end = s + W;
      continue;
    }
    // keep 1 <= overlap <= W - 1 so every frame both blends and extends
    const std::size_t lo = written_end > s + W ? written_end - s - W + 1 : 0;
    const std::size_t hi = std::min(params.k_max, written_end - s - 1);
    std::size_t best_k = lo;
    if (lo <= hi) {
      double best = -2.0;
      for (std::size_t k = lo; k <= hi; ++k) {
        const std::size_t ov = written_end - (s + k);
        const double r = normalized_xcorr(frame.first(ov), std::span<const double>(out).subspan(s + k, ov));
        if (r > best) {
          best = r;
          best_k = k;
        }
      }
    }
    const std::size_t pos = s + best_k;
    if (pos + W > out.size()) out.resize(pos + W, 0.0);
    detail::crossfade_into(out, pos, frame, written_end - pos);
    written_end = pos + W;
  }
  out.resize(written_end);
  return AudioBuffer(std::move(out), signal.sample_rate_hz());
}

}  // namespace tsm
