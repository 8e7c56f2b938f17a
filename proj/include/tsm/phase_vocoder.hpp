#pragma once

// Peak-locked phase vocoder. Each analysis frame is split into regions of
// influence around its spectral peaks; every bin of a region is rotated by
// the same unit phasor Z, and Z accumulates the per-frame phase offset the
// region's peak needs to stay coherent at the synthesis hop.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/detail/schedule.hpp"
#include "tsm/error.hpp"
#include "tsm/spectral.hpp"

namespace tsm {

struct PvParams {
  std::size_t fft_size = 2048;
  std::size_t hop = 512;  // larger of the analysis/synthesis hops, as in TsmParams
  double alpha = 0.0;     // quadratic frequency-mapping coefficient
  bool large_fft_low_rate = true;

  static PvParams for_fft_size(std::size_t fft_size) {
    PvParams p;
    p.fft_size = fft_size;
    p.hop = std::max<std::size_t>(1, fft_size / 4);
    return p;
  }

  double analysis_hop(double beta) const { return beta > 1.0 ? static_cast<double>(hop) / beta : static_cast<double>(hop); }
  double synthesis_hop(double beta) const { return beta > 1.0 ? static_cast<double>(hop) : beta * static_cast<double>(hop); }

  void validate() const {
    if (!is_power_of_two(fft_size) || fft_size < 4) {
      throw Error(ErrorCode::NotPowerOfTwo, "phase vocoder FFT size must be a power of two >= 4");
    }
    if (hop == 0 || hop > fft_size) throw Error(ErrorCode::InvalidValue, "phase vocoder hop must be in [1, fft_size]");
    if (!std::isfinite(alpha)) throw Error(ErrorCode::InvalidValue, "alpha must be finite");
  }

  friend bool operator==(const PvParams&, const PvParams&) = default;
};

/// Peak bins plus region edges: region r spans [boundaries[r], boundaries[r+1]).
struct PeakSet {
  std::vector<std::size_t> peaks;
  std::vector<std::size_t> boundaries;

  bool empty() const noexcept { return peaks.empty(); }
};

inline constexpr double kPeakFloorRatio = 1e-9;

/// A run of equal bins is a peak when it rises above both outer neighbours
/// and above 1e-9 x the global maximum; the run's lowest bin represents it.
/// The edge between neighbouring peaks is the smallest bin between them
/// (lowest index on ties). Bins 0 and n-1 have one neighbour and never peak.
inline PeakSet find_peaks(std::span<const double> mag) {
  const std::size_t n = mag.size();
  if (n < 3) throw Error(ErrorCode::TooFewBins, "find_peaks needs at least 3 bins");
  PeakSet out;
  const double top = *std::max_element(mag.begin(), mag.end());
  const double floor = kPeakFloorRatio * top;
  if (!(top > 0.0)) return out;

  std::size_t i = 1;
  while (i + 1 < n) {
    std::size_t j = i;
    while (j + 1 < n && mag[j + 1] == mag[i]) ++j;
    // run [i, j]; a peak needs a right neighbour inside the spectrum
    if (j + 1 < n && mag[i] > mag[i - 1] && mag[i] > mag[j + 1] && mag[i] > floor) {
      out.peaks.push_back(i);
    }
    i = j + 1;
  }
  if (out.peaks.empty()) return out;

  out.boundaries.push_back(0);
  for (std::size_t p = 0; p + 1 < out.peaks.size(); ++p) {
    std::size_t valley = out.peaks[p] + 1;
    for (std::size_t k = valley; k < out.peaks[p + 1]; ++k) {
      if (mag[k] < mag[valley]) valley = k;
    }
    out.boundaries.push_back(valley);
  }
  out.boundaries.push_back(n);
  return out;
}

/// Frequency offset applied to a partial at omega (rad/sample) when time
/// scaling by beta: omega * (beta - 1), plus alpha * omega^2 when the
/// quadratic mapping is selected.
inline double frequency_shift(double omega, double beta, double alpha, bool large_fft_low_rate) {
  const double linear = omega * (beta - 1.0);
  return large_fft_low_rate ? linear : alpha * omega * omega + linear;
}

/// Wraps a phase into [-pi, pi).
inline double principal_angle(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  phi = std::fmod(phi + std::numbers::pi, two_pi);
  if (phi < 0.0) phi += two_pi;
  return phi - std::numbers::pi;
}

/// Per-bin unit rotations carried from frame to frame.
class PhaseAccumulator {
 public:
  explicit PhaseAccumulator(std::size_t bins) : rotations_(bins, {1.0, 0.0}) {}

  std::span<const std::complex<double>> rotations() const noexcept { return rotations_; }
  std::complex<double> operator[](std::size_t bin) const noexcept { return rotations_[bin]; }

  /// Z <- Z * e^{j * advance}, renormalised to unit modulus.
  static std::complex<double> advance(std::complex<double> z, double phase_advance) {
    z *= std::polar(1.0, phase_advance);
    const double mag = std::abs(z);
    return mag > 0.0 ? z / mag : std::complex<double>{1.0, 0.0};
  }

  void assign(std::vector<std::complex<double>> next) { rotations_ = std::move(next); }

  void reset() { std::fill(rotations_.begin(), rotations_.end(), std::complex<double>{1.0, 0.0}); }

 private:
  std::vector<std::complex<double>> rotations_;
};

/// Frame-by-frame engine behind pv_stretch. Feed analysis spectra in order
/// together with the analysis/synthesis hops that led to them.
class PeakLockedVocoder {
 public:
  explicit PeakLockedVocoder(const PvParams& params)
      : params_(params), bins_(params.fft_size / 2 + 1), acc_(bins_), prev_phase_(bins_, 0.0) {}

  ComplexSpectrum process(const ComplexSpectrum& frame, std::size_t analysis_hop, std::size_t synthesis_hop) {
    if (frame.bins.size() != bins_) throw Error(ErrorCode::LengthMismatch, "spectrum size does not match fft_size");
    std::vector<double> phase(bins_);
    std::vector<double> mag(bins_);
    for (std::size_t k = 0; k < bins_; ++k) {
      phase[k] = std::arg(frame.bins[k]);
      mag[k] = std::abs(frame.bins[k]);
    }

    if (!started_) {
      started_ = true;
      last_peaks_ = find_peaks(mag);
    } else {
      std::vector<std::complex<double>> next(bins_, {1.0, 0.0});
      last_peaks_ = find_peaks(mag);
      const double two_pi_over_n = 2.0 * std::numbers::pi / static_cast<double>(params_.fft_size);
      const auto ra = static_cast<double>(analysis_hop);
      const auto rs = static_cast<double>(synthesis_hop);
      for (std::size_t r = 0; r < last_peaks_.peaks.size(); ++r) {
        const std::size_t p = last_peaks_.peaks[r];
        const double bin_omega = two_pi_over_n * static_cast<double>(p);
        double omega = bin_omega;
        if (analysis_hop > 0) {
          omega += principal_angle(phase[p] - prev_phase_[p] - bin_omega * ra) / ra;
        }
        omega = std::clamp(omega, 0.0, std::numbers::pi);
        double advance = 0.0;
        if (analysis_hop > 0) {
          advance = frequency_shift(omega, rs / ra, params_.alpha, params_.large_fft_low_rate) * ra;
        } else {
          advance = omega * rs;
        }
        const std::complex<double> z = PhaseAccumulator::advance(acc_[p], advance);
        for (std::size_t k = last_peaks_.boundaries[r]; k < last_peaks_.boundaries[r + 1]; ++k) next[k] = z;
      }
      acc_.assign(std::move(next));
    }
    prev_phase_ = std::move(phase);

    ComplexSpectrum out{frame.bins, frame.fft_size};
    for (std::size_t k = 0; k < bins_; ++k) out.bins[k] *= acc_[k];
    return out;
  }

  const PhaseAccumulator& accumulator() const noexcept { return acc_; }
  const PeakSet& last_peaks() const noexcept { return last_peaks_; }

 private:
  PvParams params_;
  std::size_t bins_;
  PhaseAccumulator acc_;
  std::vector<double> prev_phase_;
  PeakSet last_peaks_;
  bool started_ = false;
};

/// Time-scales `signal` by beta with the peak-locked vocoder. The window's
/// length is the frame length and must not exceed params.fft_size.
inline AudioBuffer pv_stretch(const AudioBuffer& signal, double beta, const PvParams& params, const Window& window) {
  params.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::NonPositiveTarget, "pv_stretch: beta must be positive");
  if (window.size() > params.fft_size) throw Error(ErrorCode::InvalidValue, "window longer than FFT size");
  const std::size_t frame_len = window.size();
  if (signal.size() < std::max(frame_len, params.fft_size)) {
    throw Error(ErrorCode::SignalTooShort, "pv_stretch: signal has " + std::to_string(signal.size()) +
                                               " samples, needs at least " + std::to_string(params.fft_size));
  }
  const std::span<const double> x = signal.samples();
  const std::size_t out_len = detail::target_length(x.size(), beta);
  if (out_len < frame_len) {
    return AudioBuffer(detail::short_crossfade(x, out_len), signal.sample_rate_hz());
  }
  // Pad both sides by half a frame so every output sample sits under some
  // frame centre. A rotated frame no longer tapers like the window, and
  // dividing its edge by w^2 would blow up where only one frame covers.
  // With pad = N/2 the frame-centre map is exactly t_out = beta * t_in.
  const std::size_t pad = frame_len / 2;
  std::vector<double> padded(x.size() + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + static_cast<std::ptrdiff_t>(pad));
  const auto grid = detail::frame_schedule(padded.size(), out_len + 2 * pad, frame_len, params.analysis_hop(beta),
                                           params.synthesis_hop(beta));
  PeakLockedVocoder vocoder(params);
  OverlapAdder ola(out_len + 2 * pad, window);
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const std::size_t ra = m > 0 ? grid[m].analysis - grid[m - 1].analysis : 0;
    const std::size_t rs = m > 0 ? grid[m].synthesis - grid[m - 1].synthesis : 0;
    const auto spectrum = analyze_frame(padded, grid[m].analysis, window, params.fft_size);
    auto frame = ifft_real(vocoder.process(spectrum, ra, rs));
    frame.resize(frame_len);
    ola.add(grid[m].synthesis, frame);
  }
  auto out = std::move(ola).finish();
  return AudioBuffer(std::vector<double>(out.begin() + static_cast<std::ptrdiff_t>(pad),
                                         out.begin() + static_cast<std::ptrdiff_t>(pad + out_len)),
                     signal.sample_rate_hz());
}

inline AudioBuffer pv_stretch(const AudioBuffer& signal, double beta, const PvParams& params) {
  return pv_stretch(signal, beta, params, make_window(WindowKind::Hann, params.fft_size));
}

}  // namespace tsm
