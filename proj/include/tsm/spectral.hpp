#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/error.hpp"

namespace tsm {

enum class WindowKind { Hann, Rectangular };

/// Symmetric analysis/synthesis window.
class Window {
 public:
  Window(WindowKind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

  WindowKind kind() const noexcept { return kind_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }

 private:
  WindowKind kind_;
  std::vector<double> weights_;
};

inline Window make_window(WindowKind kind, std::size_t length) {
  if (length < 2) {
    throw Error(ErrorCode::LengthTooSmall, "window length must be at least 2");
  }
  std::vector<double> w(length, 1.0);
  if (kind == WindowKind::Hann) {
    const double denom = static_cast<double>(length - 1);
    for (std::size_t i = 0; i < length; ++i) {
      w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
    }
    // cos is not exactly symmetric in floating point; mirror the first half
    for (std::size_t i = 0; i < length / 2; ++i) {
      w[length - 1 - i] = w[i];
    }
  }
  return Window(kind, std::move(w));
}

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT. `inverse` uses the conjugate kernel and
/// scales by 1/N.
inline void fft_inplace(std::span<std::complex<double>> data, bool inverse = false) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::NotPowerOfTwo, "FFT size " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const double step = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t k = 0; k < half; ++k) {
      // direct twiddles rather than a recurrence: keeps error at ~1e-15 for large N
      const std::complex<double> tw = std::polar(1.0, step * static_cast<double>(k));
      for (std::size_t start = 0; start < n; start += len) {
        const std::complex<double> u = data[start + k];
        const std::complex<double> v = data[start + k + half] * tw;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& x : data) x *= scale;
  }
}

/// One-sided spectrum of a real frame: fft_size/2 + 1 bins.
struct ComplexSpectrum {
  std::vector<std::complex<double>> bins;
  std::size_t fft_size = 0;
};

inline ComplexSpectrum fft_real(std::span<const double> frame, std::size_t fft_size) {
  if (!is_power_of_two(fft_size)) {
    throw Error(ErrorCode::NotPowerOfTwo, "FFT size " + std::to_string(fft_size) + " is not a power of two");
  }
  if (frame.size() > fft_size) {
    throw Error(ErrorCode::InvalidValue, "frame longer than FFT size");
  }
  std::vector<std::complex<double>> buf(fft_size);
  std::copy(frame.begin(), frame.end(), buf.begin());
  fft_inplace(buf);
  buf.resize(fft_size / 2 + 1);
  return {std::move(buf), fft_size};
}

/// Inverse of fft_real; returns fft_size real samples. The missing half of
/// the spectrum is rebuilt by conjugate symmetry.
inline std::vector<double> ifft_real(const ComplexSpectrum& spectrum) {
  const std::size_t n = spectrum.fft_size;
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::NotPowerOfTwo, "FFT size " + std::to_string(n) + " is not a power of two");
  }
  if (spectrum.bins.size() != n / 2 + 1) {
    throw Error(ErrorCode::LengthMismatch, "one-sided spectrum must have fft_size/2 + 1 bins");
  }
  std::vector<std::complex<double>> buf(n);
  for (std::size_t k = 0; k <= n / 2; ++k) buf[k] = spectrum.bins[k];
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(spectrum.bins[n - k]);
  if (n >= 2) {
    // DC and Nyquist of a real signal are real
    buf[0] = {buf[0].real(), 0.0};
    buf[n / 2] = {buf[n / 2].real(), 0.0};
  }
  fft_inplace(buf, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

/// Windowed one-sided spectrum of signal[start, start + window.size()).
inline ComplexSpectrum analyze_frame(std::span<const double> signal, std::size_t start,
                                     const Window& window, std::size_t fft_size) {
  std::vector<double> frame(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    frame[i] = start + i < signal.size() ? signal[start + i] * window[i] : 0.0;
  }
  return fft_real(frame, fft_size);
}

inline std::vector<ComplexSpectrum> stft(const AudioBuffer& signal, const Window& window, std::size_t hop,
                                         std::size_t fft_size = 0) {
  if (hop == 0) {
    throw Error(ErrorCode::InvalidValue, "hop must be at least 1");
  }
  if (fft_size == 0) fft_size = next_power_of_two(window.size());
  if (window.size() > fft_size) {
    throw Error(ErrorCode::InvalidValue, "window longer than FFT size");
  }
  if (signal.size() < window.size()) {
    throw Error(ErrorCode::SignalShorterThanWindow, "signal has " + std::to_string(signal.size()) +
                                                        " samples, window needs " +
                                                        std::to_string(window.size()));
  }
  const std::size_t count = (signal.size() - window.size()) / hop + 1;
  std::vector<ComplexSpectrum> frames;
  frames.reserve(count);
  for (std::size_t u = 0; u < count; ++u) {
    frames.push_back(analyze_frame(signal.samples(), u * hop, window, fft_size));
  }
  return frames;
}

inline constexpr double kOlaNormFloor = 1e-12;

/// Weighted overlap-add accumulator. Each added frame is multiplied by the
/// synthesis window; finish() divides by the accumulated squared window so
/// frames that were also analysis-windowed come back at unit gain.
class OverlapAdder {
 public:
  OverlapAdder(std::size_t length, const Window& window)
      : window_(&window), sum_(length, 0.0), norm_(length, 0.0) {}

  void add(std::size_t position, std::span<const double> frame) {
    const std::size_t n = std::min(frame.size(), window_->size());
    for (std::size_t i = 0; i < n && position + i < sum_.size(); ++i) {
      const double w = (*window_)[i];
      sum_[position + i] += w * frame[i];
      norm_[position + i] += w * w;
    }
  }

  std::vector<double> finish() && {
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      sum_[i] /= std::max(norm_[i], kOlaNormFloor);
    }
    return std::move(sum_);
  }

 private:
  const Window* window_;
  std::vector<double> sum_;
  std::vector<double> norm_;
};

inline AudioBuffer istft_overlap_add(std::span<const ComplexSpectrum> frames, const Window& window,
                                     std::size_t hop, int sample_rate_hz) {
  if (frames.empty()) {
    throw Error(ErrorCode::EmptyFrames, "no frames to synthesize");
  }
  if (hop == 0) {
    throw Error(ErrorCode::InvalidValue, "hop must be at least 1");
  }
  OverlapAdder ola((frames.size() - 1) * hop + window.size(), window);
  for (std::size_t u = 0; u < frames.size(); ++u) {
    ola.add(u * hop, ifft_real(frames[u]));
  }
  return AudioBuffer(std::move(ola).finish(), sample_rate_hz);
}

}  // namespace tsm
