#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/error.hpp"
#include "tsm/spectral.hpp"

namespace tsm {

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double energy(const AudioBuffer& signal) { return energy(signal.samples()); }

struct EnergyLoss {
  double linear = 0.0;       // E_in - E_out, authoritative
  std::optional<double> db;  // 10 log10(E_in / E_out); empty when undefined
};

/// E_in - E_out over each signal's full length, plus the ratio in dB
/// (positive = energy lost). The dB value is empty when either energy is
/// zero (and the other is not); see energy_loss_db for a throwing variant.
inline EnergyLoss energy_loss(const AudioBuffer& original, const AudioBuffer& modified) {
  const double e_in = energy(original);
  const double e_out = energy(modified);
  EnergyLoss loss{e_in - e_out, std::nullopt};
  if (e_in == 0.0 && e_out == 0.0) {
    loss.db = 0.0;
  } else if (e_in > 0.0 && e_out > 0.0) {
    loss.db = 10.0 * std::log10(e_in / e_out);
  }
  return loss;
}

inline double energy_loss_db(const AudioBuffer& original, const AudioBuffer& modified) {
  const auto loss = energy_loss(original, modified);
  if (!loss.db) throw Error(ErrorCode::ZeroEnergyOutput, "energy ratio undefined for a silent signal");
  return *loss.db;
}

struct WelchParams {
  std::size_t segment_len = 1024;
  double overlap = 0.5;
  WindowKind window = WindowKind::Hann;
  std::size_t fft_size = 1024;

  void validate() const {
    if (segment_len < 2) throw Error(ErrorCode::InvalidValue, "Welch segment length must be at least 2");
    if (!is_power_of_two(fft_size)) throw Error(ErrorCode::NotPowerOfTwo, "Welch FFT size must be a power of two");
    if (segment_len > fft_size) throw Error(ErrorCode::InvalidValue, "Welch segment longer than FFT size");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw Error(ErrorCode::InvalidValue, "Welch overlap must lie in [0, 1)");
  }
};

struct Psd {
  std::vector<double> freqs;  // Hz
  std::vector<double> psd;    // power / Hz, one-sided
};

/// Averaged modified periodogram (density scaling, one-sided, interior bins
/// doubled). Segments start every segment_len * (1 - overlap) samples; no
/// partial trailing segment.
inline Psd welch_psd(const AudioBuffer& signal, const WelchParams& params = {}) {
  params.validate();
  if (signal.size() < params.segment_len) {
    throw Error(ErrorCode::SignalTooShort, "Welch PSD needs at least " + std::to_string(params.segment_len) +
                                               " samples, got " + std::to_string(signal.size()));
  }
  const Window window = make_window(params.window, params.segment_len);
  double window_power = 0.0;
  for (double w : window.weights()) window_power += w * w;
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(params.segment_len) * (1.0 - params.overlap))));
  const std::size_t nfft = params.fft_size;
  const std::size_t bins = nfft / 2 + 1;
  const double fs = signal.sample_rate_hz();

  Psd out;
  out.psd.assign(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + params.segment_len <= signal.size(); start += hop) {
    const auto spectrum = analyze_frame(signal.samples(), start, window, nfft);
    for (std::size_t k = 0; k < bins; ++k) out.psd[k] += std::norm(spectrum.bins[k]);
    ++segments;
  }
  const double scale = 1.0 / (fs * window_power * static_cast<double>(segments));
  out.freqs.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.psd[k] *= scale;
    if (k != 0 && k != nfft / 2) out.psd[k] *= 2.0;
    out.freqs[k] = fs * static_cast<double>(k) / static_cast<double>(nfft);
  }
  return out;
}

/// Mean absolute difference of the two one-sided Welch PSDs.
inline double psd_difference(const AudioBuffer& original, const AudioBuffer& modified, const WelchParams& params = {}) {
  if (original.sample_rate_hz() != modified.sample_rate_hz()) {
    throw Error(ErrorCode::SampleRateMismatch, "PSD difference needs equal sample rates");
  }
  const Psd a = welch_psd(original, params);
  const Psd b = welch_psd(modified, params);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.psd.size(); ++k) acc += std::abs(a.psd[k] - b.psd[k]);
  return acc / static_cast<double>(a.psd.size());
}

/// Wall-clock milliseconds of `run`: one warm-up call, then the median of
/// `repetitions` timed calls. Call from one thread with nothing else running.
template <class F>
double time_execution(F&& run, int repetitions = 5) {
  using clock = std::chrono::steady_clock;
  run();
  std::vector<double> ms;
  ms.reserve(static_cast<std::size_t>(std::max(repetitions, 1)));
  for (int i = 0; i < std::max(repetitions, 1); ++i) {
    const auto t0 = clock::now();
    run();
    const auto t1 = clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  const std::size_t mid = ms.size() / 2;
  return ms.size() % 2 ? ms[mid] : 0.5 * (ms[mid - 1] + ms[mid]);
}

struct MetricsReport {
  std::string algo;
  double energy_loss_linear = 0.0;
  std::optional<double> energy_loss_db;
  double psd_difference = 0.0;
  double execution_time_ms = 0.0;
};

inline constexpr const char* kReportCsvHeader = "algo,energy_loss_linear,energy_loss_db,psd_difference,execution_time_ms";

namespace detail {

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace detail

/// One CSV row in the report schema; an undefined dB value is left empty.
inline std::string to_csv_row(const MetricsReport& r) {
  std::string row = r.algo;
  row += ',' + detail::format_number(r.energy_loss_linear);
  row += ',' + (r.energy_loss_db ? detail::format_number(*r.energy_loss_db) : std::string());
  row += ',' + detail::format_number(r.psd_difference);
  row += ',' + detail::format_number(r.execution_time_ms);
  return row;
}

inline void write_report_csv(std::ostream& os, const std::vector<MetricsReport>& reports) {
  os << kReportCsvHeader << '\n';
  for (const auto& r : reports) os << to_csv_row(r) << '\n';
}

}  // namespace tsm
