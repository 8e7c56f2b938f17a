#pragma once

// seg_modify: stretch the planned ranges of a signal and splice them back
// between the untouched ranges. Joins are butt-spliced so every unselected
// sample reaches the output unchanged.

#include <algorithm>
#include <cstddef>
#include <future>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsm/core_types.hpp"
#include "tsm/error.hpp"
#include "tsm/ola.hpp"
#include "tsm/phase_vocoder.hpp"
#include "tsm/wsola.hpp"

namespace tsm {

enum class AlgoKind { OLA, SOLA, SOLAFS, WSOLA, PhaseVocoder };

inline std::string_view algo_name(AlgoKind kind) {
  switch (kind) {
    case AlgoKind::OLA: return "ola";
    case AlgoKind::SOLA: return "sola";
    case AlgoKind::SOLAFS: return "solafs";
    case AlgoKind::WSOLA: return "wsola";
    case AlgoKind::PhaseVocoder: return "pv";
  }
  return "ola";
}

inline AlgoKind parse_algo(std::string_view name) {
  for (AlgoKind k : {AlgoKind::OLA, AlgoKind::SOLA, AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder}) {
    if (algo_name(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidValue, "unknown algorithm '" + std::string(name) +
                                           "' (expected ola, sola, solafs, wsola or pv)");
}

struct AlgoChoice {
  AlgoKind kind = AlgoKind::WSOLA;
  std::variant<TsmParams, PvParams> params = TsmParams{};
  SimilarityMeasure measure = SimilarityMeasure::NormalizedCrossCorrelation;

  static AlgoChoice defaults(AlgoKind kind, int sample_rate_hz) {
    AlgoChoice c;
    c.kind = kind;
    if (kind == AlgoKind::PhaseVocoder) {
      // 2048 at 16 kHz, scaled with the rate
      const auto target = static_cast<std::size_t>(2048.0 * sample_rate_hz / 16000.0);
      c.params = PvParams::for_fft_size(std::max<std::size_t>(64, next_power_of_two(target)));
    } else {
      c.params = TsmParams::for_sample_rate(sample_rate_hz);
    }
    return c;
  }

  void validate() const {
    const bool wants_pv = kind == AlgoKind::PhaseVocoder;
    if (wants_pv != std::holds_alternative<PvParams>(params)) {
      throw Error(ErrorCode::InvalidValue, std::string("parameter set does not match algorithm ") +
                                               std::string(algo_name(kind)));
    }
    std::visit([](const auto& p) { p.validate(); }, params);
  }

  /// Shortest input the algorithm accepts.
  std::size_t min_input_length() const {
    if (const auto* pv = std::get_if<PvParams>(&params)) return pv->fft_size;
    const auto& p = std::get<TsmParams>(params);
    switch (kind) {
      case AlgoKind::SOLAFS: return p.window_len + p.k_max;
      case AlgoKind::WSOLA: return p.window_len + 2 * p.k_max;
      default: return p.window_len;
    }
  }

  /// Frame length, the unit of the length-error budget.
  std::size_t frame_length() const {
    if (const auto* pv = std::get_if<PvParams>(&params)) return pv->fft_size;
    return std::get<TsmParams>(params).window_len;
  }
};

/// Uniformly stretches a whole buffer with the chosen algorithm.
inline AudioBuffer stretch(const AudioBuffer& signal, double beta, const AlgoChoice& algo) {
  algo.validate();
  switch (algo.kind) {
    case AlgoKind::OLA: return ola_stretch(signal, beta, std::get<TsmParams>(algo.params));
    case AlgoKind::SOLA: return sola_stretch(signal, beta, std::get<TsmParams>(algo.params));
    case AlgoKind::SOLAFS: return solafs_stretch(signal, beta, std::get<TsmParams>(algo.params));
    case AlgoKind::WSOLA: return wsola_stretch(signal, beta, std::get<TsmParams>(algo.params), algo.measure);
    case AlgoKind::PhaseVocoder: return pv_stretch(signal, beta, std::get<PvParams>(algo.params));
  }
  throw Error(ErrorCode::InvalidValue, "unknown algorithm");
}

/// Output length if every stretched range came out at round(beta * length).
inline std::size_t predicted_length(std::size_t signal_len, const ScalePlan& plan) {
  std::size_t total = signal_len;
  for (const auto& e : plan.entries) {
    total = total - e.length() + detail::target_length(e.length(), e.beta);
  }
  return total;
}

struct ModifyOptions {
  bool parallel = false;
};

/// Applies `plan` to `signal`. Entries with beta == 1 are copied verbatim, as
/// are entries shorter than the algorithm's minimum input (with a warning).
/// The result is identical whether or not segments run in parallel.
inline AudioBuffer seg_modify(const AudioBuffer& signal, const ScalePlan& plan, const AlgoChoice& algo,
                              const ModifyOptions& options = {}, std::vector<std::string>* warnings = nullptr) {
  plan.validate(signal.size());
  algo.validate();
  const std::span<const double> x = signal.samples();

  enum class Action { Copy, Stretch };
  std::vector<Action> actions;
  actions.reserve(plan.entries.size());
  for (const auto& e : plan.entries) {
    if (e.beta == 1.0) {
      actions.push_back(Action::Copy);
    } else if (e.length() < algo.min_input_length()) {
      actions.push_back(Action::Copy);
      if (warnings) {
        warnings->push_back(std::string(to_string(ErrorCode::SegmentTooShortForAlgo)) + ": segment [" +
                            std::to_string(e.start_sample) + ", " + std::to_string(e.end_sample) + ") has " +
                            std::to_string(e.length()) + " samples, " + std::string(algo_name(algo.kind)) +
                            " needs " + std::to_string(algo.min_input_length()) + "; copied unmodified");
      }
    } else {
      actions.push_back(Action::Stretch);
    }
  }

  const auto run = [&](std::size_t i) {
    const auto& e = plan.entries[i];
    return stretch(signal.slice(e.start_sample, e.end_sample), e.beta, algo).data();
  };

  std::vector<std::vector<double>> stretched(plan.entries.size());
  if (options.parallel) {
    std::vector<std::future<std::vector<double>>> jobs(plan.entries.size());
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      if (actions[i] == Action::Stretch) jobs[i] = std::async(std::launch::async, run, i);
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].valid()) stretched[i] = jobs[i].get();
    }
  } else {
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      if (actions[i] == Action::Stretch) stretched[i] = run(i);
    }
  }

  std::vector<double> out;
  out.reserve(predicted_length(x.size(), plan));
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < plan.entries.size(); ++i) {
    const auto& e = plan.entries[i];
    out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(cursor),
               x.begin() + static_cast<std::ptrdiff_t>(e.start_sample));
    if (actions[i] == Action::Stretch) {
      out.insert(out.end(), stretched[i].begin(), stretched[i].end());
    } else {
      out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(e.start_sample),
                 x.begin() + static_cast<std::ptrdiff_t>(e.end_sample));
    }
    cursor = e.end_sample;
  }
  out.insert(out.end(), x.begin() + static_cast<std::ptrdiff_t>(cursor), x.end());
  return AudioBuffer(std::move(out), signal.sample_rate_hz());
}

}  // namespace tsm
