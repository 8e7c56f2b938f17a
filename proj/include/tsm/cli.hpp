#pragma once

// Subcommand bodies for the `tsm` command-line tool. Argument parsing lives
// in tools/tsm.cpp; everything here takes a filled CliConfig and reports
// through the given streams so it can be driven from tests.

#include <cmath>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "tsm/audio_io.hpp"
#include "tsm/core_types.hpp"
#include "tsm/error.hpp"
#include "tsm/metrics.hpp"
#include "tsm/pipeline.hpp"

namespace tsm::cli {

enum class Subcommand { Modify, Compare, Psd };

enum ExitCode : int { kSuccess = 0, kIoError = 1, kValidationError = 2 };

struct CliConfig {
  Subcommand subcommand = Subcommand::Modify;
  std::filesystem::path input;
  std::filesystem::path output;   // modify: WAV file; compare: directory for per-algorithm WAVs; psd: CSV
  std::filesystem::path contour;
  std::vector<std::string> algos = {"wsola"};
  double window_ms = 25.0;
  double hop_ms = 0.0;  // 0: half the window
  double kmax_ms = 10.0;
  std::size_t fft_size = 2048;
  std::size_t pv_hop = 0;  // 0: fft_size / 4
  double alpha = 0.0;
  bool quadratic_mapping = false;
  std::string measure = "nxcorr";
  std::filesystem::path report;   // compare: metrics CSV (stdout when empty)
  std::filesystem::path psd_out;  // compare: directory for per-algorithm PSD CSVs
  unsigned seed = 0;              // reserved
  bool parallel = false;
};

inline AlgoChoice algo_from_config(const CliConfig& config, AlgoKind kind, int sample_rate_hz) {
  AlgoChoice algo;
  algo.kind = kind;
  algo.measure = parse_measure(config.measure);
  if (kind == AlgoKind::PhaseVocoder) {
    PvParams p = PvParams::for_fft_size(config.fft_size);
    if (config.pv_hop > 0) p.hop = config.pv_hop;
    p.alpha = config.alpha;
    p.large_fft_low_rate = !config.quadratic_mapping;
    algo.params = p;
  } else {
    TsmParams p = TsmParams::for_sample_rate(sample_rate_hz, config.window_ms, config.kmax_ms);
    if (config.hop_ms > 0.0) {
      p.hop = static_cast<std::size_t>(std::llround(config.hop_ms * 1e-3 * sample_rate_hz));
    }
    algo.params = p;
  }
  algo.validate();
  return algo;
}

namespace detail {

struct Job {
  DecodedWav input;
  ScalePlan plan;
};

inline Job load_job(const CliConfig& config, std::ostream& err) {
  if (config.input.empty()) throw Error(ErrorCode::InvalidValue, "--in is required");
  if (config.contour.empty()) throw Error(ErrorCode::InvalidValue, "--contour is required");
  DecodedWav wav = read_wav_file(config.input);
  const ContourSpec contour = read_contour_file(config.contour);
  std::vector<std::string> warnings;
  ScalePlan plan = resolve_plan(wav.audio.size(), wav.audio.sample_rate_hz(), contour.segments, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return {std::move(wav), std::move(plan)};
}

inline AudioBuffer modify(const Job& job, const AlgoChoice& algo, bool parallel, std::ostream& err) {
  std::vector<std::string> warnings;
  AudioBuffer out = seg_modify(job.input.audio, job.plan, algo, ModifyOptions{parallel}, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return out;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kIoError : kValidationError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

inline WelchParams welch_for(std::size_t len_a, std::size_t len_b) {
  WelchParams p;
  const std::size_t shortest = std::min(len_a, len_b);
  while (p.segment_len > shortest && p.segment_len > 2) {
    p.segment_len /= 2;
    p.fft_size /= 2;
  }
  return p;
}

}  // namespace detail

/// modify: apply the contour with one algorithm and write the result in the
/// input's sample format.
inline int run_modify(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (config.output.empty()) throw Error(ErrorCode::InvalidValue, "--out is required");
    if (config.algos.size() != 1) throw Error(ErrorCode::InvalidValue, "modify takes exactly one --algo");
    const AlgoKind kind = parse_algo(config.algos.front());
    const auto job = detail::load_job(config, err);
    const AlgoChoice algo = algo_from_config(config, kind, job.input.audio.sample_rate_hz());
    const AudioBuffer result = detail::modify(job, algo, config.parallel, err);
    write_wav(config.output, result, job.input.format);

    out << "algorithm: " << algo_name(kind) << '\n';
    for (const auto& e : job.plan.entries) {
      const double fs = job.input.audio.sample_rate_hz();
      out << "segment " << e.start_sample / fs << "-" << e.end_sample / fs << " s: beta " << e.beta << '\n';
    }
    out << "output duration: " << result.duration_seconds() << " s\n";
    return static_cast<int>(kSuccess);
  });
}

/// compare: run every requested algorithm on the same input, contour and
/// parameters; write the metrics CSV and optional PSD / WAV outputs.
inline int run_compare(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    std::vector<AlgoKind> kinds;
    for (const auto& name : config.algos) kinds.push_back(parse_algo(name));
    if (kinds.empty()) throw Error(ErrorCode::InvalidValue, "no algorithms requested");
    const auto job = detail::load_job(config, err);
    const AudioBuffer& original = job.input.audio;

    if (!config.output.empty()) std::filesystem::create_directories(config.output);
    if (!config.psd_out.empty()) std::filesystem::create_directories(config.psd_out);

    std::vector<MetricsReport> reports;
    for (const AlgoKind kind : kinds) {
      const AlgoChoice algo = algo_from_config(config, kind, original.sample_rate_hz());
      const AudioBuffer result = detail::modify(job, algo, false, err);
      // timing always single-threaded
      const double ms = time_execution([&] {
        const AudioBuffer r = seg_modify(original, job.plan, algo);
        (void)r;
      });
      const WelchParams welch = detail::welch_for(original.size(), result.size());
      const auto loss = energy_loss(original, result);
      reports.push_back({std::string(algo_name(kind)), loss.linear, loss.db, psd_difference(original, result, welch), ms});

      if (!config.output.empty()) {
        write_wav(config.output / (std::string(algo_name(kind)) + ".wav"), result, job.input.format);
      }
      if (!config.psd_out.empty()) {
        const auto path = config.psd_out / ("psd_" + std::string(algo_name(kind)) + ".csv");
        std::ofstream csv(path);
        if (!csv) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
        const Psd a = welch_psd(original, welch);
        const Psd b = welch_psd(result, welch);
        csv << "freq,psd_original,psd_modified\n";
        for (std::size_t k = 0; k < a.freqs.size(); ++k) {
          csv << tsm::detail::format_number(a.freqs[k]) << ',' << tsm::detail::format_number(a.psd[k]) << ','
              << tsm::detail::format_number(b.psd[k]) << '\n';
        }
        if (!csv) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
      }
    }

    if (config.report.empty()) {
      write_report_csv(out, reports);
    } else {
      std::ofstream csv(config.report);
      if (!csv) throw Error(ErrorCode::Io, "cannot open '" + config.report.string() + "' for writing");
      write_report_csv(csv, reports);
      if (!csv) throw Error(ErrorCode::Io, "write failed for '" + config.report.string() + "'");
      out << "wrote " << reports.size() << " rows to " << config.report.string() << '\n';
    }
    return static_cast<int>(kSuccess);
  });
}

/// psd: Welch PSD of the input as freq,psd CSV (to --out, or stdout).
inline int run_psd(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    if (config.input.empty()) throw Error(ErrorCode::InvalidValue, "--in is required");
    const AudioBuffer audio = read_wav(config.input);
    const Psd psd = welch_psd(audio, detail::welch_for(audio.size(), audio.size()));
    std::ofstream file;
    if (!config.output.empty()) {
      file.open(config.output);
      if (!file) throw Error(ErrorCode::Io, "cannot open '" + config.output.string() + "' for writing");
    }
    std::ostream& os = config.output.empty() ? out : file;
    os << "freq,psd\n";
    for (std::size_t k = 0; k < psd.freqs.size(); ++k) {
      os << tsm::detail::format_number(psd.freqs[k]) << ',' << tsm::detail::format_number(psd.psd[k]) << '\n';
    }
    if (!os) throw Error(ErrorCode::Io, "write failed");
    return static_cast<int>(kSuccess);
  });
}

inline int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.subcommand) {
    case Subcommand::Modify: return run_modify(config, out, err);
    case Subcommand::Compare: return run_compare(config, out, err);
    case Subcommand::Psd: return run_psd(config, out, err);
  }
  return kValidationError;
}

}  // namespace tsm::cli
