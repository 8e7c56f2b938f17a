// tsm: segmental time-scale modification of speech.
//
//   tsm modify  --in a.wav --out b.wav --contour c.json --algo wsola
//   tsm compare --in a.wav --contour c.json --report metrics.csv --psd-out psd/
//   tsm psd     --in a.wav --out a_psd.csv

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsm/cli.hpp"

namespace {

void add_tuning_flags(CLI::App& sub, tsm::cli::CliConfig& cfg) {
  sub.add_option("--window-ms", cfg.window_ms, "OLA-family window length in ms")->capture_default_str();
  sub.add_option("--hop-ms", cfg.hop_ms, "OLA-family nominal hop in ms (default: half the window)");
  sub.add_option("--kmax-ms", cfg.kmax_ms, "maximum similarity-search shift in ms")->capture_default_str();
  sub.add_option("--fft-size", cfg.fft_size, "phase vocoder FFT size (power of two)")->capture_default_str();
  sub.add_option("--pv-hop", cfg.pv_hop, "phase vocoder nominal hop in samples (default: fft-size/4)");
  sub.add_option("--alpha", cfg.alpha, "phase vocoder quadratic frequency-mapping coefficient")->capture_default_str();
  sub.add_flag("--quadratic-mapping", cfg.quadratic_mapping,
               "use the quadratic frequency shift alpha*w^2 + w*(beta-1) instead of the linear one");
  sub.add_option("--measure", cfg.measure, "WSOLA similarity measure")
      ->check(CLI::IsMember({"xcorr", "nxcorr", "amdf"}))
      ->capture_default_str();
  sub.add_option("--seed", cfg.seed, "reserved");
  sub.add_flag("--parallel", cfg.parallel, "stretch independent segments concurrently");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segmental time-scale modification of speech (OLA, SOLA, SOLAFS, WSOLA, phase vocoder)"};
  app.require_subcommand(1);

  tsm::cli::CliConfig modify_cfg;
  modify_cfg.subcommand = tsm::cli::Subcommand::Modify;
  std::string modify_algo = "wsola";
  auto* modify = app.add_subcommand("modify", "apply a contour to a WAV file with one algorithm");
  modify->add_option("--in", modify_cfg.input, "input WAV")->required();
  modify->add_option("--out", modify_cfg.output, "output WAV")->required();
  modify->add_option("--contour", modify_cfg.contour, "contour JSON")->required();
  modify->add_option("--algo", modify_algo, "ola|sola|solafs|wsola|pv")
      ->check(CLI::IsMember({"ola", "sola", "solafs", "wsola", "pv"}))
      ->capture_default_str();
  add_tuning_flags(*modify, modify_cfg);

  tsm::cli::CliConfig compare_cfg;
  compare_cfg.subcommand = tsm::cli::Subcommand::Compare;
  compare_cfg.algos = {"ola", "sola", "solafs", "wsola", "pv"};
  auto* compare = app.add_subcommand("compare", "run several algorithms on one input and report metrics");
  compare->add_option("--in", compare_cfg.input, "input WAV")->required();
  compare->add_option("--contour", compare_cfg.contour, "contour JSON")->required();
  compare->add_option("--algo", compare_cfg.algos, "comma-separated algorithms")
      ->delimiter(',')
      ->check(CLI::IsMember({"ola", "sola", "solafs", "wsola", "pv"}));
  compare->add_option("--report", compare_cfg.report, "metrics CSV (default: stdout)");
  compare->add_option("--psd-out", compare_cfg.psd_out, "directory for per-algorithm PSD CSVs");
  compare->add_option("--out", compare_cfg.output, "directory for per-algorithm output WAVs");
  add_tuning_flags(*compare, compare_cfg);

  tsm::cli::CliConfig psd_cfg;
  psd_cfg.subcommand = tsm::cli::Subcommand::Psd;
  auto* psd = app.add_subcommand("psd", "Welch PSD of a WAV file as CSV");
  psd->add_option("--in", psd_cfg.input, "input WAV")->required();
  psd->add_option("--out", psd_cfg.output, "output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tsm::cli::kValidationError;
  }

  if (modify->parsed()) {
    modify_cfg.algos = {modify_algo};
    return tsm::cli::run(modify_cfg, std::cout, std::cerr);
  }
  if (compare->parsed()) return tsm::cli::run(compare_cfg, std::cout, std::cerr);
  return tsm::cli::run(psd_cfg, std::cout, std::cerr);
}
