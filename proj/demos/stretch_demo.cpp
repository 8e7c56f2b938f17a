// Stretches a synthetic vowel-like tone with every algorithm and prints the
// resulting lengths and metrics. No files are read or written.
//
//   ./stretch_demo [beta]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "tsm/tsm.hpp"

int main(int argc, char** argv) {
  const double beta = argc > 1 ? std::atof(argv[1]) : 1.5;
  constexpr int fs = 16000;

  std::vector<double> x(2 * fs);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = 0.5 * std::sin(2 * std::numbers::pi * 140 * t) + 0.2 * std::sin(2 * std::numbers::pi * 280 * t) +
           0.1 * std::sin(2 * std::numbers::pi * 700 * t);
  }
  const tsm::AudioBuffer input(std::move(x), fs);

  try {
    std::printf("beta %.3f, input %zu samples\n", beta, input.size());
    std::printf("%-7s %9s %12s %12s %10s\n", "algo", "samples", "loss", "psd_diff", "ms");
    for (auto kind : {tsm::AlgoKind::OLA, tsm::AlgoKind::SOLA, tsm::AlgoKind::SOLAFS, tsm::AlgoKind::WSOLA,
                      tsm::AlgoKind::PhaseVocoder}) {
      const auto algo = tsm::AlgoChoice::defaults(kind, fs);
      tsm::AudioBuffer out = tsm::stretch(input, beta, algo);
      const double ms = tsm::time_execution([&] { out = tsm::stretch(input, beta, algo); });
      std::printf("%-7s %9zu %12.5f %12.3e %10.2f\n", std::string(tsm::algo_name(kind)).c_str(), out.size(),
                  tsm::energy_loss(input, out).linear, tsm::psd_difference(input, out), ms);
    }
  } catch (const tsm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
