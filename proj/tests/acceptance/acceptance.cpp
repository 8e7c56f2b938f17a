// Acceptance run: one line per criterion, [PASS] / [FAIL] / [WARN].
// Exit status is nonzero if any hard criterion fails; criterion 5 only warns.
//
// Criterion 5 wants a recorded speech clip. Point TSM_SPEECH_CLIP at a mono or
// stereo WAV of at least 5 s to use one; otherwise a synthetic source-filter
// speech stand-in is used and the line says so.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "support/signals.hpp"
#include "tsm/tsm.hpp"

using namespace tsm;
namespace ts = tsm::testing;

namespace {

int g_failures = 0;

void report(bool ok, const char* id, const std::string& what, const std::string& detail) {
  std::printf("[%s] %s %s -- %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

AlgoChoice algo(AlgoKind k) { return AlgoChoice::defaults(k, 16000); }

// ---------------------------------------------------------------------------

void ac1_length_contract() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto x = ts::harmonics_with_burst(3.0);
  double worst_ratio = 0.0;  // |error| / window length
  std::string worst;
  bool ok = true;
  for (auto k : {AlgoKind::SOLA, AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder}) {
    const auto a = algo(k);
    for (double beta : {0.5, 0.75, 1.5, 2.0}) {
      const auto y = stretch(x, beta, a);
      const double err = std::abs(static_cast<double>(y.size()) - beta * static_cast<double>(x.size()));
      const double ratio = err / static_cast<double>(a.frame_length());
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = std::string(algo_name(k)) + fmt(" beta %.2f", beta);
      }
      ok = ok && ratio <= 1.0;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(ok, "AC1", "length within one window (SOLA/SOLAFS/WSOLA/PV x 4 betas)",
         fmt("worst |err|/W = %.4f", worst_ratio) + (worst.empty() ? "" : " at " + worst));
  report(secs < 10.0, "AC1", "length sweep runtime < 10 s", fmt("%.2f s", secs));
}

void ac2_pitch() {
  const auto x = ts::sine(440, 2.0);
  bool ok = true;
  std::string detail;
  for (auto k : {AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder}) {
    for (double beta : {0.5, 1.5, 2.0}) {
      const std::size_t bin = ts::dominant_bin(stretch(x, beta, algo(k)));
      const bool hit = ts::peak_within_one_bin(bin, 440);
      ok = ok && hit;
      if (!hit) detail += std::string(algo_name(k)) + fmt(" beta %.1f", beta) + fmt(" peak bin %.0f; ", double(bin));
    }
  }
  report(ok, "AC2", "440 Hz peak kept within one Welch bin (SOLAFS/WSOLA/PV, beta 0.5/1.5/2)",
         detail.empty() ? "expected bin " + std::to_string(ts::bin_of(440)) : detail);
  const std::size_t ola_bin = ts::dominant_bin(stretch(x, 1.0, algo(AlgoKind::OLA)));
  report(ts::peak_within_one_bin(ola_bin, 440), "AC2", "OLA baseline keeps 440 Hz at beta 1",
         "peak bin " + std::to_string(ola_bin));
}

void ac3_identity() {
  const auto x = ts::speech_like(3.0);
  const auto whole = resolve_plan(x.size(), 16000, std::vector<SegmentSpec>{{0.0, 3.0, Scale{1.0}}});
  bool empty_ok = true, unit_ok = true;
  for (auto k : {AlgoKind::OLA, AlgoKind::SOLA, AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder}) {
    empty_ok = empty_ok && seg_modify(x, ScalePlan{}, algo(k)) == x;
    unit_ok = unit_ok && seg_modify(x, whole, algo(k)) == x;
  }
  report(empty_ok, "AC3", "empty contour is bit-identical (all algorithms)", "exact comparison");
  report(unit_ok, "AC3", "whole-signal beta 1 is bit-identical (all algorithms)", "exact comparison");
}

void ac4_two_segment_scenario() {
  const auto x = ts::speech_like(6.0);
  const auto plan = resolve_plan(x.size(), 16000, std::vector<SegmentSpec>{{2.0, 3.0, Scale{1.5}}, {4.5, 5.0, Scale{0.5}}});
  bool len_ok = true, copy_ok = true;
  std::string detail;
  for (auto k : {AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder}) {
    const auto a = algo(k);
    const auto y = seg_modify(x, plan, a);
    const double tol = 2.0 * static_cast<double>(a.frame_length()) / 16000.0;
    len_ok = len_ok && std::abs(y.duration_seconds() - 6.25) <= tol;
    detail += std::string(algo_name(k)) + fmt(" %.4f s; ", y.duration_seconds());

    const std::size_t first = stretch(x.slice(32000, 48000), 1.5, a).size();
    const std::size_t second = stretch(x.slice(72000, 80000), 0.5, a).size();
    std::size_t dst = 0;
    const auto same = [&](std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) {
        if (y[dst++] != x[i]) return false;
      }
      return true;
    };
    bool c = same(0, 32000);
    dst += first;
    c = c && same(48000, 72000);
    dst += second;
    c = c && same(80000, x.size()) && dst == y.size();
    copy_ok = copy_ok && c;
  }
  report(len_ok, "AC4", "{2-3 s: 1.5, 4.5-5 s: 0.5} on 6 s gives 6.25 s +- 2 windows", detail);
  report(copy_ok, "AC4", "unmodified regions are sample-exact copies", "SOLAFS/WSOLA/PV");
}

void ac5_speech_ordering() {
  AudioBuffer clip = ts::speech_like(6.0);
  std::string source = "synthetic speech stand-in (set TSM_SPEECH_CLIP for a recording)";
  if (const char* path = std::getenv("TSM_SPEECH_CLIP")) {
    try {
      AudioBuffer rec = read_wav(path);
      if (rec.duration_seconds() >= 5.0) {
        clip = std::move(rec);
        source = path;
      } else {
        source += "; TSM_SPEECH_CLIP shorter than 5 s, ignored";
      }
    } catch (const Error& e) {
      source += std::string("; TSM_SPEECH_CLIP unreadable: ") + e.what();
    }
  }
  const int fs = clip.sample_rate_hz();
  const auto plan = resolve_plan(clip.size(), fs, std::vector<SegmentSpec>{{2.0, 3.0, Scale{1.5}}, {4.5, 5.0, Scale{0.5}}});

  struct Row { AlgoKind kind; double psd, loss, ms; };
  std::vector<Row> rows;
  for (auto k : {AlgoKind::SOLAFS, AlgoKind::PhaseVocoder, AlgoKind::WSOLA}) {
    const auto a = AlgoChoice::defaults(k, fs);
    const auto y = seg_modify(clip, plan, a);
    const double ms = time_execution([&] { (void)seg_modify(clip, plan, a); }, 3);
    rows.push_back({k, psd_difference(clip, y), std::abs(energy_loss(clip, y).linear), ms});
  }
  const Row& w = rows.back();
  bool psd_best = true, loss_best = true, slowest = true;
  std::string detail;
  for (const auto& r : rows) {
    if (&r != &w) {
      psd_best = psd_best && w.psd < r.psd;
      loss_best = loss_best && w.loss < r.loss;
      slowest = slowest && w.ms > r.ms;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s psd %.3e |loss| %.4f %.1f ms; ", std::string(algo_name(r.kind)).c_str(), r.psd,
                  r.loss, r.ms);
    detail += buf;
  }
  const auto soft = [&](bool ok, const std::string& what) {
    std::printf("[%s] AC5 %s (soft) -- %s[%s]\n", ok ? "PASS" : "WARN", what.c_str(), detail.c_str(), source.c_str());
  };
  soft(psd_best, "WSOLA has the smallest psd_difference of SOLAFS/PV/WSOLA");
  soft(loss_best, "WSOLA has the smallest |energy_loss_linear| of SOLAFS/PV/WSOLA");
  std::printf("[INFO] AC5 WSOLA slowest of the three: %s (reported, not asserted)\n", slowest ? "yes" : "no");
}

// ---------------------------------------------------------------------------

void ac6_oracles() {
  // FFT vs naive DFT
  double fft_err = 0.0;
  for (std::size_t n = 1; n <= 64; n *= 2) {
    const auto re = ts::random_vector(n, 10 + static_cast<unsigned>(n));
    const auto im = ts::random_vector(n, 20 + static_cast<unsigned>(n));
    std::vector<std::complex<double>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {re[i], im[i]};
    auto got = x;
    fft_inplace(got);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<long double> acc = 0;
      for (std::size_t t = 0; t < n; ++t) {
        const long double ang = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * t) % n) / n;
        acc += std::complex<long double>(x[t].real(), x[t].imag()) * std::complex<long double>(std::cos(ang), std::sin(ang));
      }
      fft_err = std::max(fft_err, std::abs(got[k] - std::complex<double>(double(acc.real()), double(acc.imag()))));
    }
  }
  report(fft_err < 1e-9, "AC6", "FFT matches naive DFT for sizes 1..64", fmt("max error %.2e", fft_err));

  // normalized_xcorr vs direct summation
  std::mt19937 rng(6);
  double ncc_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 256;
    const auto a = ts::random_vector(n, 2000 + trial);
    const auto b = ts::random_vector(n, 9000 + trial);
    long double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ab += static_cast<long double>(a[i]) * b[i];
      aa += static_cast<long double>(a[i]) * a[i];
      bb += static_cast<long double>(b[i]) * b[i];
    }
    ncc_err = std::max(ncc_err, std::abs(normalized_xcorr(a, b) - static_cast<double>(ab / std::sqrt(aa * bb))));
  }
  report(ncc_err < 1e-12, "AC6", "normalized_xcorr matches direct summation on 1000 random pairs",
         fmt("max error %.2e", ncc_err));

  // select_shift argmax vs exhaustive scan
  int mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k_max = 1 + rng() % 64;
    const std::size_t ov = 2 + rng() % 100;
    const auto ctx = ts::random_vector(k_max + ov, 40000 + trial);
    const auto y = ts::random_vector(ov, 50000 + trial);
    std::size_t want = 0;
    double best = -2.0;
    for (std::size_t k = 0; k <= k_max; ++k) {
      double xy = 0, xx = 0, yy = 0;
      for (std::size_t i = 0; i < ov; ++i) {
        xy += ctx[k + i] * y[i];
        xx += ctx[k + i] * ctx[k + i];
        yy += y[i] * y[i];
      }
      const double r = xy / std::sqrt(xx * yy);
      if (r > best) {
        best = r;
        want = k;
      }
    }
    mismatches += select_shift(-1, 0, 0, k_max, ctx, y).shift != want;
  }
  report(mismatches == 0, "AC6", "select_shift argmax matches exhaustive scan (500 cases)",
         std::to_string(mismatches) + " mismatches");

  // Welch integral vs variance
  double worst = 0.0;
  for (unsigned trial = 0; trial < 20; ++trial) {
    const double sigma = 0.1 + 0.05 * trial;
    const auto noise = ts::white_noise(32000, sigma, 300 + trial);
    const auto p = welch_psd(noise);
    double integral = 0.0;
    for (double v : p.psd) integral += v * (p.freqs[1] - p.freqs[0]);
    worst = std::max(worst, std::abs(integral / (sigma * sigma) - 1.0));
  }
  report(worst <= 0.10, "AC6", "Welch integral matches white-noise variance within 10% (20 trials)",
         fmt("worst relative error %.4f", worst));
}

void ac7_invariants() {
  // STFT / ISTFT round trip
  const std::size_t W = 1024;
  const Window hann = make_window(WindowKind::Hann, W);
  const AudioBuffer x(ts::random_vector(40000, 70), 16000);
  const auto y = istft_overlap_add(stft(x, hann, W / 4), hann, W / 4, 16000);
  const double rms = ts::rms_error(y.samples(), x.samples(), W, y.size() - W);
  report(rms < 1e-6, "AC7", "STFT/ISTFT round trip (Hann, 75% overlap) interior RMS < 1e-6", fmt("RMS %.2e", rms));

  // Parseval
  double worst_parseval = 0.0;
  for (std::size_t n : {16u, 256u, 2048u, 8192u}) {
    const auto v = ts::random_vector(n, static_cast<unsigned>(n) + 1);
    const auto spec = fft_real(v, n);
    double te = 0.0, fe = std::norm(spec.bins[0]) + std::norm(spec.bins[n / 2]);
    for (double s : v) te += s * s;
    for (std::size_t k = 1; k < n / 2; ++k) fe += 2.0 * std::norm(spec.bins[k]);
    worst_parseval = std::max(worst_parseval, std::abs(te - fe / static_cast<double>(n)) / te);
  }
  report(worst_parseval < 1e-6, "AC7", "Parseval holds within 1e-6 relative", fmt("worst %.2e", worst_parseval));

  // phase accumulator drift
  PeakLockedVocoder pv(PvParams::for_fft_size(128));
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double drift = 0.0;
  for (int f = 0; f < 10000; ++f) {
    ComplexSpectrum s{std::vector<std::complex<double>>(65), 128};
    for (auto& b : s.bins) b = {u(rng), u(rng)};
    pv.process(s, 21, 37);
    for (const auto& z : pv.accumulator().rotations()) drift = std::max(drift, std::abs(std::abs(z) - 1.0));
  }
  report(drift < 1e-9, "AC7", "phase accumulator stays unit-modulus over 10000 frames", fmt("max | |Z|-1 | %.2e", drift));

  // fuzz corpus
  int bad = 0, runs = 0;
  std::mt19937 fuzz(1234);
  std::uniform_real_distribution<double> beta_dist(0.25, 4.0);
  const AlgoKind kinds[] = {AlgoKind::OLA, AlgoKind::SOLA, AlgoKind::SOLAFS, AlgoKind::WSOLA, AlgoKind::PhaseVocoder};
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2048 + fuzz() % 14000;
    std::vector<double> v;
    switch (i % 5) {
      case 0: v = ts::random_vector(n, 100 + i); break;
      case 1: v.assign(n, 0.0); break;  // silence
      case 2: v.assign(n, 0.0); v[fuzz() % n] = 1.0; break;  // lone impulse
      case 3: v = ts::random_vector(n, 100 + i); for (auto& s : v) s = s > 0 ? 1.0 : -1.0; break;  // clipped
      default: v = ts::speech_like(static_cast<double>(n) / 16000.0, 16000, 100 + i).data(); break;
    }
    const AudioBuffer buf(std::move(v), 16000);
    const double beta = beta_dist(fuzz);
    for (auto k : kinds) {
      ++runs;
      try {
        const auto out = stretch(buf, beta, algo(k));
        for (double s : out.samples()) {
          if (!std::isfinite(s)) {
            ++bad;
            break;
          }
        }
      } catch (const Error&) {
        ++bad;  // AudioBuffer rejects non-finite output, so a throw counts as a failure
      }
    }
  }
  report(bad == 0, "AC7", "no NaN/Inf across a 100-buffer fuzz corpus (all algorithms)",
         std::to_string(runs) + " runs, " + std::to_string(bad) + " bad");
}

}  // namespace

int main() {
  ac1_length_contract();
  ac2_pitch();
  ac3_identity();
  ac4_two_segment_scenario();
  ac5_speech_ordering();
  ac6_oracles();
  ac7_invariants();
  std::printf("%s: %d hard criteria failed\n", g_failures ? "FAILED" : "OK", g_failures);
  return g_failures ? 1 : 0;
}
