#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/signals.hpp"
#include "tsm/detail/schedule.hpp"
#include "tsm/metrics.hpp"
#include "tsm/wsola.hpp"

namespace sig = tsm::testing;

using namespace tsm;

namespace {

// Hann-windowed analysis and synthesis on the same frame grid, no search.
std::vector<double> windowed_ola_oracle(const AudioBuffer& x, double beta, const TsmParams& p) {
  const std::size_t W = p.window_len;
  const std::size_t out_len = detail::target_length(x.size(), beta);
  const auto grid = detail::frame_schedule(x.size(), out_len, W, p.analysis_hop(beta), p.synthesis_hop(beta));
  std::vector<double> num(out_len, 0.0), den(out_len, 0.0);
  for (const auto& g : grid) {
    for (std::size_t n = 0; n < W; ++n) {
      const double w = 0.5 * (1 - std::cos(2 * std::numbers::pi * n / (W - 1.0)));
      num[g.synthesis + n] += w * w * x[g.analysis + n];
      den[g.synthesis + n] += w * w;
    }
  }
  for (std::size_t i = 0; i < out_len; ++i) num[i] /= std::max(den[i], 1e-12);
  return num;
}

}  // namespace

TEST(Similarity, Examples) {
  const std::vector<double> a{1, -1}, b{0, 1}, u{0.6, 0.8};
  EXPECT_DOUBLE_EQ(similarity(a, b, SimilarityMeasure::CrossAMDF), 1.5);
  EXPECT_DOUBLE_EQ(similarity(a, a, SimilarityMeasure::CrossAMDF), 0.0);
  EXPECT_NEAR(similarity(u, u, SimilarityMeasure::NormalizedCrossCorrelation), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(similarity(a, b, SimilarityMeasure::CrossCorrelation), -1.0);
  EXPECT_TRUE(is_minimized(SimilarityMeasure::CrossAMDF));
  EXPECT_FALSE(is_minimized(SimilarityMeasure::CrossCorrelation));
  EXPECT_FALSE(is_minimized(SimilarityMeasure::NormalizedCrossCorrelation));
}

TEST(Similarity, MeasureNamesRoundTrip) {
  for (auto m : {SimilarityMeasure::CrossCorrelation, SimilarityMeasure::NormalizedCrossCorrelation,
                 SimilarityMeasure::CrossAMDF}) {
    EXPECT_EQ(parse_measure(measure_name(m)), m);
  }
  EXPECT_THROW(parse_measure("cosine"), Error);
}

TEST(WsolaBestOffset, FindsPlantedMatchForEveryMeasure) {
  const auto sig = sig::random_vector(600, 12);
  const std::size_t ideal = 200;
  const std::vector<double> ref(sig.begin() + 200 - 13, sig.begin() + 200 - 13 + 80);
  for (auto m : {SimilarityMeasure::NormalizedCrossCorrelation, SimilarityMeasure::CrossAMDF}) {
    EXPECT_EQ(wsola_best_offset(sig, ideal, 30, 100, ref, m), -13);
  }
}

TEST(WsolaBestOffset, TiesPreferSmallMagnitudeThenNegative) {
  const std::vector<double> flat(300, 0.5);
  const std::vector<double> ref(50, 0.5);
  EXPECT_EQ(wsola_best_offset(flat, 100, 20, 60, ref, SimilarityMeasure::CrossAMDF), 0);
  // the pulse sits at both 100 - 5 and 100 + 5
  std::vector<double> sig(300, 0.0);
  const std::vector<double> pulse{1.0, 2.0, 1.0};
  for (std::size_t i = 0; i < 3; ++i) {
    sig[95 + i] = pulse[i];
    sig[105 + i] = pulse[i];
  }
  EXPECT_EQ(wsola_best_offset(sig, 100, 10, 20, pulse, SimilarityMeasure::CrossAMDF), -5);
}

TEST(WsolaStretch, ZeroSearchIsWindowedOla) {
  TsmParams p = TsmParams::for_sample_rate(16000);
  p.k_max = 0;
  const auto x = sig::harmonics_with_burst(1.0);
  for (double beta : {0.5, 0.8, 1.0, 1.7}) {
    const auto y = wsola_stretch(x, beta, p);
    const auto want = windowed_ola_oracle(x, beta, p);
    ASSERT_EQ(y.size(), want.size());
    for (std::size_t i = 0; i < y.size(); ++i) ASSERT_NEAR(y[i], want[i], 1e-9) << "beta " << beta << " i " << i;
  }
}

TEST(WsolaStretch, UnitBetaExactInterior) {
  TsmParams p = TsmParams::for_sample_rate(16000);
  p.k_max = 0;
  const auto x = sig::speech_like(1.0);
  const auto y = wsola_stretch(x, 1.0, p);
  EXPECT_LT(sig::rms_error(y.samples(), x.samples(), p.window_len, x.size() - p.window_len), 1e-6);
}

TEST(WsolaStretch, SineDoubledKeepsPitchAndLength) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  const auto x = sig::sine(440, 2.0);
  const auto y = wsola_stretch(x, 2.0, p);
  EXPECT_LE(std::abs(static_cast<double>(y.size()) - 2.0 * x.size()), p.window_len);
  EXPECT_TRUE(sig::peak_within_one_bin(sig::dominant_bin(y), 440));
}

TEST(WsolaStretch, PitchPreservedAcrossFrequencies) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  for (double f0 : {220.0, 440.0, 880.0}) {
    const auto x = sig::sine(f0, 2.0);
    for (double beta : {0.5, 1.5, 2.0}) {
      EXPECT_TRUE(sig::peak_within_one_bin(sig::dominant_bin(wsola_stretch(x, beta, p)), f0))
          << "f0 " << f0 << " beta " << beta;
    }
  }
}

TEST(WsolaStretch, OffsetsInvariantUnderAmplitudeScaling) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto base = sig::speech_like(1.0, 16000, seed);
    std::vector<double> scaled(base.data());
    for (auto& v : scaled) v *= 3.7;
    for (double beta : {0.7, 1.4}) {
      std::vector<std::ptrdiff_t> a, b;
      wsola_stretch(base, beta, p, SimilarityMeasure::NormalizedCrossCorrelation, &a);
      wsola_stretch(AudioBuffer(scaled, 16000), beta, p, SimilarityMeasure::NormalizedCrossCorrelation, &b);
      EXPECT_EQ(a, b);
    }
  }
}

TEST(WsolaStretch, NoBlowUpAcrossBetaRange) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  const auto x = sig::speech_like(2.0);
  const double peak = sig::peak_abs(x.samples());
  for (double beta : {0.25, 0.5, 1.0, 2.0, 3.0, 4.0}) {
    for (auto m : {SimilarityMeasure::CrossCorrelation, SimilarityMeasure::NormalizedCrossCorrelation,
                   SimilarityMeasure::CrossAMDF}) {
      const auto y = wsola_stretch(x, beta, p, m);
      for (double v : y.samples()) ASSERT_TRUE(std::isfinite(v));
      EXPECT_LE(sig::peak_abs(y.samples()), 1.05 * peak) << "beta " << beta;
    }
  }
}

TEST(WsolaStretch, EveryMeasureBeatsPlainOlaOnSpeech) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  const auto x = sig::speech_like(4.0);
  const double ola = psd_difference(x, ola_stretch(x, 0.5, p));
  for (auto m : {SimilarityMeasure::CrossCorrelation, SimilarityMeasure::NormalizedCrossCorrelation,
                 SimilarityMeasure::CrossAMDF}) {
    EXPECT_LT(psd_difference(x, wsola_stretch(x, 0.5, p, m)), ola) << measure_name(m);
  }
}

TEST(WsolaStretch, NeedsRoomForSearch) {
  const TsmParams p = TsmParams::for_sample_rate(16000);
  const AudioBuffer x(std::vector<double>(p.window_len + 2 * p.k_max - 1, 0.1), 16000);
  try {
    wsola_stretch(x, 1.2, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignalTooShort);
  }
}
