// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "qscd/codec.hpp"
#include "qscd/error.hpp"
#include "qscd/metrics.hpp"
#include "qscd/training.hpp"
#include "test_util.hpp"

using namespace qscd;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector sv(std::vector<Complex> a) { return StateVector(std::move(a)); }

}  // namespace

TEST(AmpPhase, IdenticalSetsHaveNoError) {
  std::mt19937_64 rng(1);
  std::vector<StateVector> s;
  for (int i = 0; i < 5; ++i) s.push_back(testutil::random_state(6, rng));
  const AmpPhaseErrors e = amp_phase_errors(s, s);
  EXPECT_EQ(e.e_amp, 0.0);
  EXPECT_EQ(e.e_pha, 0.0);
}

TEST(AmpPhase, AmplitudeGap) {
  const std::vector<StateVector> out{sv({0.5, std::sqrt(0.75)})};
  const std::vector<StateVector> tgt{sv({0.3, std::sqrt(0.91)})};
  const double want = 0.04 + std::pow(std::sqrt(0.75) - std::sqrt(0.91), 2);
  EXPECT_NEAR(amp_phase_errors(out, tgt).e_amp, want, 1e-15);
  EXPECT_NEAR(amp_phase_errors(out, tgt).e_pha, 0.0, 1e-30);
}

TEST(AmpPhase, PhaseGapIsWrapped) {
  EXPECT_NEAR(phase_gap_sq(std::polar(1.0, 0.1), std::polar(1.0, 2 * kPi - 0.1)),
              0.04, 1e-12);
  EXPECT_NEAR(phase_gap_sq(std::polar(1.0, kPi), 1.0), kPi * kPi, 1e-12);
  EXPECT_EQ(phase_gap_sq(1e-7, Complex(0, 1e-7)), 0.0);
  EXPECT_GT(phase_gap_sq(1e-7, Complex(0, 0.5)), 0.0);
}

TEST(AmpPhase, InvariantUnderTwoPiShift) {
  std::mt19937_64 rng(2);
  const std::vector<StateVector> a{testutil::random_state(4, rng)};
  const std::vector<StateVector> b{testutil::random_state(4, rng)};
  std::vector<StateVector> shifted = b;
  shifted[0][2] = std::polar(std::abs(b[0][2]), std::arg(b[0][2]) + 2 * kPi);
  EXPECT_NEAR(amp_phase_errors(a, b).e_pha, amp_phase_errors(a, shifted).e_pha,
              1e-12);
}

TEST(AmpPhase, DimMismatch) {
  const std::vector<StateVector> a{StateVector::basis(2, 0)};
  const std::vector<StateVector> b{StateVector::basis(3, 0)};
  EXPECT_THROW(amp_phase_errors(a, b), Error);
}

TEST(ComplexError, Examples) {
  EXPECT_EQ(complex_error(0.0, 5.0), Complex(0.0));
  EXPECT_EQ(complex_error(1.0, 0.0), Complex(1.0));
  const Complex e = complex_error(1e-4, 1e-4);
  EXPECT_NEAR(e.real(), 1e-4, 1e-12);
  EXPECT_NEAR(e.imag(), 1e-8, 1e-14);
  EXPECT_NEAR(std::abs(complex_error(0.3, 2.0)), 0.3, 1e-12);
}

TEST(Similarity, Examples) {
  const ImageSample a{1, 2, {1, 0}, 0};
  const ImageSample b{1, 2, {0, 1}, 1};
  const ImageSample c{1, 2, {1, 1}, 2};
  EXPECT_NEAR(similarity(std::vector{a}, std::vector{a}), 100.0, 1e-12);
  EXPECT_NEAR(similarity(std::vector{a}, std::vector{b}), 0.0, 1e-12);
  // overlap(a, c) = 1/sqrt(2); together with an exact pair.
  EXPECT_NEAR(similarity(std::vector{a, c}, std::vector{a, a}),
              50.0 * (1.0 + 1.0 / std::sqrt(2.0)), 1e-12);
  const ImageSample scaled{1, 2, {3, 3}, 0};
  EXPECT_NEAR(similarity(std::vector{scaled}, std::vector{c}), 100.0, 1e-12);
}

TEST(Similarity, HalfOverlap) {
  // overlap 0.5 and 1.0 average to 75%.
  const double s = std::sqrt(3.0) / 2;
  const ImageSample half{1, 2, {0.5, s}, 0};
  const ImageSample e0{1, 2, {1, 0}, 0};
  EXPECT_NEAR(similarity(std::vector{half, e0}, std::vector{e0, e0}), 75.0, 1e-12);
}

TEST(Similarity, ShapeMismatch) {
  const ImageSample a{1, 2, {1, 0}, 0};
  const ImageSample b{2, 1, {1, 0}, 0};
  EXPECT_THROW(similarity(std::vector{a}, std::vector{b}), Error);
  EXPECT_THROW(similarity(std::vector{a}, std::vector{a, a}), Error);
}

TEST(Similarity, PermutationInvariant) {
  std::vector<ImageSample> orig = letters_dataset().images;
  std::vector<ImageSample> recon = orig;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& img : recon) for (double& p : img.pixels) p = std::clamp(p + 0.3 * u(rng), 0.0, 1.0);
  const double before = similarity(recon, orig);
  std::reverse(orig.begin(), orig.end());
  std::reverse(recon.begin(), recon.end());
  EXPECT_NEAR(similarity(recon, orig), before, 1e-12);
}

TEST(MeanFidelity, Examples) {
  const auto e0 = StateVector::basis(2, 0), e1 = StateVector::basis(2, 1);
  EXPECT_NEAR(mean_fidelity(std::vector{e0, e1}, std::vector{e0, e1}), 1.0, 1e-15);
  EXPECT_NEAR(mean_fidelity(std::vector{e0, e1}, std::vector{e1, e0}), 0.0, 1e-15);
  EXPECT_NEAR(mean_fidelity(std::vector{e0, e0}, std::vector{e0, e1}), 0.5, 1e-15);
}

TEST(Reports, RealAlignedStatesLossEqualsEamp) {
  std::vector<StateVector> a, b;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int m = 0; m < 6; ++m) {
    std::vector<double> x(8), y(8);
    for (int n = 0; n < 8; ++n) { x[n] = u(rng); y[n] = u(rng); }
    a.push_back(normalize(x).unit);
    b.push_back(normalize(y).unit);
  }
  const MetricReport r = evaluate_states(a, b);
  EXPECT_NEAR(loss_reconstruction(a, b), r.e_amp, 1e-12);
  EXPECT_NEAR(std::abs(r.e_complex), r.e_amp, 1e-12);
  ASSERT_EQ(r.per_sample.size(), 6u);
}

TEST(Reports, EvaluateImagesUsesSigma) {
  const ImageDataset letters = letters_dataset();
  std::vector<EncodedSample> enc;
  std::vector<StateVector> states;
  for (const auto& img : letters.images) {
    enc.push_back(image_to_state(img));
    states.push_back(enc.back().state);
  }
  const MetricReport r = evaluate_images(states, states, enc, letters.images);
  EXPECT_NEAR(r.similarity, 100.0, 1e-10);
  EXPECT_NEAR(r.mean_fidelity, 1.0, 1e-12);
  EXPECT_EQ(r.e_amp, 0.0);
}

TEST(Json, SingleLineWithExpectedKeys) {
  std::mt19937_64 rng(5);
  std::vector<StateVector> a{testutil::random_state(4, rng), testutil::random_state(4, rng)};
  std::vector<StateVector> b{testutil::random_state(4, rng), testutil::random_state(4, rng)};
  const MetricReport r = evaluate_states(a, b);
  const std::string js = to_json(r);
  EXPECT_EQ(js.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(js);
  for (const char* k : {"similarity", "mean_fidelity", "e_amp", "e_pha",
                        "e_complex_re", "e_complex_im", "per_sample"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["mean_fidelity"].get<double>(), r.mean_fidelity);
  ASSERT_EQ(j["per_sample"].size(), 2u);
  EXPECT_EQ(j["per_sample"][1][0].get<double>(), r.per_sample[1].fidelity);
}
