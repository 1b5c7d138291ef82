// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>

#include "qscd/codec.hpp"
#include "qscd/error.hpp"

using namespace qscd;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qscd::Error thrown";
  return ErrorCode::IoError;
}

ImageSample image(std::size_t rows, std::size_t cols, std::vector<double> px) {
  return {rows, cols, std::move(px), 0};
}

Eigen::MatrixXcd amplitude_matrix(const std::vector<StateVector>& states) {
  Eigen::MatrixXcd m(states.front().dim(), states.size());
  for (std::size_t c = 0; c < states.size(); ++c) {
    for (std::size_t r = 0; r < states[c].dim(); ++r) m(r, c) = states[c][r];
  }
  return m;
}

}  // namespace

TEST(PaddedDim, PowersOfTwo) {
  EXPECT_EQ(padded_dim(1), 2u);
  EXPECT_EQ(padded_dim(2), 2u);
  EXPECT_EQ(padded_dim(3), 4u);
  EXPECT_EQ(padded_dim(25), 32u);
  EXPECT_EQ(padded_dim(32), 32u);
  EXPECT_EQ(padded_dim(33), 64u);
}

TEST(ImageToState, FiveByFivePadsToThirtyTwo) {
  const ImageDataset letters = letters_dataset();
  const EncodedSample e = image_to_state(letters.images[0]);
  ASSERT_EQ(e.state.dim(), 32u);
  for (std::size_t n = 25; n < 32; ++n) EXPECT_EQ(e.state[n], Complex(0.0));
  EXPECT_NEAR(e.state.norm_sq(), 1.0, 1e-12);
  for (std::size_t n = 0; n < 32; ++n) EXPECT_EQ(e.state[n].imag(), 0.0);
}

TEST(ImageToState, ThreeFour) {
  const EncodedSample e = image_to_state(image(1, 2, {3, 4}));
  EXPECT_EQ(e.state.dim(), 2u);
  EXPECT_NEAR(e.state[0].real(), 0.6, 1e-15);
  EXPECT_NEAR(e.state[1].real(), 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(e.sigma, 5.0);
}

TEST(ImageToState, Errors) {
  EXPECT_EQ(code_of([] { image_to_state(image(2, 2, {0, 0, 0, 0})); }),
            ErrorCode::ZeroImage);
  EXPECT_EQ(code_of([] { image_to_state(image(2, 2, {0, 1, 0})); }),
            ErrorCode::ShapeMismatch);
}

TEST(StateToImage, Examples) {
  const std::vector<double> r{0.6, 0.8};
  const ImageSample img = state_to_image(r, 5.0, 1, 2);
  EXPECT_NEAR(img.pixels[0], 3.0, 1e-14);
  EXPECT_NEAR(img.pixels[1], 4.0, 1e-14);

  std::vector<double> r32(32, 0.1);
  EXPECT_EQ(state_to_image(r32, 1.0, 5, 5).pixels.size(), 25u);
  EXPECT_EQ(code_of([&] { state_to_image(r32, 1.0, 6, 6); }),
            ErrorCode::ShapeMismatch);
}

TEST(StateToImage, RoundTripAndArgmax) {
  for (const ImageSample& img : letters_dataset().images) {
    const EncodedSample e = image_to_state(img);
    const ImageSample back = state_to_image(e.state.moduli(), e.sigma, 5, 5);
    for (std::size_t i = 0; i < 25; ++i) EXPECT_NEAR(back.pixels[i], img.pixels[i], 1e-12);
  }
  const ImageSample gray = image(2, 3, {0.1, 0.9, 0.3, 0.0, 0.5, 0.7});
  const EncodedSample e = image_to_state(gray);
  const auto px = std::max_element(gray.pixels.begin(), gray.pixels.end());
  const auto m = e.state.moduli();
  EXPECT_EQ(px - gray.pixels.begin(), std::max_element(m.begin(), m.end()) - m.begin());
}

TEST(Measure, Probabilities) {
  const auto p0 = measure_probabilities(StateVector::basis(4, 0));
  EXPECT_EQ(p0, (std::vector<double>{1, 0, 0, 0}));
  const double r = 1 / std::sqrt(2.0);
  const auto p = measure_probabilities(StateVector(std::vector<Complex>{r, Complex(0, r), 0}));
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  EXPECT_EQ(code_of([] { measure_probabilities(StateVector(std::vector<Complex>{1, 1})); }),
            ErrorCode::NotNormalized);
  const auto rm = measured_moduli(StateVector(std::vector<Complex>{Complex(0, -0.6), 0.8}));
  EXPECT_NEAR(rm[0], 0.6, 1e-15);
}

TEST(GenComplex, UniformIsNormalizedAndDeterministic) {
  ComplexStateParams p{50, 8, StateDistribution::UniformRandom, 0, 0.0, 7};
  const auto a = gen_complex_states(p);
  const auto b = gen_complex_states(p);
  ASSERT_EQ(a.size(), 50u);
  EXPECT_EQ(a, b);
  double sum = 0.0;
  for (const StateVector& s : a) {
    EXPECT_NEAR(s.norm_sq(), 1.0, 1e-12);
    for (double pr : measure_probabilities(s)) sum += pr;
  }
  EXPECT_NEAR(sum, 50.0, 1e-10);
  p.seed = 8;
  EXPECT_NE(gen_complex_states(p), a);
}

TEST(GenComplex, SamplesDependOnlyOnIndex) {
  ComplexStateParams p{10, 8, StateDistribution::SubspaceSupported, 3, 0.1, 5};
  const auto ten = gen_complex_states(p);
  p.count = 4;
  const auto four = gen_complex_states(p);
  for (std::size_t m = 0; m < 4; ++m) EXPECT_EQ(four[m], ten[m]);
}

TEST(GenComplex, NoiselessSubspaceHasRankD) {
  for (std::uint64_t seed : {1, 7, 99}) {
    const ComplexStateParams p{50, 8, StateDistribution::SubspaceSupported, 4, 0.0, seed};
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(amplitude_matrix(gen_complex_states(p)));
    const auto& sv = svd.singularValues();
    EXPECT_GT(sv(3), 1e-3);
    for (int i = 4; i < 8; ++i) EXPECT_LT(sv(i), 1e-10) << "seed " << seed;
  }
}

TEST(GenComplex, NoisySubspaceIsFullRank) {
  const ComplexStateParams p{50, 8, StateDistribution::SubspaceSupported, 4, 0.05, 7};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(amplitude_matrix(gen_complex_states(p)));
  EXPECT_GT(svd.singularValues()(7), 1e-4);
  EXPECT_LT(svd.singularValues()(4), 0.2 * svd.singularValues()(3));
}

TEST(GenComplex, InvalidParams) {
  EXPECT_EQ(code_of([] {
              gen_complex_states({5, 1, StateDistribution::UniformRandom, 0, 0, 1});
            }),
            ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] {
              gen_complex_states({5, 8, StateDistribution::SubspaceSupported, 9, 0, 1});
            }),
            ErrorCode::InvalidParams);
  EXPECT_EQ(code_of([] {
              gen_complex_states({5, 8, StateDistribution::SubspaceSupported, 2, -1, 1});
            }),
            ErrorCode::InvalidParams);
}

TEST(Letters, Dataset) {
  const ImageDataset ds = letters_dataset();
  EXPECT_EQ(ds.rows, 5u);
  EXPECT_EQ(ds.cols, 5u);
  ASSERT_EQ(ds.images.size(), 26u);
  for (const ImageSample& img : ds.images) {
    ASSERT_EQ(img.pixels.size(), 25u);
    for (double x : img.pixels) EXPECT_TRUE(x == 0.0 || x == 1.0);
  }
  for (std::size_t i = 0; i < 26; ++i) {
    for (std::size_t j = i + 1; j < 26; ++j) {
      EXPECT_NE(ds.images[i].pixels, ds.images[j].pixels) << i << " " << j;
    }
  }
}

TEST(ImageCsv, RoundTrip) {
  std::stringstream ss;
  write_image_csv(ss, letters_dataset());
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "# 5 5 26");
  const ImageDataset back = read_image_csv(ss);
  ASSERT_EQ(back.images.size(), 26u);
  EXPECT_EQ(back.images[7].pixels, letters_dataset().images[7].pixels);
}

TEST(ImageCsv, Errors) {
  std::stringstream bad_header("5 5 1\n0,1\n");
  EXPECT_NE(code_of([&] { read_image_csv(bad_header); }), ErrorCode::IoError);
  std::stringstream short_row("# 1 3 1\n0,1\n");
  EXPECT_EQ(code_of([&] { read_image_csv(short_row); }), ErrorCode::ShapeMismatch);
  std::stringstream out_of_range("# 1 2 1\n0,1.5\n");
  EXPECT_NE(code_of([&] { read_image_csv(out_of_range); }), ErrorCode::IoError);
  EXPECT_EQ(code_of([] { load_image_csv("/nonexistent/images.csv"); }),
            ErrorCode::IoError);
}

TEST(ReconstructionCsv, ClipsOnExport) {
  ImageDataset ds{1, 3, {image(1, 3, {-0.2, 0.5, 1.7})}};
  std::stringstream ss;
  write_reconstruction_csv(ss, ds);
  const ImageDataset back = read_image_csv(ss);
  EXPECT_EQ(back.images[0].pixels, (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(ComplexCsv, RoundTripIsBitExact) {
  const ComplexStateParams p{6, 8, StateDistribution::SubspaceSupported, 4, 0.05, 7};
  ComplexDataset ds{8, "7", mode_token(p), gen_complex_states(p)};
  std::stringstream ss;
  write_complex_csv(ss, ds);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "# 8 6 7 subspace:4:0.05");
  const ComplexDataset back = read_complex_csv(ss);
  EXPECT_EQ(back.states, ds.states);
  EXPECT_EQ(back.mode, ds.mode);
  EXPECT_EQ(back.seed, "7");
}

TEST(ComplexCsv, WrongWidthRejected) {
  std::stringstream ss("# 2 1 0 uniform\n1,0,0\n");
  EXPECT_EQ(code_of([&] { read_complex_csv(ss); }), ErrorCode::ShapeMismatch);
}
