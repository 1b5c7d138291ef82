// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qscd/state_vector.hpp"

namespace qscd {

/// Grayscale image, row-major. Inputs have pixels in [0, 1]; reconstructed
/// images may fall outside until they are clipped on export.
struct ImageSample {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;
  std::size_t id = 0;
};

struct EncodedSample {
  StateVector state;
  double sigma = 0.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Smallest power of two >= n_values (at least 2).
std::size_t padded_dim(std::size_t n_values);

/// Row-major flatten, zero-pad to a power of two, normalize. All phases are 0.
/// Pixels must be finite and nonnegative; dataset files additionally keep
/// them in [0, 1].
EncodedSample image_to_state(const ImageSample& img);

/// x_hat = sigma * R over the first rows*cols entries; padding is dropped.
ImageSample state_to_image(std::span<const double> moduli, double sigma,
                           std::size_t rows, std::size_t cols);

/// Detection probabilities |amp_n|^2 of a normalized state.
std::vector<double> measure_probabilities(const StateVector& state);

/// R_n = sqrt(|amp_n|^2), the measured amplitude moduli.
std::vector<double> measured_moduli(const StateVector& state);

enum class StateDistribution { UniformRandom, SubspaceSupported };

struct ComplexStateParams {
  std::size_t count = 0;
  std::size_t dim = 0;
  StateDistribution mode = StateDistribution::UniformRandom;
  // SubspaceSupported only: retained dimension and noise weight.
  std::size_t d = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

/// Deterministic under a fixed seed; sample m depends only on (seed, m), plus
/// the shared isometry for SubspaceSupported.
///
/// UniformRandom: real and imaginary parts i.i.d. standard normal, then
/// normalized. SubspaceSupported: normalize(u + noise * e) where u = V w / |V w|
/// for a seeded N x d isometry V and standard normal complex w, and e is a
/// uniformly oriented unit vector.
std::vector<StateVector> gen_complex_states(const ComplexStateParams& p);

/// Mode token used in dataset headers: "uniform" or "subspace:<d>:<noise>".
std::string mode_token(const ComplexStateParams& p);

struct ImageDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<ImageSample> images;
};

struct ComplexDataset {
  std::size_t dim = 0;
  std::string seed = "0";
  std::string mode = "external";
  std::vector<StateVector> states;
};

/// The 26 capital letters as 5x5 binary bitmaps.
ImageDataset letters_dataset();

// Image CSV: header "# D1 D2 M", then one image per row.
void write_image_csv(std::ostream& os, const ImageDataset& ds);
ImageDataset read_image_csv(std::istream& is);
ImageDataset load_image_csv(const std::string& path);

/// Reconstructions with pixels clipped into [0, 1].
void write_reconstruction_csv(std::ostream& os, const ImageDataset& ds);

// Complex-state CSV: header "# N M seed mode", then Re0,Im0,...,ReN-1,ImN-1.
void write_complex_csv(std::ostream& os, const ComplexDataset& ds);
ComplexDataset read_complex_csv(std::istream& is);
ComplexDataset load_complex_csv(const std::string& path);

}  // namespace qscd
