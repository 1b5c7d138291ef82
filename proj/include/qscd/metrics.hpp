// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qscd/codec.hpp"
#include "qscd/state_vector.hpp"

namespace qscd {

struct SampleMetrics {
  double fidelity = 0.0;
  double amp_err = 0.0;
  double pha_err = 0.0;
};

struct MetricReport {
  double similarity = 0.0;  // percent
  double mean_fidelity = 0.0;
  double e_amp = 0.0;
  double e_pha = 0.0;
  Complex e_complex = 0.0;
  std::vector<SampleMetrics> per_sample;
};

struct AmpPhaseErrors {
  double e_amp = 0.0;
  double e_pha = 0.0;
};

/// Squared phase gap wrapped into (-pi, pi]; 0 when both moduli are below
/// 1e-6.
double phase_gap_sq(Complex output, Complex target);

/// E_amp = sum (R - r)^2, E_pha = sum (wrapped phase gap)^2 over all samples
/// and modes.
AmpPhaseErrors amp_phase_errors(std::span<const StateVector> outputs,
                                std::span<const StateVector> targets);

/// E_amp * e^{i E_pha}
Complex complex_error(double e_amp, double e_pha);

/// 100 * mean over samples of the overlap between the unit-normalized
/// original and reconstructed pixel vectors.
double similarity(std::span<const ImageSample> reconstructed,
                  std::span<const ImageSample> originals);

double mean_fidelity(std::span<const StateVector> outputs,
                     std::span<const StateVector> targets);

/// Full report for state targets. similarity is computed on the modulus
/// vectors R and r.
MetricReport evaluate_states(std::span<const StateVector> outputs,
                             std::span<const StateVector> targets);

/// Full report for image targets: outputs are decoded with each sample's
/// sigma and compared with the original images.
MetricReport evaluate_images(std::span<const StateVector> outputs,
                             std::span<const StateVector> targets,
                             std::span<const EncodedSample> encoded,
                             std::span<const ImageSample> originals);

/// Single-line JSON object.
std::string to_json(const MetricReport& report);

}  // namespace qscd
