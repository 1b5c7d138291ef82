// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/metrics.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

#include "qscd/error.hpp"

namespace qscd {

namespace {

constexpr double kPhaseMask = 1e-6;

void check_pairs(std::size_t outputs, std::size_t targets) {
  if (outputs != targets) {
    throw Error(ErrorCode::DimMismatch,
                std::to_string(outputs) + " outputs for " +
                    std::to_string(targets) + " targets");
  }
}

void check_dims(const StateVector& a, const StateVector& b, std::size_t m) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimMismatch,
                "sample " + std::to_string(m) + ": dims " +
                    std::to_string(a.dim()) + " and " +
                    std::to_string(b.dim()));
  }
}

double unit_overlap(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    ab += a[n] * b[n];
    aa += a[n] * a[n];
    bb += b[n] * b[n];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

SampleMetrics sample_metrics(const StateVector& out, const StateVector& tgt) {
  SampleMetrics s;
  s.fidelity = fidelity(out, tgt);
  for (std::size_t n = 0; n < out.dim(); ++n) {
    const double dr = std::abs(out[n]) - std::abs(tgt[n]);
    s.amp_err += dr * dr;
    s.pha_err += phase_gap_sq(out[n], tgt[n]);
  }
  return s;
}

MetricReport aggregate(std::span<const StateVector> outputs,
                       std::span<const StateVector> targets) {
  check_pairs(outputs.size(), targets.size());
  MetricReport r;
  r.per_sample.reserve(outputs.size());
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    check_dims(outputs[m], targets[m], m);
    const SampleMetrics s = sample_metrics(outputs[m], targets[m]);
    r.per_sample.push_back(s);
    r.mean_fidelity += s.fidelity;
    r.e_amp += s.amp_err;
    r.e_pha += s.pha_err;
  }
  if (!outputs.empty()) {
    r.mean_fidelity /= static_cast<double>(outputs.size());
  }
  r.e_complex = complex_error(r.e_amp, r.e_pha);
  return r;
}

}  // namespace

double phase_gap_sq(Complex output, Complex target) {
  if (std::abs(output) < kPhaseMask && std::abs(target) < kPhaseMask) {
    return 0.0;
  }
  const double out_phase =
      std::abs(output) < 1e-12 ? 0.0 : std::atan2(output.imag(), output.real());
  const double tgt_phase =
      std::abs(target) < 1e-12 ? 0.0 : std::atan2(target.imag(), target.real());
  double gap = wrap_phase(out_phase - tgt_phase);
  if (gap > std::numbers::pi) gap -= 2.0 * std::numbers::pi;
  return gap * gap;
}

AmpPhaseErrors amp_phase_errors(std::span<const StateVector> outputs,
                                std::span<const StateVector> targets) {
  check_pairs(outputs.size(), targets.size());
  AmpPhaseErrors e;
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    check_dims(outputs[m], targets[m], m);
    for (std::size_t n = 0; n < outputs[m].dim(); ++n) {
      const double dr = std::abs(outputs[m][n]) - std::abs(targets[m][n]);
      e.e_amp += dr * dr;
      e.e_pha += phase_gap_sq(outputs[m][n], targets[m][n]);
    }
  }
  return e;
}

Complex complex_error(double e_amp, double e_pha) {
  return {e_amp * std::cos(e_pha), e_amp * std::sin(e_pha)};
}

double similarity(std::span<const ImageSample> reconstructed,
                  std::span<const ImageSample> originals) {
  if (reconstructed.size() != originals.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(reconstructed.size()) + " reconstructions for " +
                    std::to_string(originals.size()) + " originals");
  }
  if (originals.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < originals.size(); ++m) {
    const ImageSample& a = reconstructed[m];
    const ImageSample& b = originals[m];
    if (a.rows != b.rows || a.cols != b.cols ||
        a.pixels.size() != b.pixels.size()) {
      throw Error(ErrorCode::ShapeMismatch,
                  "sample " + std::to_string(m) + " shape differs");
    }
    total += unit_overlap(a.pixels, b.pixels);
  }
  return 100.0 * total / static_cast<double>(originals.size());
}

double mean_fidelity(std::span<const StateVector> outputs,
                     std::span<const StateVector> targets) {
  check_pairs(outputs.size(), targets.size());
  if (outputs.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    check_dims(outputs[m], targets[m], m);
    total += fidelity(outputs[m], targets[m]);
  }
  return total / static_cast<double>(outputs.size());
}

MetricReport evaluate_states(std::span<const StateVector> outputs,
                             std::span<const StateVector> targets) {
  MetricReport r = aggregate(outputs, targets);
  double total = 0.0;
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    total += unit_overlap(outputs[m].moduli(), targets[m].moduli());
  }
  if (!outputs.empty()) {
    r.similarity = 100.0 * total / static_cast<double>(outputs.size());
  }
  return r;
}

MetricReport evaluate_images(std::span<const StateVector> outputs,
                             std::span<const StateVector> targets,
                             std::span<const EncodedSample> encoded,
                             std::span<const ImageSample> originals) {
  MetricReport r = aggregate(outputs, targets);
  check_pairs(outputs.size(), encoded.size());
  std::vector<ImageSample> recon;
  recon.reserve(outputs.size());
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    recon.push_back(state_to_image(outputs[m].moduli(), encoded[m].sigma,
                                   encoded[m].rows, encoded[m].cols));
  }
  r.similarity = similarity(recon, originals);
  return r;
}

std::string to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["similarity"] = report.similarity;
  j["mean_fidelity"] = report.mean_fidelity;
  j["e_amp"] = report.e_amp;
  j["e_pha"] = report.e_pha;
  j["e_complex_re"] = report.e_complex.real();
  j["e_complex_im"] = report.e_complex.imag();
  auto per = nlohmann::ordered_json::array();
  for (const SampleMetrics& s : report.per_sample) {
    per.push_back({s.fidelity, s.amp_err, s.pha_err});
  }
  j["per_sample"] = std::move(per);
  return j.dump();
}

}  // namespace qscd
