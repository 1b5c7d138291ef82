// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "qscd/mesh.hpp"
#include "qscd/state_vector.hpp"

namespace qscd {

enum class DecoderMode { Trained, MirrorInverse };
enum class LossKind { Reconstruction, InvProbability };
enum class FdScheme { ForwardPaperLiteral, Central };
enum class GradientMethod { FiniteDifference, Analytic };

struct TrainingConfig {
  std::size_t enc_layers = 1;
  std::size_t dec_layers = 1;
  std::size_t d = 1;
  Topology topology = Topology::Cross;
  double eta = 0.01;
  std::size_t iterations = 300;
  double delta = 1e-6;
  GateInit init = default_init();
  DecoderMode decoder_mode = DecoderMode::Trained;
  LossKind loss_kind = LossKind::Reconstruction;
  FdScheme fd_scheme = FdScheme::Central;
  GradientMethod gradient = GradientMethod::FiniteDifference;
  bool train_alpha = true;
  bool freeze_encoder = false;
  bool freeze_decoder = false;
  std::uint64_t seed = 0;
  /// Worker threads for gradient evaluation; 0 means all cores.
  std::size_t threads = 0;
  /// When false, wall_ms is written as 0 so histories are reproducible.
  bool record_timing = false;

  /// Throws InvalidParams when an invariant is violated.
  void validate(std::size_t n_modes) const;
};

struct IterationRecord {
  std::size_t iter = 0;
  double loss = 0.0;
  double loss_inv = 0.0;
  double e_amp = 0.0;
  double e_pha = 0.0;
  double grad_theta_enc = 0.0;
  double grad_theta_dec = 0.0;
  double grad_alpha_enc = 0.0;
  double grad_alpha_dec = 0.0;
  double wall_ms = 0.0;
};

struct TrainingHistory {
  std::vector<IterationRecord> records;
  std::vector<double> final_enc_params;
  std::vector<double> final_dec_params;
};

void write_history_csv(std::ostream& os, const TrainingHistory& h);

/// Sum over samples and modes of |output - target|^2.
double loss_reconstruction(std::span<const StateVector> outputs,
                           std::span<const StateVector> targets);

/// Mean over samples of 1 - <chi|chi>, the probability mass the encoder
/// leaves outside the retained modes.
double loss_inv(const MeshNetwork& enc, const CompressionChannel& ch,
                std::span<const StateVector> inputs);

/// Value of the training objective. Reconstruction is the mean per-sample
/// loss (sum / M); InvProbability is loss_inv. Histories report the
/// reconstruction loss as sum / (M * N).
double objective(const MeshNetwork& enc, const MeshNetwork& dec,
                 const CompressionChannel& ch,
                 std::span<const StateVector> inputs,
                 std::span<const StateVector> targets, LossKind kind);

using ScalarLoss = std::function<double(std::span<const double>)>;

/// Finite-difference gradient of a black-box loss. Coordinates whose mask
/// entry is false get 0. An empty mask trains every coordinate.
std::vector<double> fd_gradient(const ScalarLoss& loss,
                                std::span<const double> params,
                                FdScheme scheme, double delta,
                                std::span<const bool> mask = {});

struct NetworkGradient {
  std::vector<double> enc;  // (theta, alpha) pairs in application order
  std::vector<double> dec;
};

/// Exact gradient of objective() by forward-mode differentiation of each
/// gate's 2x2 block. enc and dec are independent parameter sets.
NetworkGradient analytic_gradient(const MeshNetwork& enc,
                                  const MeshNetwork& dec,
                                  const CompressionChannel& ch,
                                  std::span<const StateVector> inputs,
                                  std::span<const StateVector> targets,
                                  LossKind kind);

/// Exact gradient with respect to encoder parameters when the decoder is
/// inverse_of(enc).
std::vector<double> analytic_gradient_mirror(
    const MeshNetwork& enc, const CompressionChannel& ch,
    std::span<const StateVector> inputs, std::span<const StateVector> targets,
    LossKind kind);

struct TrainingResult {
  MeshNetwork enc;
  MeshNetwork dec;
  TrainingHistory history;
};

/// Networks built from cfg (layer counts, topology, init).
MeshNetwork initial_encoder(const TrainingConfig& cfg, std::size_t n_modes);
MeshNetwork initial_decoder(const TrainingConfig& cfg, const MeshNetwork& enc);

TrainingResult train(const TrainingConfig& cfg,
                     std::span<const StateVector> inputs,
                     std::span<const StateVector> targets);

/// Continues from the given networks. In MirrorInverse mode dec is ignored.
TrainingResult train(const TrainingConfig& cfg, MeshNetwork enc,
                     MeshNetwork dec, std::span<const StateVector> inputs,
                     std::span<const StateVector> targets);

}  // namespace qscd
