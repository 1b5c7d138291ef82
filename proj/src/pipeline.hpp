// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Flattened encode -> project -> decode pipeline over a sample batch, with
// checkpoints so a single perturbed gate can be re-evaluated from the state
// just before its first use.

#include <cstddef>
#include <span>
#include <vector>

#include "qscd/kernels.hpp"
#include "qscd/mesh.hpp"
#include "qscd/state_batch.hpp"
#include "qscd/training.hpp"

namespace qscd::detail {

struct GateOp {
  std::size_t k;
  std::size_t gate;  // index into the parameter table
  bool adjoint;
};

struct Plan {
  std::size_t n_modes = 0;
  std::size_t d = 0;
  std::vector<GateOp> ops;
  std::size_t project_at = 0;  // projection runs before ops[project_at]
  std::size_t n_gates = 0;
  std::size_t n_enc_gates = 0;
  std::vector<std::size_t> first_op;  // per gate
};

/// Trained decoder: encoder gates are 0..GE-1 and decoder gates follow.
Plan make_plan(const MeshNetwork& enc, const MeshNetwork& dec,
               const CompressionChannel& ch);

/// Mirror-inverse decoder: the decoder reuses encoder gates as adjoints in
/// reverse order.
Plan make_mirror_plan(const MeshNetwork& enc, const CompressionChannel& ch);

struct PassValues {
  double recon = 0.0;         // reconstruction sum / (M * N)
  double recon_sample = 0.0;  // reconstruction sum / M
  double loss_inv = 0.0;  // mean (1 - kept)
};

class PipelineEvaluator {
 public:
  struct Workspace {
    StateBatch state;
    std::vector<double> lanes;
    std::vector<double> factor;
  };

  PipelineEvaluator(Plan plan, StateBatch inputs, StateBatch targets,
                    LossKind kind, const kernels::KernelTable& kt);

  const Plan& plan() const noexcept { return plan_; }

  /// (theta, alpha) per gate.
  void set_parameters(std::span<const double> params);
  std::span<const double> parameters() const noexcept { return params_; }

  /// Full pass at the current parameters; refreshes checkpoints.
  PassValues base_pass();

  /// Objective for the configured loss kind from a PassValues.
  double objective(const PassValues& v) const noexcept {
    return kind_ == LossKind::Reconstruction ? v.recon_sample : v.loss_inv;
  }

  /// Decoded batch from the last base_pass.
  const StateBatch& output() const noexcept { return output_; }

  Workspace make_workspace() const;

  /// Objective with one gate's parameters replaced. Requires base_pass().
  double perturbed(std::size_t gate, double theta, double alpha,
                   Workspace& ws) const;

 private:
  // Runs from position `from` (state already in ws.state) to the end.
  PassValues run(std::size_t from, Workspace& ws, std::size_t override_gate,
                 const kernels::Block2* override_fwd,
                 const kernels::Block2* override_adj,
                 std::vector<StateBatch>* checkpoints) const;

  Plan plan_;
  StateBatch inputs_;
  StateBatch targets_;
  LossKind kind_;
  const kernels::KernelTable& kt_;
  std::vector<double> params_;
  std::vector<kernels::Block2> blocks_;  // per op
  std::size_t checkpoint_every_ = 1;
  std::vector<StateBatch> checkpoints_;
  StateBatch output_;
  PassValues base_;
};

}  // namespace qscd::detail
