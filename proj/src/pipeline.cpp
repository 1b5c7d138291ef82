// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qscd/error.hpp"

namespace qscd::detail {

namespace {

constexpr double kRejectFloor = 1e-12;
constexpr std::size_t kCheckpointBudgetBytes = std::size_t{512} << 20;
constexpr std::size_t kNoGate = std::numeric_limits<std::size_t>::max();

void append_gates(const MeshNetwork& net, std::size_t gate_base,
                  std::vector<GateOp>& ops) {
  std::size_t g = gate_base;
  for (const auto& layer : net.layers()) {
    for (const GateParam& p : layer) {
      ops.push_back({p.k, g++, net.adjoint_gates()});
    }
  }
}

void index_first_use(Plan& plan) {
  plan.first_op.assign(plan.n_gates, plan.ops.size());
  for (std::size_t i = plan.ops.size(); i-- > 0;) {
    plan.first_op[plan.ops[i].gate] = i;
  }
}

void check_plan_nets(const MeshNetwork& enc, const CompressionChannel& ch) {
  if (enc.n_modes() != ch.n_modes()) {
    throw Error(ErrorCode::DimMismatch, "channel and encoder mode counts differ");
  }
  if (!enc.output_phases().empty()) {
    throw Error(ErrorCode::InvalidParams,
                "training networks cannot carry an output phase screen");
  }
}

}  // namespace

Plan make_plan(const MeshNetwork& enc, const MeshNetwork& dec,
               const CompressionChannel& ch) {
  check_plan_nets(enc, ch);
  check_plan_nets(dec, ch);
  Plan plan;
  plan.n_modes = enc.n_modes();
  plan.d = ch.d();
  plan.n_enc_gates = enc.gate_count();
  plan.n_gates = enc.gate_count() + dec.gate_count();
  append_gates(enc, 0, plan.ops);
  plan.project_at = plan.ops.size();
  append_gates(dec, enc.gate_count(), plan.ops);
  index_first_use(plan);
  return plan;
}

Plan make_mirror_plan(const MeshNetwork& enc, const CompressionChannel& ch) {
  check_plan_nets(enc, ch);
  Plan plan;
  plan.n_modes = enc.n_modes();
  plan.d = ch.d();
  plan.n_enc_gates = enc.gate_count();
  plan.n_gates = enc.gate_count();
  append_gates(enc, 0, plan.ops);
  plan.project_at = plan.ops.size();
  for (std::size_t i = plan.project_at; i-- > 0;) {
    GateOp op = plan.ops[i];
    op.adjoint = !op.adjoint;
    plan.ops.push_back(op);
  }
  index_first_use(plan);
  return plan;
}

PipelineEvaluator::PipelineEvaluator(Plan plan, StateBatch inputs,
                                     StateBatch targets, LossKind kind,
                                     const kernels::KernelTable& kt)
    : plan_(std::move(plan)),
      inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      kind_(kind),
      kt_(kt),
      params_(2 * plan_.n_gates, 0.0),
      blocks_(plan_.ops.size()) {
  if (inputs_.n_modes() != plan_.n_modes ||
      targets_.n_modes() != plan_.n_modes) {
    throw Error(ErrorCode::DimMismatch, "batch and network mode counts differ");
  }
  if (inputs_.n_samples() != targets_.n_samples() ||
      inputs_.n_samples() == 0) {
    throw Error(ErrorCode::DimMismatch,
                "need matching, nonempty input and target sets");
  }
  const std::size_t positions = plan_.ops.size() + 1;
  const std::size_t per = 2 * sizeof(double) * inputs_.n_modes() *
                          inputs_.stride();
  const std::size_t max_count = std::max<std::size_t>(1, kCheckpointBudgetBytes / per);
  checkpoint_every_ = (positions + max_count - 1) / max_count;
  checkpoints_.resize((positions + checkpoint_every_ - 1) / checkpoint_every_);
}

void PipelineEvaluator::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw Error(ErrorCode::DimMismatch,
                "expected " + std::to_string(params_.size()) +
                    " parameters, got " + std::to_string(params.size()));
  }
  std::copy(params.begin(), params.end(), params_.begin());
  for (std::size_t i = 0; i < plan_.ops.size(); ++i) {
    const GateOp& op = plan_.ops[i];
    blocks_[i] = gate_block(params_[2 * op.gate], params_[2 * op.gate + 1],
                            op.adjoint);
  }
}

PipelineEvaluator::Workspace PipelineEvaluator::make_workspace() const {
  return {inputs_, std::vector<double>(inputs_.stride()),
          std::vector<double>(inputs_.stride())};
}

PassValues PipelineEvaluator::base_pass() {
  Workspace ws = make_workspace();
  ws.state = inputs_;
  base_ = run(0, ws, kNoGate, nullptr, nullptr, &checkpoints_);
  output_ = std::move(ws.state);
  return base_;
}

double PipelineEvaluator::perturbed(std::size_t gate, double theta,
                                    double alpha, Workspace& ws) const {
  const std::size_t start = plan_.first_op[gate];
  const kernels::Block2 fwd = gate_block(theta, alpha, false);
  const kernels::Block2 adj = gate_block(theta, alpha, true);
  // Decoder gates cannot change the kept probability.
  if (kind_ == LossKind::InvProbability && start >= plan_.project_at) {
    return base_.loss_inv;
  }
  const std::size_t c = start / checkpoint_every_;
  ws.state = checkpoints_[c];
  return objective(run(c * checkpoint_every_, ws, gate, &fwd, &adj, nullptr));
}

PassValues PipelineEvaluator::run(std::size_t from, Workspace& ws,
                                  std::size_t override_gate,
                                  const kernels::Block2* override_fwd,
                                  const kernels::Block2* override_adj,
                                  std::vector<StateBatch>* checkpoints) const {
  PassValues v;
  const std::size_t n_samples = inputs_.n_samples();
  const std::size_t end = plan_.ops.size();
  for (std::size_t i = from; i <= end; ++i) {
    if (checkpoints != nullptr && i % checkpoint_every_ == 0) {
      (*checkpoints)[i / checkpoint_every_] = ws.state;
    }
    if (i == plan_.project_at) {
      ws.state.row_norm_sq(0, plan_.d, ws.lanes, kt_);
      std::fill(ws.factor.begin(), ws.factor.end(), 0.0);
      double lost = 0.0;
      for (std::size_t m = 0; m < n_samples; ++m) {
        const double kept = ws.lanes[m];
        if (std::isnan(kept)) {
          throw Error(ErrorCode::NonFiniteLoss,
                      "sample " + std::to_string(m) + " kept probability is NaN");
        }
        if (!(kept >= kRejectFloor)) {
          throw Error(ErrorCode::FullyRejected,
                      "sample " + std::to_string(m) + " kept probability " +
                          std::to_string(kept));
        }
        lost += 1.0 - kept;
        ws.factor[m] = 1.0 / std::sqrt(kept);
      }
      v.loss_inv = lost / static_cast<double>(n_samples);
      if (checkpoints == nullptr && kind_ == LossKind::InvProbability) return v;
      ws.state.zero_rows_from(plan_.d);
      ws.state.scale_rows(0, plan_.d, ws.factor, kt_);
    }
    if (i == end) break;
    const GateOp& op = plan_.ops[i];
    const kernels::Block2* u = &blocks_[i];
    if (op.gate == override_gate) u = op.adjoint ? override_adj : override_fwd;
    ws.state.apply_block(*u, op.k, kt_);
  }
  ws.state.diff_norm_sq(targets_, ws.lanes, kt_);
  double total = 0.0;
  for (std::size_t m = 0; m < n_samples; ++m) total += ws.lanes[m];
  v.recon = total / static_cast<double>(n_samples * plan_.n_modes);
  v.recon_sample = total / static_cast<double>(n_samples);
  return v;
}

}  // namespace qscd::detail
