// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>

#include "pipeline.hpp"
#include "qscd/error.hpp"
#include "qscd/metrics.hpp"

namespace qscd {

namespace {

void require_finite(double v, std::size_t iter) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteLoss,
                "loss is not finite at iteration " + std::to_string(iter) +
                    "; the learning rate is likely too large");
  }
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Perturbation job for one coordinate and direction.
struct Job {
  std::size_t coord;
  double sign;
};

// Objective values for every job, evaluated on `threads` workers with a fixed
// job-to-slot assignment.
std::vector<double> run_jobs(const detail::PipelineEvaluator& ev,
                             const std::vector<Job>& jobs, double delta,
                             std::size_t threads) {
  std::vector<double> values(jobs.size());
  const auto params = ev.parameters();
  auto worker = [&](std::size_t first, std::size_t step) {
    auto ws = ev.make_workspace();
    for (std::size_t j = first; j < jobs.size(); j += step) {
      const std::size_t gate = jobs[j].coord / 2;
      double theta = params[2 * gate];
      double alpha = params[2 * gate + 1];
      if (jobs[j].coord % 2 == 0) {
        theta += jobs[j].sign * delta;
      } else {
        alpha += jobs[j].sign * delta;
      }
      values[j] = ev.perturbed(gate, theta, alpha, ws);
    }
  };
  threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
  if (threads <= 1) {
    worker(0, 1);
    return values;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
  return values;
}

double mean_abs(std::span<const double> g, std::size_t begin, std::size_t end,
                std::size_t offset) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = begin; i < end; i += 2) {
    sum += std::abs(g[i + offset]);
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void TrainingConfig::validate(std::size_t n_modes) const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidParams, msg);
  };
  if (!(eta > 0.0)) fail("eta must be positive");
  if (iterations < 1) fail("iterations must be at least 1");
  if (!(delta > 0.0)) fail("delta must be positive");
  if (d < 1 || d > n_modes) {
    fail("d must lie in [1, " + std::to_string(n_modes) + "]");
  }
  if (enc_layers < 1) fail("encoder needs at least one layer");
  if (decoder_mode == DecoderMode::Trained && dec_layers < 1) {
    fail("decoder needs at least one layer");
  }
}

void write_history_csv(std::ostream& os, const TrainingHistory& h) {
  os << "iter,loss,loss_inv,e_amp,e_pha,grad_norm_theta_enc,"
        "grad_norm_theta_dec,grad_norm_alpha_enc,grad_norm_alpha_dec,wall_ms\n";
  for (const IterationRecord& r : h.records) {
    os << r.iter << ',' << fmt(r.loss) << ',' << fmt(r.loss_inv) << ','
       << fmt(r.e_amp) << ',' << fmt(r.e_pha) << ',' << fmt(r.grad_theta_enc)
       << ',' << fmt(r.grad_theta_dec) << ',' << fmt(r.grad_alpha_enc) << ','
       << fmt(r.grad_alpha_dec) << ',' << fmt(r.wall_ms) << '\n';
  }
}

double loss_reconstruction(std::span<const StateVector> outputs,
                           std::span<const StateVector> targets) {
  if (outputs.size() != targets.size()) {
    throw Error(ErrorCode::DimMismatch,
                std::to_string(outputs.size()) + " outputs for " +
                    std::to_string(targets.size()) + " targets");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < outputs.size(); ++m) {
    if (outputs[m].dim() != targets[m].dim()) {
      throw Error(ErrorCode::DimMismatch, "sample " + std::to_string(m));
    }
    double sample = 0.0;
    for (std::size_t n = 0; n < outputs[m].dim(); ++n) {
      const double dr = outputs[m][n].real() - targets[m][n].real();
      const double di = outputs[m][n].imag() - targets[m][n].imag();
      sample = sample + (dr * dr + di * di);
    }
    total += sample;
  }
  return total;
}

double loss_inv(const MeshNetwork& enc, const CompressionChannel& ch,
                std::span<const StateVector> inputs) {
  if (inputs.empty()) return 0.0;
  double lost = 0.0;
  for (const StateVector& psi : inputs) {
    lost += 1.0 - project(forward(enc, psi), ch).kept_prob;
  }
  return lost / static_cast<double>(inputs.size());
}

double objective(const MeshNetwork& enc, const MeshNetwork& dec,
                 const CompressionChannel& ch,
                 std::span<const StateVector> inputs,
                 std::span<const StateVector> targets, LossKind kind) {
  if (kind == LossKind::InvProbability) return loss_inv(enc, ch, inputs);
  std::vector<StateVector> outputs;
  outputs.reserve(inputs.size());
  for (const StateVector& psi : inputs) {
    outputs.push_back(compress_decode(enc, dec, ch, psi));
  }
  return loss_reconstruction(outputs, targets) /
         static_cast<double>(std::max<std::size_t>(inputs.size(), 1));
}

std::vector<double> fd_gradient(const ScalarLoss& loss,
                                std::span<const double> params,
                                FdScheme scheme, double delta,
                                std::span<const bool> mask) {
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "delta must be positive");
  }
  if (!mask.empty() && mask.size() != params.size()) {
    throw Error(ErrorCode::DimMismatch, "mask and parameter sizes differ");
  }
  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> p(params.begin(), params.end());
  const double base = scheme == FdScheme::ForwardPaperLiteral ? loss(p) : 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const double original = p[i];
    p[i] = original + delta;
    const double plus = loss(p);
    if (scheme == FdScheme::ForwardPaperLiteral) {
      grad[i] = (plus - base) / delta;
    } else {
      p[i] = original - delta;
      const double minus = loss(p);
      grad[i] = (plus - minus) / (2.0 * delta);
    }
    p[i] = original;
  }
  return grad;
}

MeshNetwork initial_encoder(const TrainingConfig& cfg, std::size_t n_modes) {
  return build_network(n_modes, cfg.topology, cfg.enc_layers, cfg.init,
                       Role::Encoder);
}

MeshNetwork initial_decoder(const TrainingConfig& cfg, const MeshNetwork& enc) {
  if (cfg.decoder_mode == DecoderMode::MirrorInverse) return inverse_of(enc);
  return build_network(enc.n_modes(), cfg.topology, cfg.dec_layers, cfg.init,
                       Role::Decoder);
}

TrainingResult train(const TrainingConfig& cfg,
                     std::span<const StateVector> inputs,
                     std::span<const StateVector> targets) {
  if (inputs.empty()) {
    throw Error(ErrorCode::InvalidParams, "training needs at least one sample");
  }
  MeshNetwork enc = initial_encoder(cfg, inputs.front().dim());
  MeshNetwork dec = initial_decoder(cfg, enc);
  return train(cfg, std::move(enc), std::move(dec), inputs, targets);
}

TrainingResult train(const TrainingConfig& cfg, MeshNetwork enc,
                     MeshNetwork dec, std::span<const StateVector> inputs,
                     std::span<const StateVector> targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw Error(ErrorCode::DimMismatch,
                "need matching, nonempty input and target sets");
  }
  const std::size_t n_modes = enc.n_modes();
  cfg.validate(n_modes);
  for (const StateVector& s : inputs) {
    if (s.dim() != n_modes) {
      throw Error(ErrorCode::DimMismatch, "input dim differs from network");
    }
    if (!s.is_normalized(1e-9)) {
      throw Error(ErrorCode::NotNormalized, "training inputs must be normalized");
    }
  }

  const bool mirror = cfg.decoder_mode == DecoderMode::MirrorInverse;
  const CompressionChannel ch(n_modes, cfg.d);
  detail::Plan plan = mirror ? detail::make_mirror_plan(enc, ch)
                             : detail::make_plan(enc, dec, ch);
  const std::size_t enc_coords = 2 * plan.n_enc_gates;

  std::vector<double> params = enc.parameters();
  if (!mirror) {
    const std::vector<double> dp = dec.parameters();
    params.insert(params.end(), dp.begin(), dp.end());
  }

  std::vector<bool> trainable(params.size(), false);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const bool in_enc = i < enc_coords;
    const bool frozen = in_enc ? cfg.freeze_encoder : cfg.freeze_decoder;
    const bool is_alpha = i % 2 == 1;
    trainable[i] = !frozen && (!is_alpha || cfg.train_alpha);
  }
  // Decoder gates never change the kept probability.
  if (cfg.loss_kind == LossKind::InvProbability) {
    for (std::size_t i = enc_coords; i < params.size(); ++i) trainable[i] = false;
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!trainable[i]) continue;
    jobs.push_back({i, 1.0});
    if (cfg.fd_scheme == FdScheme::Central) jobs.push_back({i, -1.0});
  }

  detail::PipelineEvaluator ev(std::move(plan), StateBatch::from_states(inputs),
                               StateBatch::from_states(targets), cfg.loss_kind,
                               kernels::active_table());
  ev.set_parameters(params);
  detail::PassValues base = ev.base_pass();
  require_finite(ev.objective(base), 0);

  const std::size_t threads = resolve_threads(cfg.threads);

  auto networks_from = [&](std::span<const double> p, MeshNetwork& e,
                           MeshNetwork& dnet) {
    e.set_parameters(p.subspan(0, enc_coords));
    if (mirror) {
      dnet = inverse_of(e);
    } else {
      dnet.set_parameters(p.subspan(enc_coords));
    }
  };

  TrainingResult result;
  result.history.records.reserve(cfg.iterations);
  std::vector<double> grad(params.size());

  for (std::size_t iter = 1; iter <= cfg.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();

    std::fill(grad.begin(), grad.end(), 0.0);
    if (cfg.gradient == GradientMethod::FiniteDifference) {
      const std::vector<double> values = run_jobs(ev, jobs, cfg.delta, threads);
      const double base_obj = ev.objective(base);
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        if (cfg.fd_scheme == FdScheme::ForwardPaperLiteral) {
          grad[job.coord] = (values[j] - base_obj) / cfg.delta;
        } else if (job.sign > 0.0) {
          grad[job.coord] = (values[j] - values[j + 1]) / (2.0 * cfg.delta);
        }
      }
    } else {
      networks_from(params, enc, dec);
      if (mirror) {
        const std::vector<double> g = analytic_gradient_mirror(
            enc, ch, inputs, targets, cfg.loss_kind);
        std::copy(g.begin(), g.end(), grad.begin());
      } else {
        const NetworkGradient g =
            analytic_gradient(enc, dec, ch, inputs, targets, cfg.loss_kind);
        std::copy(g.enc.begin(), g.enc.end(), grad.begin());
        std::copy(g.dec.begin(), g.dec.end(),
                  grad.begin() + static_cast<std::ptrdiff_t>(enc_coords));
      }
      for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!trainable[i]) grad[i] = 0.0;
      }
    }

    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= cfg.eta * grad[i];
    }
    ev.set_parameters(params);
    base = ev.base_pass();
    require_finite(ev.objective(base), iter);

    const std::vector<StateVector> outputs = ev.output().to_states();
    const AmpPhaseErrors errs = amp_phase_errors(outputs, targets);

    IterationRecord rec;
    rec.iter = iter;
    rec.loss = base.recon;
    rec.loss_inv = base.loss_inv;
    rec.e_amp = errs.e_amp;
    rec.e_pha = errs.e_pha;
    rec.grad_theta_enc = mean_abs(grad, 0, enc_coords, 0);
    rec.grad_alpha_enc = mean_abs(grad, 0, enc_coords, 1);
    if (!mirror) {
      rec.grad_theta_dec = mean_abs(grad, enc_coords, grad.size(), 0);
      rec.grad_alpha_dec = mean_abs(grad, enc_coords, grad.size(), 1);
    }
    if (cfg.record_timing) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
    result.history.records.push_back(rec);
  }

  networks_from(params, enc, dec);
  result.history.final_enc_params = enc.parameters();
  result.history.final_dec_params = dec.parameters();
  result.enc = std::move(enc);
  result.dec = std::move(dec);
  return result;
}

}  // namespace qscd
