// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

// Exact gradients by forward-mode differentiation. Every parameter gets its
// own tangent pass: the state and its derivative are pushed through the
// pipeline together, and the gate that owns the parameter contributes
// dU * state. This path uses plain std::complex arithmetic and dense 2x2
// matrices so it stays independent of the batched kernels it is used to
// check.

#include <array>
#include <cmath>

#include "pipeline.hpp"
#include "qscd/error.hpp"
#include "qscd/training.hpp"

namespace qscd {

namespace {

using Mat2 = std::array<Complex, 4>;  // row-major

Mat2 gate_matrix(double theta, double alpha, bool adjoint) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex e = std::polar(1.0, alpha);
  if (!adjoint) return {e * c, -s, e * s, c};
  const Complex ec = std::conj(e);
  return {ec * c, ec * s, -s, c};
}

Mat2 gate_dtheta(double theta, double alpha, bool adjoint) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex e = std::polar(1.0, alpha);
  if (!adjoint) return {-e * s, -c, e * c, -s};
  const Complex ec = std::conj(e);
  return {-ec * s, ec * c, -c, -s};
}

Mat2 gate_dalpha(double theta, double alpha, bool adjoint) {
  const double c = std::cos(theta), s = std::sin(theta);
  const Complex ie = Complex(0.0, 1.0) * std::polar(1.0, alpha);
  if (!adjoint) return {ie * c, 0.0, ie * s, 0.0};
  const Complex iec = std::conj(ie);
  return {iec * c, iec * s, 0.0, 0.0};
}

void apply(const Mat2& u, std::vector<Complex>& v, std::size_t k) {
  const Complex a = v[k], b = v[k + 1];
  v[k] = u[0] * a + u[1] * b;
  v[k + 1] = u[2] * a + u[3] * b;
}

// d objective / d params for one pipeline plan. params holds (theta, alpha)
// per gate.
std::vector<double> tangent_gradient(const detail::Plan& plan,
                                     std::span<const double> params,
                                     std::span<const StateVector> inputs,
                                     std::span<const StateVector> targets,
                                     LossKind kind) {
  const std::size_t n = plan.n_modes;
  const std::size_t m_count = inputs.size();
  std::vector<double> grad(params.size(), 0.0);

  std::vector<Mat2> u(plan.ops.size());
  for (std::size_t i = 0; i < plan.ops.size(); ++i) {
    const auto& op = plan.ops[i];
    u[i] = gate_matrix(params[2 * op.gate], params[2 * op.gate + 1], op.adjoint);
  }

  for (std::size_t coord = 0; coord < params.size(); ++coord) {
    const std::size_t gate = coord / 2;
    const bool wrt_theta = coord % 2 == 0;
    double total = 0.0;

    for (std::size_t m = 0; m < m_count; ++m) {
      std::vector<Complex> s(inputs[m].amps().begin(), inputs[m].amps().end());
      std::vector<Complex> ds(n, 0.0);
      double dkept = 0.0;

      for (std::size_t i = 0; i <= plan.ops.size(); ++i) {
        if (i == plan.project_at) {
          double kept = 0.0;
          Complex overlap = 0.0;
          for (std::size_t j = 0; j < plan.d; ++j) {
            kept += std::norm(s[j]);
            overlap += std::conj(s[j]) * ds[j];
          }
          if (kept < 1e-12) {
            throw Error(ErrorCode::FullyRejected,
                        "sample " + std::to_string(m) + " fully rejected");
          }
          dkept = 2.0 * overlap.real();
          const double root = std::sqrt(kept);
          for (std::size_t j = 0; j < n; ++j) {
            if (j >= plan.d) {
              s[j] = 0.0;
              ds[j] = 0.0;
              continue;
            }
            ds[j] = ds[j] / root - s[j] * (dkept / (2.0 * kept * root));
            s[j] = s[j] / root;
          }
          if (kind == LossKind::InvProbability) break;
        }
        if (i == plan.ops.size()) break;
        const auto& op = plan.ops[i];
        if (op.gate == gate) {
          const double th = params[2 * gate], al = params[2 * gate + 1];
          const Mat2 du = wrt_theta ? gate_dtheta(th, al, op.adjoint)
                                    : gate_dalpha(th, al, op.adjoint);
          std::vector<Complex> extra(n, 0.0);
          extra[op.k] = du[0] * s[op.k] + du[1] * s[op.k + 1];
          extra[op.k + 1] = du[2] * s[op.k] + du[3] * s[op.k + 1];
          apply(u[i], ds, op.k);
          ds[op.k] += extra[op.k];
          ds[op.k + 1] += extra[op.k + 1];
        } else {
          apply(u[i], ds, op.k);
        }
        apply(u[i], s, op.k);
      }

      if (kind == LossKind::InvProbability) {
        total += -dkept;
      } else {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          d += 2.0 * (std::conj(s[j] - targets[m][j]) * ds[j]).real();
        }
        total += d;
      }
    }

    grad[coord] = total / static_cast<double>(m_count);
  }
  return grad;
}

void check_sets(std::span<const StateVector> inputs,
                std::span<const StateVector> targets, std::size_t n) {
  if (inputs.size() != targets.size() || inputs.empty()) {
    throw Error(ErrorCode::DimMismatch,
                "need matching, nonempty input and target sets");
  }
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    if (inputs[m].dim() != n || targets[m].dim() != n) {
      throw Error(ErrorCode::DimMismatch, "sample " + std::to_string(m));
    }
  }
}

}  // namespace

NetworkGradient analytic_gradient(const MeshNetwork& enc,
                                  const MeshNetwork& dec,
                                  const CompressionChannel& ch,
                                  std::span<const StateVector> inputs,
                                  std::span<const StateVector> targets,
                                  LossKind kind) {
  check_sets(inputs, targets, enc.n_modes());
  const detail::Plan plan = detail::make_plan(enc, dec, ch);
  std::vector<double> params = enc.parameters();
  const std::vector<double> dp = dec.parameters();
  params.insert(params.end(), dp.begin(), dp.end());
  std::vector<double> g = tangent_gradient(plan, params, inputs, targets, kind);
  const auto split = g.begin() + static_cast<std::ptrdiff_t>(enc.parameter_count());
  return {std::vector<double>(g.begin(), split), std::vector<double>(split, g.end())};
}

std::vector<double> analytic_gradient_mirror(
    const MeshNetwork& enc, const CompressionChannel& ch,
    std::span<const StateVector> inputs, std::span<const StateVector> targets,
    LossKind kind) {
  check_sets(inputs, targets, enc.n_modes());
  const detail::Plan plan = detail::make_mirror_plan(enc, ch);
  return tangent_gradient(plan, enc.parameters(), inputs, targets, kind);
}

}  // namespace qscd
