// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "qscd/codec.hpp"
#include "qscd/error.hpp"
#include "qscd/training.hpp"
#include "test_util.hpp"

using namespace qscd;
using qscd::testutil::random_network;
using qscd::testutil::random_state;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qscd::Error thrown";
  return ErrorCode::IoError;
}

std::vector<StateVector> random_states(std::size_t m, std::size_t n,
                                       std::mt19937_64& rng) {
  std::vector<StateVector> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(random_state(n, rng));
  return out;
}

// Relative agreement, falling back to an absolute bound near zero.
void expect_grad_close(const std::vector<double>& fd,
                       const std::vector<double>& exact, const std::string& what) {
  ASSERT_EQ(fd.size(), exact.size());
  for (std::size_t i = 0; i < fd.size(); ++i) {
    if (std::abs(exact[i]) < 1e-6) {
      EXPECT_LE(std::abs(fd[i] - exact[i]), 1e-8) << what << " coord " << i;
    } else {
      EXPECT_LE(std::abs(fd[i] - exact[i]) / std::abs(exact[i]), 1e-4)
          << what << " coord " << i;
    }
  }
}

std::vector<double> concat(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TrainingConfig small_config() {
  TrainingConfig cfg;
  cfg.enc_layers = 2;
  cfg.dec_layers = 2;
  cfg.d = 2;
  cfg.iterations = 5;
  cfg.eta = 0.05;
  return cfg;
}

}  // namespace

TEST(LossReconstruction, Examples) {
  const std::vector<StateVector> a{StateVector::basis(2, 0)};
  EXPECT_EQ(loss_reconstruction(a, a), 0.0);
  const std::vector<StateVector> flipped{StateVector(std::vector<Complex>{-1.0, 0.0})};
  EXPECT_NEAR(loss_reconstruction(flipped, a), 4.0, 1e-15);
  const std::vector<StateVector> r{StateVector(std::vector<Complex>{0.8, 0.6})};
  const std::vector<StateVector> t{StateVector(std::vector<Complex>{0.6, 0.8})};
  EXPECT_NEAR(loss_reconstruction(r, t), 0.08, 1e-15);
  const std::vector<StateVector> b{StateVector::basis(3, 0)};
  EXPECT_EQ(code_of([&] { loss_reconstruction(a, b); }), ErrorCode::DimMismatch);
}

TEST(LossReconstruction, BoundedBelowByAmplitudeError) {
  std::mt19937_64 rng(1);
  const auto a = random_states(4, 6, rng), b = random_states(4, 6, rng);
  double amp = 0.0;
  for (std::size_t m = 0; m < 4; ++m) {
    for (std::size_t n = 0; n < 6; ++n) amp += std::pow(a[m].modulus(n) - b[m].modulus(n), 2);
  }
  EXPECT_GE(loss_reconstruction(a, b), amp);
  EXPECT_GT(loss_reconstruction(a, b), 0.0);
}

TEST(LossInv, Examples) {
  const MeshNetwork id = build_network(4, Topology::Cross, 1, {0, 0});
  const CompressionChannel ch(4, 2);
  const std::vector<StateVector> inside{StateVector::basis(4, 0), StateVector::basis(4, 1)};
  EXPECT_EQ(loss_inv(id, ch, inside), 0.0);
  EXPECT_EQ(loss_inv(id, ch, std::vector{StateVector::basis(4, 3)}), 1.0);
  const double r = 1 / std::sqrt(2.0);
  EXPECT_NEAR(loss_inv(id, ch, std::vector{StateVector(std::vector<Complex>{r, 0, r, 0})}),
              0.5, 1e-15);
}

TEST(FdGradient, QuadraticProbe) {
  const ScalarLoss f = [](std::span<const double> p) {
    double s = 0.0;
    for (double x : p) s += x * x;
    return s;
  };
  const std::vector<double> p{1.0, -2.0};
  const auto g = fd_gradient(f, p, FdScheme::Central, 1e-6);
  EXPECT_NEAR(g[0], 2.0, 1e-6);
  EXPECT_NEAR(g[1], -4.0, 1e-6);
  const auto gf = fd_gradient(f, p, FdScheme::ForwardPaperLiteral, 1e-8);
  EXPECT_NEAR(gf[0], 2.0, 1e-5);
}

TEST(FdGradient, ConstantLossAndMask) {
  const ScalarLoss c = [](std::span<const double>) { return 3.25; };
  const std::vector<double> p{0.1, 0.2, 0.3};
  for (double x : fd_gradient(c, p, FdScheme::Central, 1e-6)) EXPECT_EQ(x, 0.0);
  const ScalarLoss lin = [](std::span<const double> q) { return q[0] + q[1] + q[2]; };
  const bool mask[] = {true, false, true};
  const auto g = fd_gradient(lin, p, FdScheme::Central, 1e-6, mask);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_NEAR(g[0], 1.0, 1e-9);
  EXPECT_EQ(code_of([&] { fd_gradient(lin, p, FdScheme::Central, 0.0); }),
            ErrorCode::InvalidParams);
}

TEST(AnalyticGradient, SingleGateSinTwoTheta) {
  for (double theta : {kPi / 4, 0.3, 1.1}) {
    const MeshNetwork enc(2, Topology::Order, Role::Encoder, {{GateParam{0, theta, 0.7}}});
    const MeshNetwork dec = inverse_of(enc);
    const CompressionChannel ch(2, 1);
    const std::vector<StateVector> in{StateVector::basis(2, 0)};
    EXPECT_NEAR(loss_inv(enc, ch, in), std::pow(std::sin(theta), 2), 1e-15);
    const NetworkGradient g =
        analytic_gradient(enc, dec, ch, in, in, LossKind::InvProbability);
    EXPECT_NEAR(g.enc[0], std::sin(2 * theta), 1e-12);
    EXPECT_NEAR(g.enc[1], 0.0, 1e-15);
  }
}

TEST(AnalyticGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(2024);
  for (int cfg = 0; cfg < 20; ++cfg) {
    const std::size_t n = cfg % 2 ? 8 : 4;
    const Topology topo = cfg % 3 ? Topology::Cross : Topology::Order;
    const MeshNetwork enc = random_network(n, topo, 1 + cfg % 3, rng);
    const MeshNetwork dec = random_network(n, topo, 1 + cfg % 2, rng, Role::Decoder);
    const CompressionChannel ch(n, 1 + cfg % (n - 1));
    const auto in = random_states(3, n, rng);
    const auto tgt = cfg % 4 == 0 ? random_states(3, n, rng) : in;
    for (LossKind kind : {LossKind::Reconstruction, LossKind::InvProbability}) {
      const NetworkGradient exact = analytic_gradient(enc, dec, ch, in, tgt, kind);
      const std::size_t ne = enc.parameter_count();
      const ScalarLoss f = [&](std::span<const double> p) {
        MeshNetwork e = enc, d = dec;
        e.set_parameters(p.subspan(0, ne));
        d.set_parameters(p.subspan(ne));
        return objective(e, d, ch, in, tgt, kind);
      };
      const auto fd = fd_gradient(f, concat(enc.parameters(), dec.parameters()),
                                  FdScheme::Central, 1e-6);
      expect_grad_close(fd, concat(exact.enc, exact.dec),
                        "config " + std::to_string(cfg));
    }
  }
}

TEST(AnalyticGradient, MirrorMatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  for (int cfg = 0; cfg < 6; ++cfg) {
    const std::size_t n = 4 + 2 * (cfg % 3);
    const MeshNetwork enc = random_network(n, Topology::Cross, 2, rng);
    const CompressionChannel ch(n, 2);
    const auto in = random_states(4, n, rng);
    for (LossKind kind : {LossKind::Reconstruction, LossKind::InvProbability}) {
      const auto exact = analytic_gradient_mirror(enc, ch, in, in, kind);
      const ScalarLoss f = [&](std::span<const double> p) {
        MeshNetwork e = enc;
        e.set_parameters(p);
        return objective(e, inverse_of(e), ch, in, in, kind);
      };
      expect_grad_close(fd_gradient(f, enc.parameters(), FdScheme::Central, 1e-6),
                        exact, "mirror " + std::to_string(cfg));
    }
  }
}

TEST(Objective, MirrorFullChannelIsLossless) {
  std::mt19937_64 rng(3);
  const MeshNetwork enc = random_network(8, Topology::Cross, 4, rng);
  const auto in = random_states(10, 8, rng);
  EXPECT_LE(objective(enc, inverse_of(enc), CompressionChannel(8, 8), in, in,
                      LossKind::Reconstruction),
            1e-20);
}

TEST(Config, Validation) {
  TrainingConfig cfg;
  cfg.d = 4;
  EXPECT_NO_THROW(cfg.validate(8));
  EXPECT_EQ(code_of([&] { cfg.validate(3); }), ErrorCode::InvalidParams);
  TrainingConfig zero_it = cfg;
  zero_it.iterations = 0;
  EXPECT_EQ(code_of([&] { zero_it.validate(8); }), ErrorCode::InvalidParams);
  TrainingConfig bad_eta = cfg;
  bad_eta.eta = 0.0;
  EXPECT_EQ(code_of([&] { bad_eta.validate(8); }), ErrorCode::InvalidParams);
  TrainingConfig bad_delta = cfg;
  bad_delta.delta = -1e-6;
  EXPECT_EQ(code_of([&] { bad_delta.validate(8); }), ErrorCode::InvalidParams);
}

TEST(Train, OneIterationOneRecord) {
  std::mt19937_64 rng(4);
  TrainingConfig cfg = small_config();
  cfg.iterations = 1;
  const TrainingResult r = train(cfg, random_states(3, 4, rng), random_states(3, 4, rng));
  EXPECT_EQ(r.history.records.size(), 1u);
  EXPECT_EQ(r.history.records[0].iter, 1u);
  EXPECT_EQ(r.history.records[0].wall_ms, 0.0);
}

TEST(Train, DescentOnSmallProbe) {
  std::mt19937_64 rng(5);
  const auto in = random_states(4, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.eta = 1e-3;
  cfg.iterations = 10;
  const MeshNetwork enc = initial_encoder(cfg, 4);
  const MeshNetwork dec = initial_decoder(cfg, enc);
  const double start =
      objective(enc, dec, CompressionChannel(4, cfg.d), in, in, LossKind::Reconstruction) /
      4.0;
  const TrainingResult r = train(cfg, in, in);
  double prev = start;
  for (const IterationRecord& rec : r.history.records) {
    EXPECT_LE(rec.loss, prev + 1e-15) << "iter " << rec.iter;
    prev = rec.loss;
  }
}

TEST(Train, HistoryMatchesFinalNetworks) {
  std::mt19937_64 rng(6);
  const auto in = random_states(5, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.iterations = 3;
  const TrainingResult r = train(cfg, in, in);
  const IterationRecord& last = r.history.records.back();
  const CompressionChannel ch(4, cfg.d);
  EXPECT_NEAR(objective(r.enc, r.dec, ch, in, in, LossKind::Reconstruction) / 4.0,
              last.loss, 1e-12);
  EXPECT_NEAR(loss_inv(r.enc, ch, in), last.loss_inv, 1e-12);
  EXPECT_EQ(r.history.final_enc_params, r.enc.parameters());
  EXPECT_EQ(r.history.final_dec_params, r.dec.parameters());
}

TEST(Train, DeterministicAcrossRunsAndThreadCounts) {
  std::mt19937_64 rng(7);
  const auto in = random_states(6, 8, rng);
  TrainingConfig cfg = small_config();
  cfg.threads = 1;
  const TrainingResult a = train(cfg, in, in);
  const TrainingResult b = train(cfg, in, in);
  cfg.threads = 4;
  const TrainingResult c = train(cfg, in, in);
  std::stringstream sa, sb, sc;
  write_history_csv(sa, a.history);
  write_history_csv(sb, b.history);
  write_history_csv(sc, c.history);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str(), sc.str());
  EXPECT_EQ(a.enc, c.enc);
  EXPECT_EQ(a.dec, c.dec);
}

TEST(Train, ThetaOnlyLeavesAlphaAlone) {
  std::mt19937_64 rng(8);
  const auto in = random_states(3, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.train_alpha = false;
  const TrainingResult r = train(cfg, in, in);
  for (const MeshNetwork* net : {&r.enc, &r.dec}) {
    for (std::size_t g = 0; g < net->gate_count(); ++g) {
      EXPECT_EQ(net->gate(g).alpha, cfg.init.alpha);
    }
  }
  for (const auto& rec : r.history.records) {
    EXPECT_EQ(rec.grad_alpha_enc, 0.0);
    EXPECT_EQ(rec.grad_alpha_dec, 0.0);
    EXPECT_GT(rec.grad_theta_enc, 0.0);
  }
}

TEST(Train, FreezeFlags) {
  std::mt19937_64 rng(9);
  const auto in = random_states(3, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.freeze_encoder = true;
  const TrainingResult r = train(cfg, in, in);
  EXPECT_EQ(r.enc, initial_encoder(cfg, 4));
  EXPECT_NE(r.dec, initial_decoder(cfg, r.enc));
  cfg.freeze_encoder = false;
  cfg.freeze_decoder = true;
  const TrainingResult s = train(cfg, in, in);
  EXPECT_EQ(s.dec, initial_decoder(cfg, initial_encoder(cfg, 4)));
}

TEST(Train, MirrorDecoderTracksEncoder) {
  std::mt19937_64 rng(10);
  const auto in = random_states(3, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.decoder_mode = DecoderMode::MirrorInverse;
  const TrainingResult r = train(cfg, in, in);
  EXPECT_EQ(r.dec, inverse_of(r.enc));
  for (const auto& rec : r.history.records) EXPECT_EQ(rec.grad_theta_dec, 0.0);
}

TEST(Train, AnalyticAndFdTrajectoriesAgree) {
  std::mt19937_64 rng(11);
  const auto in = random_states(4, 4, rng);
  TrainingConfig cfg = small_config();
  const TrainingResult fd = train(cfg, in, in);
  cfg.gradient = GradientMethod::Analytic;
  const TrainingResult an = train(cfg, in, in);
  for (std::size_t i = 0; i < fd.history.records.size(); ++i) {
    EXPECT_NEAR(fd.history.records[i].loss, an.history.records[i].loss, 1e-9);
  }
}

TEST(Train, ForwardSchemeRuns) {
  std::mt19937_64 rng(12);
  const auto in = random_states(3, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.fd_scheme = FdScheme::ForwardPaperLiteral;
  cfg.delta = 1e-8;
  const TrainingResult r = train(cfg, in, in);
  EXPECT_LT(r.history.records.back().loss, 1.0);
}

TEST(Train, DivergentStepIsNumericFailure) {
  std::mt19937_64 rng(13);
  const auto in = random_states(3, 4, rng);
  TrainingConfig cfg = small_config();
  cfg.eta = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { train(cfg, in, in); }), ErrorCode::NonFiniteLoss);
}

TEST(Train, RejectsUnnormalizedInputs) {
  TrainingConfig cfg = small_config();
  const std::vector<StateVector> bad{StateVector(std::vector<Complex>{1, 1, 0, 0})};
  EXPECT_EQ(code_of([&] { train(cfg, bad, bad); }), ErrorCode::NotNormalized);
}

TEST(HistoryCsv, Header) {
  std::stringstream ss;
  write_history_csv(ss, {});
  EXPECT_EQ(ss.str(),
            "iter,loss,loss_inv,e_amp,e_pha,grad_norm_theta_enc,grad_norm_theta_dec,"
            "grad_norm_alpha_enc,grad_norm_alpha_dec,wall_ms\n");
}
