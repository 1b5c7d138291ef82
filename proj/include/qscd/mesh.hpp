// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qscd/kernels.hpp"
#include "qscd/state_batch.hpp"
#include "qscd/state_vector.hpp"

namespace qscd {

enum class Topology { Cross, Order };

/// Encoder and Decoder networks hold forward gates. An InverseOfEncoder
/// network holds the adjoint of every gate it lists.
enum class Role { Encoder, Decoder, InverseOfEncoder };

std::string_view to_string(Topology t) noexcept;
std::string_view to_string(Role r) noexcept;
Topology parse_topology(std::string_view s);
Role parse_role(std::string_view s);

/// Two-mode gate on modes (k, k+1):
///   U|k>   = e^{i alpha} (cos theta |k> + sin theta |k+1>)
///   U|k+1> = -sin theta |k> + cos theta |k+1>
struct GateParam {
  std::size_t k = 0;
  double theta = 0.0;
  double alpha = 0.0;

  friend bool operator==(const GateParam&, const GateParam&) = default;
};

struct GateInit {
  double theta;
  double alpha;
};

/// Default initial gate parameters (pi/3, 2*pi/3).
GateInit default_init() noexcept;

/// Mode indices of one layer, in application order.
std::vector<std::size_t> layer_modes(std::size_t n_modes, Topology topology,
                                     Role role);

class MeshNetwork {
 public:
  using Layer = std::vector<GateParam>;

  MeshNetwork() = default;
  MeshNetwork(std::size_t n_modes, Topology topology, Role role,
              std::vector<Layer> layers,
              std::vector<double> output_phases = {});

  std::size_t n_modes() const noexcept { return n_modes_; }
  Topology topology() const noexcept { return topology_; }
  Role role() const noexcept { return role_; }
  bool adjoint_gates() const noexcept {
    return role_ == Role::InverseOfEncoder;
  }

  const std::vector<Layer>& layers() const noexcept { return layers_; }
  std::size_t n_layers() const noexcept { return layers_.size(); }
  std::size_t gate_count() const noexcept;
  std::size_t parameter_count() const noexcept { return 2 * gate_count(); }

  /// Gate by flat index in application order.
  const GateParam& gate(std::size_t i) const;
  GateParam& gate(std::size_t i);

  /// Diagonal phase screen applied after the last layer; empty when absent.
  const std::vector<double>& output_phases() const noexcept {
    return output_phases_;
  }

  /// Parameters as (theta_0, alpha_0, theta_1, alpha_1, ...) in
  /// application order.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);

  friend bool operator==(const MeshNetwork&, const MeshNetwork&) = default;

 private:
  std::size_t n_modes_ = 0;
  Topology topology_ = Topology::Cross;
  Role role_ = Role::Encoder;
  std::vector<Layer> layers_;
  std::vector<double> output_phases_;
  std::vector<std::size_t> layer_offsets_;
};

/// Keeps modes 0..d-1 (P_0) and discards modes d..N-1 (P_1).
class CompressionChannel {
 public:
  CompressionChannel(std::size_t n_modes, std::size_t d);
  std::size_t n_modes() const noexcept { return n_modes_; }
  std::size_t d() const noexcept { return d_; }

 private:
  std::size_t n_modes_;
  std::size_t d_;
};

/// Dense row-major complex matrix.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<Complex> data;

  explicit DenseMatrix(std::size_t size = 0) : n(size), data(size * size) {}
  static DenseMatrix identity(std::size_t size);

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const {
    return data[r * n + c];
  }
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
StateVector operator*(const DenseMatrix& a, const StateVector& v);
DenseMatrix adjoint(const DenseMatrix& a);
/// max |(a^dagger a - I)_ij|
double unitarity_deviation(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// 2x2 block of a gate, or of its adjoint.
kernels::Block2 gate_block(double theta, double alpha, bool adjoint = false);

MeshNetwork build_network(std::size_t n_modes, Topology topology,
                          std::size_t n_layers,
                          GateInit init = default_init(),
                          Role role = Role::Encoder);

StateVector gate_apply(const StateVector& state, const GateParam& g);

StateVector forward(const MeshNetwork& net, const StateVector& state);
void forward(const MeshNetwork& net, StateBatch& batch,
             const kernels::KernelTable& kt = kernels::active_table());

/// Network implementing the adjoint of net. Requires net to have no output
/// phase screen.
MeshNetwork inverse_of(const MeshNetwork& net);

DenseMatrix materialize(const MeshNetwork& net);

struct Projection {
  StateVector chi;
  double kept_prob = 0.0;
};

Projection project(const StateVector& state, const CompressionChannel& ch);

/// T_D(chi / sqrt(<chi|chi>)) with chi = P_0 T_E psi.
StateVector compress_decode(const MeshNetwork& enc, const MeshNetwork& dec,
                            const CompressionChannel& ch,
                            const StateVector& psi);

/// Batched compress_decode. Returns per-sample kept probabilities (before
/// renormalization); batch holds the decoded states afterwards.
std::vector<double> compress_decode(
    const MeshNetwork& enc, const MeshNetwork& dec,
    const CompressionChannel& ch, StateBatch& batch,
    const kernels::KernelTable& kt = kernels::active_table());

/// Equivalent network with every theta in [0, pi/2] and alpha in [0, 2*pi).
/// Sign and phase factors produced by folding are pushed through later gates
/// into the output phase screen.
MeshNetwork export_physical(const MeshNetwork& net);

// Text format:
//   n_modes topology n_layers role
//   layer k theta alpha          (one line per gate, application order)
//   phase k value                (output screen, only when present)
void write_network(std::ostream& os, const MeshNetwork& net);
MeshNetwork read_network(std::istream& is);
void save_network(const std::string& path, const MeshNetwork& net);
MeshNetwork load_network(const std::string& path);

}  // namespace qscd
