// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qscd/error.hpp"

namespace qscd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRejectFloor = 1e-12;

void check_dims(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw Error(ErrorCode::DimMismatch,
                std::string(what) + ": network has " +
                    std::to_string(expected) + " modes, state has " +
                    std::to_string(got));
  }
}

// Multiplies a by e^{i phi} with the same arithmetic on every code path.
inline void rotate_phase(double& re, double& im, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double r = re, i = im;
  re = c * r - s * i;
  im = c * i + s * r;
}

void apply_block(const kernels::Block2& u, StateVector& v, std::size_t k) {
  double ar = v[k].real(), ai = v[k].imag();
  double br = v[k + 1].real(), bi = v[k + 1].imag();
  kernels::apply_block_lane(u, ar, ai, br, bi);
  v[k] = {ar, ai};
  v[k + 1] = {br, bi};
}

void apply_output_phases(const MeshNetwork& net, StateVector& v) {
  const auto& phases = net.output_phases();
  for (std::size_t k = 0; k < phases.size(); ++k) {
    double re = v[k].real(), im = v[k].imag();
    rotate_phase(re, im, phases[k]);
    v[k] = {re, im};
  }
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string_view to_string(Topology t) noexcept {
  return t == Topology::Cross ? "Cross" : "Order";
}

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Encoder:
      return "Encoder";
    case Role::Decoder:
      return "Decoder";
    case Role::InverseOfEncoder:
      return "InverseOfEncoder";
  }
  return "Encoder";
}

Topology parse_topology(std::string_view s) {
  if (s == "Cross" || s == "cross") return Topology::Cross;
  if (s == "Order" || s == "order") return Topology::Order;
  throw Error(ErrorCode::ParseError, "unknown topology '" + std::string(s) + "'");
}

Role parse_role(std::string_view s) {
  if (s == "Encoder") return Role::Encoder;
  if (s == "Decoder") return Role::Decoder;
  if (s == "InverseOfEncoder") return Role::InverseOfEncoder;
  throw Error(ErrorCode::ParseError, "unknown role '" + std::string(s) + "'");
}

GateInit default_init() noexcept { return {kPi / 3.0, 2.0 * kPi / 3.0}; }

std::vector<std::size_t> layer_modes(std::size_t n_modes, Topology topology,
                                     Role role) {
  if (n_modes < 2) {
    throw Error(ErrorCode::InvalidParams, "a mesh needs at least 2 modes");
  }
  std::vector<std::size_t> ks;
  ks.reserve(n_modes - 1);
  if (topology == Topology::Cross) {
    if (n_modes % 2 != 0) {
      throw Error(ErrorCode::OddModesForCross,
                  "Cross topology needs an even mode count, got " +
                      std::to_string(n_modes));
    }
    for (std::size_t k = 0; k + 1 < n_modes; k += 2) ks.push_back(k);
    for (std::size_t k = 1; k + 2 < n_modes; k += 2) ks.push_back(k);
  } else {
    for (std::size_t k = 0; k + 1 < n_modes; ++k) ks.push_back(k);
  }
  if (role != Role::Encoder) std::reverse(ks.begin(), ks.end());
  return ks;
}

MeshNetwork::MeshNetwork(std::size_t n_modes, Topology topology, Role role,
                         std::vector<Layer> layers,
                         std::vector<double> output_phases)
    : n_modes_(n_modes),
      topology_(topology),
      role_(role),
      layers_(std::move(layers)),
      output_phases_(std::move(output_phases)) {
  if (n_modes_ < 2) {
    throw Error(ErrorCode::InvalidParams, "a mesh needs at least 2 modes");
  }
  if (!output_phases_.empty() && output_phases_.size() != n_modes_) {
    throw Error(ErrorCode::DimMismatch, "output phase screen has " +
                                            std::to_string(output_phases_.size()) +
                                            " entries for " +
                                            std::to_string(n_modes_) + " modes");
  }
  layer_offsets_.reserve(layers_.size() + 1);
  std::size_t offset = 0;
  for (const Layer& layer : layers_) {
    layer_offsets_.push_back(offset);
    for (const GateParam& g : layer) {
      if (g.k + 1 >= n_modes_) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "gate at k=" + std::to_string(g.k) + " in " +
                        std::to_string(n_modes_) + "-mode mesh");
      }
    }
    offset += layer.size();
  }
  layer_offsets_.push_back(offset);
}

std::size_t MeshNetwork::gate_count() const noexcept {
  return layer_offsets_.empty() ? 0 : layer_offsets_.back();
}

const GateParam& MeshNetwork::gate(std::size_t i) const {
  return const_cast<MeshNetwork*>(this)->gate(i);
}

GateParam& MeshNetwork::gate(std::size_t i) {
  if (i >= gate_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "gate " + std::to_string(i));
  }
  const auto it =
      std::upper_bound(layer_offsets_.begin(), layer_offsets_.end(), i);
  const std::size_t layer = static_cast<std::size_t>(it - layer_offsets_.begin()) - 1;
  return layers_[layer][i - layer_offsets_[layer]];
}

std::vector<double> MeshNetwork::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const Layer& layer : layers_) {
    for (const GateParam& g : layer) {
      p.push_back(g.theta);
      p.push_back(g.alpha);
    }
  }
  return p;
}

void MeshNetwork::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) {
    throw Error(ErrorCode::DimMismatch,
                "expected " + std::to_string(parameter_count()) +
                    " parameters, got " + std::to_string(params.size()));
  }
  std::size_t i = 0;
  for (Layer& layer : layers_) {
    for (GateParam& g : layer) {
      g.theta = params[i++];
      g.alpha = params[i++];
    }
  }
}

CompressionChannel::CompressionChannel(std::size_t n_modes, std::size_t d)
    : n_modes_(n_modes), d_(d) {
  if (d < 1 || d > n_modes) {
    throw Error(ErrorCode::InvalidParams,
                "retained dimension " + std::to_string(d) +
                    " outside [1, " + std::to_string(n_modes) + "]");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t size) {
  DenseMatrix m(size);
  for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n != b.n) throw Error(ErrorCode::DimMismatch, "matrix product");
  DenseMatrix c(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t k = 0; k < a.n; ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < a.n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

StateVector operator*(const DenseMatrix& a, const StateVector& v) {
  check_dims(a.n, v.dim(), "matrix-vector product");
  StateVector out(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    Complex sum = 0.0;
    for (std::size_t j = 0; j < a.n; ++j) sum += a(i, j) * v[j];
    out[i] = sum;
  }
  return out;
}

DenseMatrix adjoint(const DenseMatrix& a) {
  DenseMatrix t(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) t(j, i) = std::conj(a(i, j));
  }
  return t;
}

double unitarity_deviation(const DenseMatrix& a) {
  return max_abs_diff(adjoint(a) * a, DenseMatrix::identity(a.n));
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n != b.n) throw Error(ErrorCode::DimMismatch, "matrix difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  }
  return m;
}

kernels::Block2 gate_block(double theta, double alpha, bool adjoint) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double er = std::cos(alpha), ei = std::sin(alpha);
  kernels::Block2 u{};
  if (!adjoint) {
    u.re[0] = er * c;  u.im[0] = ei * c;
    u.re[1] = -s;      u.im[1] = 0.0;
    u.re[2] = er * s;  u.im[2] = ei * s;
    u.re[3] = c;       u.im[3] = 0.0;
  } else {
    u.re[0] = er * c;  u.im[0] = -ei * c;
    u.re[1] = er * s;  u.im[1] = -ei * s;
    u.re[2] = -s;      u.im[2] = 0.0;
    u.re[3] = c;       u.im[3] = 0.0;
  }
  return u;
}

MeshNetwork build_network(std::size_t n_modes, Topology topology,
                          std::size_t n_layers, GateInit init, Role role) {
  if (n_layers < 1) {
    throw Error(ErrorCode::InvalidParams, "a mesh needs at least one layer");
  }
  const std::vector<std::size_t> ks = layer_modes(n_modes, topology, role);
  std::vector<MeshNetwork::Layer> layers(n_layers);
  for (auto& layer : layers) {
    layer.reserve(ks.size());
    for (std::size_t k : ks) layer.push_back({k, init.theta, init.alpha});
  }
  return MeshNetwork(n_modes, topology, role, std::move(layers));
}

StateVector gate_apply(const StateVector& state, const GateParam& g) {
  if (g.k + 1 >= state.dim()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "gate at k=" + std::to_string(g.k) + " on dim " +
                    std::to_string(state.dim()));
  }
  StateVector out = state;
  apply_block(gate_block(g.theta, g.alpha), out, g.k);
  return out;
}

StateVector forward(const MeshNetwork& net, const StateVector& state) {
  check_dims(net.n_modes(), state.dim(), "forward");
  StateVector out = state;
  const bool adj = net.adjoint_gates();
  for (const auto& layer : net.layers()) {
    for (const GateParam& g : layer) {
      apply_block(gate_block(g.theta, g.alpha, adj), out, g.k);
    }
  }
  apply_output_phases(net, out);
  return out;
}

void forward(const MeshNetwork& net, StateBatch& batch,
             const kernels::KernelTable& kt) {
  check_dims(net.n_modes(), batch.n_modes(), "forward");
  const bool adj = net.adjoint_gates();
  for (const auto& layer : net.layers()) {
    for (const GateParam& g : layer) {
      batch.apply_block(gate_block(g.theta, g.alpha, adj), g.k, kt);
    }
  }
  const auto& phases = net.output_phases();
  for (std::size_t k = 0; k < phases.size(); ++k) {
    double* re = batch.re_row(k);
    double* im = batch.im_row(k);
    for (std::size_t j = 0; j < batch.stride(); ++j) {
      rotate_phase(re[j], im[j], phases[k]);
    }
  }
}

MeshNetwork inverse_of(const MeshNetwork& net) {
  if (!net.output_phases().empty()) {
    throw Error(ErrorCode::InvalidParams,
                "inverse_of does not support an output phase screen");
  }
  std::vector<MeshNetwork::Layer> layers(net.layers().rbegin(),
                                         net.layers().rend());
  for (auto& layer : layers) std::reverse(layer.begin(), layer.end());
  const Role role =
      net.adjoint_gates() ? Role::Encoder : Role::InverseOfEncoder;
  return MeshNetwork(net.n_modes(), net.topology(), role, std::move(layers));
}

DenseMatrix materialize(const MeshNetwork& net) {
  const std::size_t n = net.n_modes();
  DenseMatrix total = DenseMatrix::identity(n);
  const bool adj = net.adjoint_gates();
  for (const auto& layer : net.layers()) {
    for (const GateParam& g : layer) {
      const kernels::Block2 u = gate_block(g.theta, g.alpha, adj);
      DenseMatrix embedded = DenseMatrix::identity(n);
      embedded(g.k, g.k) = {u.re[0], u.im[0]};
      embedded(g.k, g.k + 1) = {u.re[1], u.im[1]};
      embedded(g.k + 1, g.k) = {u.re[2], u.im[2]};
      embedded(g.k + 1, g.k + 1) = {u.re[3], u.im[3]};
      total = embedded * total;
    }
  }
  if (!net.output_phases().empty()) {
    DenseMatrix screen(n);
    for (std::size_t k = 0; k < n; ++k) {
      screen(k, k) = std::polar(1.0, net.output_phases()[k]);
    }
    total = screen * total;
  }
  return total;
}

Projection project(const StateVector& state, const CompressionChannel& ch) {
  check_dims(ch.n_modes(), state.dim(), "project");
  Projection p{StateVector(state.dim()), 0.0};
  for (std::size_t n = 0; n < ch.d(); ++n) {
    p.chi[n] = state[n];
    p.kept_prob = p.kept_prob + std::norm(state[n]);
  }
  return p;
}

StateVector compress_decode(const MeshNetwork& enc, const MeshNetwork& dec,
                            const CompressionChannel& ch,
                            const StateVector& psi) {
  check_dims(enc.n_modes(), psi.dim(), "compress_decode encoder");
  check_dims(dec.n_modes(), psi.dim(), "compress_decode decoder");
  Projection p = project(forward(enc, psi), ch);
  if (!(p.kept_prob >= kRejectFloor)) {
    throw Error(ErrorCode::FullyRejected,
                "kept probability " + format_double(p.kept_prob));
  }
  const double factor = 1.0 / std::sqrt(p.kept_prob);
  for (std::size_t n = 0; n < ch.d(); ++n) {
    p.chi[n] = {p.chi[n].real() * factor, p.chi[n].imag() * factor};
  }
  return forward(dec, p.chi);
}

std::vector<double> compress_decode(const MeshNetwork& enc,
                                    const MeshNetwork& dec,
                                    const CompressionChannel& ch,
                                    StateBatch& batch,
                                    const kernels::KernelTable& kt) {
  check_dims(enc.n_modes(), batch.n_modes(), "compress_decode encoder");
  check_dims(dec.n_modes(), batch.n_modes(), "compress_decode decoder");
  forward(enc, batch, kt);
  std::vector<double> kept(batch.stride());
  batch.row_norm_sq(0, ch.d(), kept, kt);
  std::vector<double> factor(batch.stride(), 0.0);
  for (std::size_t m = 0; m < batch.n_samples(); ++m) {
    if (!(kept[m] >= kRejectFloor)) {
      throw Error(ErrorCode::FullyRejected,
                  "sample " + std::to_string(m) + " kept probability " +
                      format_double(kept[m]));
    }
    factor[m] = 1.0 / std::sqrt(kept[m]);
  }
  batch.zero_rows_from(ch.d());
  batch.scale_rows(0, ch.d(), factor, kt);
  forward(dec, batch, kt);
  kept.resize(batch.n_samples());
  return kept;
}

MeshNetwork export_physical(const MeshNetwork& net) {
  const std::size_t n = net.n_modes();
  std::vector<double> screen(n, 0.0);
  std::vector<MeshNetwork::Layer> layers = net.layers();
  const bool adj = net.adjoint_gates();

  for (auto& layer : layers) {
    for (GateParam& g : layer) {
      double q0 = 0.0, q1 = 0.0;
      double theta = g.theta, alpha = g.alpha;
      if (adj) {
        // U^dagger(theta, alpha) = diag(e^{-i alpha}, 1) U(-theta, 0)
        q0 = -alpha;
        theta = -theta;
        alpha = 0.0;
      }
      // U(theta + m*pi) = (-1)^m U(theta); reduce into (-pi/2, pi/2].
      const double m = std::ceil((theta - kPi / 2.0) / kPi);
      theta -= m * kPi;
      if (std::fmod(std::abs(m), 2.0) == 1.0) {
        q0 += kPi;
        q1 += kPi;
      }
      // U(-t, a) = diag(-1, 1) U(t, a + pi)
      if (theta < 0.0) {
        theta = -theta;
        alpha += kPi;
        q0 += kPi;
      }
      // U(t, a) diag(e^{i p0}, e^{i p1}) = e^{i p1} U(t, a + p0 - p1)
      alpha += screen[g.k] - screen[g.k + 1];
      screen[g.k] = screen[g.k + 1] + q0;
      screen[g.k + 1] += q1;

      g.theta = theta;
      g.alpha = wrap_phase(alpha);
    }
  }

  for (std::size_t k = 0; k < net.output_phases().size(); ++k) {
    screen[k] += net.output_phases()[k];
  }
  bool any = false;
  for (double& phi : screen) {
    phi = wrap_phase(phi);
    any = any || phi != 0.0;
  }
  if (!any) screen.clear();

  const Role role = adj ? Role::Decoder : net.role();
  return MeshNetwork(n, net.topology(), role, std::move(layers),
                     std::move(screen));
}

void write_network(std::ostream& os, const MeshNetwork& net) {
  os << net.n_modes() << ' ' << to_string(net.topology()) << ' '
     << net.n_layers() << ' ' << to_string(net.role()) << '\n';
  for (std::size_t l = 0; l < net.n_layers(); ++l) {
    for (const GateParam& g : net.layers()[l]) {
      os << l << ' ' << g.k << ' ' << format_double(g.theta) << ' '
         << format_double(g.alpha) << '\n';
    }
  }
  const auto& phases = net.output_phases();
  for (std::size_t k = 0; k < phases.size(); ++k) {
    os << "phase " << k << ' ' << format_double(phases[k]) << '\n';
  }
}

MeshNetwork read_network(std::istream& is) {
  std::string line;
  auto fail = [](const std::string& msg) -> MeshNetwork {
    throw Error(ErrorCode::ParseError, "network file: " + msg);
  };
  if (!std::getline(is, line)) return fail("missing header");
  std::istringstream header(line);
  std::size_t n_modes = 0, n_layers = 0;
  std::string topo, role;
  if (!(header >> n_modes >> topo >> n_layers >> role)) {
    return fail("malformed header '" + line + "'");
  }
  std::vector<MeshNetwork::Layer> layers(n_layers);
  std::vector<double> phases;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line.rfind("phase", 0) == 0) {
      std::string tag;
      std::size_t k = 0;
      double value = 0.0;
      if (!(ls >> tag >> k >> value) || k != phases.size()) {
        return fail("bad phase line " + std::to_string(line_no));
      }
      phases.push_back(value);
      continue;
    }
    std::size_t layer = 0;
    GateParam g;
    if (!(ls >> layer >> g.k >> g.theta >> g.alpha) || layer >= n_layers) {
      return fail("bad gate line " + std::to_string(line_no));
    }
    layers[layer].push_back(g);
  }
  return MeshNetwork(n_modes, parse_topology(topo), parse_role(role),
                     std::move(layers), std::move(phases));
}

void save_network(const std::string& path, const MeshNetwork& net) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_network(os, net);
}

MeshNetwork load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  return read_network(is);
}

}  // namespace qscd
