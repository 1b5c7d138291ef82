// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "qscd/error.hpp"
#include "qscd/letters_data.hpp"

namespace qscd {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, stream id, index).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  return std::mt19937_64(
      splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index));
}

std::vector<Complex> gaussian_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> v(n);
  for (Complex& c : v) {
    const double re = normal(rng);
    const double im = normal(rng);
    c = {re, im};
  }
  return v;
}

// Columns of an N x d isometry via modified Gram-Schmidt.
std::vector<std::vector<Complex>> random_isometry(std::uint64_t seed,
                                                  std::size_t n,
                                                  std::size_t d) {
  std::mt19937_64 rng = substream(seed, 0x15e7, 0);
  std::vector<std::vector<Complex>> cols;
  while (cols.size() < d) {
    std::vector<Complex> v = gaussian_vector(rng, n);
    for (const auto& q : cols) {
      Complex proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(q[i]) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= proj * q[i];
    }
    double norm = 0.0;
    for (const Complex& c : v) norm += std::norm(c);
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (Complex& c : v) c /= norm;
    cols.push_back(std::move(v));
  }
  return cols;
}

std::vector<double> parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    while (end != nullptr && (*end == ' ' || *end == '\r')) ++end;
    if (end == cell.c_str() || (end != nullptr && *end != '\0')) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": bad number '" + cell + "'");
    }
    values.push_back(v);
  }
  return values;
}

std::vector<std::string> header_fields(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#') {
    throw Error(ErrorCode::ParseError, "missing '#' header line");
  }
  std::istringstream hs(line.substr(1));
  std::vector<std::string> fields;
  std::string f;
  while (hs >> f) fields.push_back(f);
  return fields;
}

std::size_t to_size(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ParseError,
              std::string("header field ") + what + " is not a count: '" + s +
                  "'");
}

}  // namespace

std::size_t padded_dim(std::size_t n_values) {
  std::size_t n = 2;
  while (n < n_values) n *= 2;
  return n;
}

EncodedSample image_to_state(const ImageSample& img) {
  const std::size_t count = img.rows * img.cols;
  if (count == 0 || img.pixels.size() != count) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(img.pixels.size()) + " pixels for shape " +
                    std::to_string(img.rows) + "x" + std::to_string(img.cols));
  }
  for (double x : img.pixels) {
    if (!(x >= 0.0 && std::isfinite(x))) {
      throw Error(ErrorCode::InvalidParams,
                  "pixel value " + format_double(x) + " is negative or not finite");
    }
  }
  std::vector<double> padded(padded_dim(count), 0.0);
  std::copy(img.pixels.begin(), img.pixels.end(), padded.begin());
  try {
    NormalizedState ns = normalize(padded);
    return {std::move(ns.unit), ns.sigma, img.rows, img.cols};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVector) throw;
    throw Error(ErrorCode::ZeroImage,
                "image " + std::to_string(img.id) + " has no nonzero pixel");
  }
}

ImageSample state_to_image(std::span<const double> moduli, double sigma,
                           std::size_t rows, std::size_t cols) {
  const std::size_t count = rows * cols;
  if (moduli.size() < count) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(moduli.size()) + " amplitudes for shape " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "sigma must be positive");
  }
  ImageSample img{rows, cols, std::vector<double>(count), 0};
  for (std::size_t n = 0; n < count; ++n) img.pixels[n] = sigma * moduli[n];
  return img;
}

std::vector<double> measure_probabilities(const StateVector& state) {
  if (!state.is_normalized(1e-9)) {
    throw Error(ErrorCode::NotNormalized,
                "norm^2 = " + format_double(state.norm_sq()));
  }
  std::vector<double> p(state.dim());
  for (std::size_t n = 0; n < state.dim(); ++n) p[n] = std::norm(state[n]);
  return p;
}

std::vector<double> measured_moduli(const StateVector& state) {
  std::vector<double> r = measure_probabilities(state);
  for (double& x : r) x = std::sqrt(x);
  return r;
}

std::vector<StateVector> gen_complex_states(const ComplexStateParams& p) {
  if (p.dim < 2 || p.count < 1) {
    throw Error(ErrorCode::InvalidParams, "need dim >= 2 and count >= 1");
  }
  const bool subspace = p.mode == StateDistribution::SubspaceSupported;
  if (subspace && (p.d < 1 || p.d > p.dim || !(p.noise >= 0.0))) {
    throw Error(ErrorCode::InvalidParams,
                "subspace mode needs 1 <= d <= N and noise >= 0");
  }

  std::vector<std::vector<Complex>> basis;
  if (subspace) basis = random_isometry(p.seed, p.dim, p.d);

  std::vector<StateVector> out;
  out.reserve(p.count);
  for (std::size_t m = 0; m < p.count; ++m) {
    std::mt19937_64 rng = substream(p.seed, 0x5a3f, m);
    if (!subspace) {
      const std::vector<Complex> v = gaussian_vector(rng, p.dim);
      out.push_back(normalize(v).unit);
      continue;
    }
    const std::vector<Complex> w = gaussian_vector(rng, p.d);
    std::vector<Complex> signal(p.dim, 0.0);
    for (std::size_t j = 0; j < p.d; ++j) {
      for (std::size_t i = 0; i < p.dim; ++i) signal[i] += basis[j][i] * w[j];
    }
    StateVector u = normalize(signal).unit;
    const StateVector e = normalize(gaussian_vector(rng, p.dim)).unit;
    std::vector<Complex> mixed(p.dim);
    for (std::size_t i = 0; i < p.dim; ++i) mixed[i] = u[i] + p.noise * e[i];
    out.push_back(normalize(mixed).unit);
  }
  return out;
}

std::string mode_token(const ComplexStateParams& p) {
  if (p.mode == StateDistribution::UniformRandom) return "uniform";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, p.noise);
  return "subspace:" + std::to_string(p.d) + ":" + std::string(buf, res.ptr);
}

ImageDataset letters_dataset() {
  std::istringstream is(detail::kLettersCsv);
  return read_image_csv(is);
}

void write_image_csv(std::ostream& os, const ImageDataset& ds) {
  os << "# " << ds.rows << ' ' << ds.cols << ' ' << ds.images.size() << '\n';
  for (const ImageSample& img : ds.images) {
    for (std::size_t n = 0; n < img.pixels.size(); ++n) {
      if (n > 0) os << ',';
      os << format_double(img.pixels[n]);
    }
    os << '\n';
  }
}

void write_reconstruction_csv(std::ostream& os, const ImageDataset& ds) {
  ImageDataset clipped = ds;
  for (ImageSample& img : clipped.images) {
    for (double& x : img.pixels) x = std::clamp(x, 0.0, 1.0);
  }
  write_image_csv(os, clipped);
}

ImageDataset read_image_csv(std::istream& is) {
  const std::vector<std::string> h = header_fields(is);
  if (h.size() != 3) {
    throw Error(ErrorCode::ParseError, "image header must be '# D1 D2 M'");
  }
  ImageDataset ds;
  ds.rows = to_size(h[0], "D1");
  ds.cols = to_size(h[1], "D2");
  const std::size_t m = to_size(h[2], "M");
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<double> px = parse_row(line, line_no);
    if (px.size() != ds.rows * ds.cols) {
      throw Error(ErrorCode::ShapeMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(px.size()) + " pixels, expected " +
                      std::to_string(ds.rows * ds.cols));
    }
    for (double x : px) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::InvalidParams,
                    "line " + std::to_string(line_no) + ": pixel outside [0, 1]");
      }
    }
    ds.images.push_back({ds.rows, ds.cols, std::move(px), ds.images.size()});
  }
  if (ds.images.size() != m) {
    throw Error(ErrorCode::ShapeMismatch,
                "header promises " + std::to_string(m) + " images, found " +
                    std::to_string(ds.images.size()));
  }
  return ds;
}

ImageDataset load_image_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  return read_image_csv(is);
}

void write_complex_csv(std::ostream& os, const ComplexDataset& ds) {
  os << "# " << ds.dim << ' ' << ds.states.size() << ' ' << ds.seed << ' '
     << ds.mode << '\n';
  for (const StateVector& s : ds.states) {
    for (std::size_t n = 0; n < s.dim(); ++n) {
      if (n > 0) os << ',';
      os << format_double(s[n].real()) << ',' << format_double(s[n].imag());
    }
    os << '\n';
  }
}

ComplexDataset read_complex_csv(std::istream& is) {
  const std::vector<std::string> h = header_fields(is);
  if (h.size() != 4) {
    throw Error(ErrorCode::ParseError,
                "complex-state header must be '# N M seed mode'");
  }
  ComplexDataset ds;
  ds.dim = to_size(h[0], "N");
  const std::size_t m = to_size(h[1], "M");
  ds.seed = h[2];
  ds.mode = h[3];
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<double> v = parse_row(line, line_no);
    if (v.size() != 2 * ds.dim) {
      throw Error(ErrorCode::ShapeMismatch,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(v.size()) + " values, expected " +
                      std::to_string(2 * ds.dim));
    }
    StateVector s(ds.dim);
    for (std::size_t n = 0; n < ds.dim; ++n) s[n] = {v[2 * n], v[2 * n + 1]};
    ds.states.push_back(std::move(s));
  }
  if (ds.states.size() != m) {
    throw Error(ErrorCode::ShapeMismatch,
                "header promises " + std::to_string(m) + " states, found " +
                    std::to_string(ds.states.size()));
  }
  return ds;
}

ComplexDataset load_complex_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path);
  return read_complex_csv(is);
}

}  // namespace qscd
