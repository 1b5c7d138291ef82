// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qscd/state_vector.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qscd/error.hpp"

namespace qscd {

namespace {

constexpr double kZeroEntry = 1e-15;
constexpr double kPhaseFloor = 1e-12;
constexpr double kFidelityNormTol = 1e-9;

template <typename T>
NormalizedState normalize_impl(std::span<const T> v) {
  bool any_nonzero = false;
  double sum = 0.0;
  for (const T& x : v) {
    const double a = std::abs(x);
    if (a >= kZeroEntry) any_nonzero = true;
    sum += a * a;
  }
  if (!any_nonzero) {
    throw Error(ErrorCode::ZeroVector, "cannot normalize a vector of " +
                                           std::to_string(v.size()) +
                                           " zero entries");
  }
  const double sigma = std::sqrt(sum);
  std::vector<Complex> amps(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) amps[n] = Complex(v[n]) / sigma;
  return {StateVector(std::move(amps)), sigma};
}

void require_same_dim(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimMismatch, "dimensions " + std::to_string(a.dim()) +
                                            " and " + std::to_string(b.dim()));
  }
}

}  // namespace

StateVector StateVector::basis(std::size_t dim, std::size_t n) {
  if (n >= dim) {
    throw Error(ErrorCode::IndexOutOfRange,
                "basis index " + std::to_string(n) + " in dim " +
                    std::to_string(dim));
  }
  StateVector s(dim);
  s.amps_[n] = 1.0;
  return s;
}

double StateVector::norm_sq() const noexcept {
  double sum = 0.0;
  for (const Complex& a : amps_) sum += std::norm(a);
  return sum;
}

double StateVector::phase(std::size_t n) const {
  const Complex a = amps_[n];
  if (std::abs(a) < kPhaseFloor) return 0.0;
  return wrap_phase(std::atan2(a.imag(), a.real()));
}

std::vector<double> StateVector::moduli() const {
  std::vector<double> out(dim());
  for (std::size_t n = 0; n < dim(); ++n) out[n] = modulus(n);
  return out;
}

std::vector<double> StateVector::phases() const {
  std::vector<double> out(dim());
  for (std::size_t n = 0; n < dim(); ++n) out[n] = phase(n);
  return out;
}

bool StateVector::is_normalized(double tol) const noexcept {
  return std::abs(norm_sq() - 1.0) <= tol;
}

NormalizedState normalize(std::span<const double> v) {
  return normalize_impl(v);
}

NormalizedState normalize(std::span<const Complex> v) {
  return normalize_impl(v);
}

Complex inner(const StateVector& a, const StateVector& b) {
  require_same_dim(a, b);
  Complex sum = 0.0;
  for (std::size_t n = 0; n < a.dim(); ++n) sum += std::conj(a[n]) * b[n];
  return sum;
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_dim(a, b);
  for (const StateVector* s : {&a, &b}) {
    if (std::abs(std::sqrt(s->norm_sq()) - 1.0) > kFidelityNormTol) {
      throw Error(ErrorCode::NotNormalized,
                  "fidelity requires unit vectors, got norm " +
                      std::to_string(std::sqrt(s->norm_sq())));
    }
  }
  return std::norm(inner(a, b));
}

double wrap_phase(double phi) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w -= two_pi;
  return w;
}

}  // namespace qscd
