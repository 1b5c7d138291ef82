// Copyright 2026 The qscd Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qscd {

using Complex = std::complex<double>;

/// Amplitudes over N single-excitation modes, stored in rectangular form.
/// A StateVector is not required to be normalized; the projected state of a
/// compression channel is an unnormalized StateVector.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim) {}
  explicit StateVector(std::vector<Complex> amps) : amps_(std::move(amps)) {}

  /// Computational basis state |n> in a dim-mode space.
  static StateVector basis(std::size_t dim, std::size_t n);

  std::size_t dim() const noexcept { return amps_.size(); }

  std::span<const Complex> amps() const noexcept { return amps_; }
  std::span<Complex> amps() noexcept { return amps_; }

  const Complex& operator[](std::size_t n) const { return amps_[n]; }
  Complex& operator[](std::size_t n) { return amps_[n]; }

  double norm_sq() const noexcept;

  /// r_n = |amp_n|.
  double modulus(std::size_t n) const { return std::abs(amps_[n]); }
  /// Phase in [0, 2*pi); 0 for amplitudes with modulus below 1e-12.
  double phase(std::size_t n) const;

  std::vector<double> moduli() const;
  std::vector<double> phases() const;

  bool is_normalized(double tol = 1e-9) const noexcept;

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<Complex> amps_;
};

struct NormalizedState {
  StateVector unit;
  double sigma = 0.0;
};

/// Divides v by its Euclidean norm. Throws ZeroVector when every entry is
/// below 1e-15 in magnitude.
NormalizedState normalize(std::span<const double> v);
NormalizedState normalize(std::span<const Complex> v);

/// sum_n conj(a_n) * b_n
Complex inner(const StateVector& a, const StateVector& b);

/// |<a|b>|^2 for normalized states.
double fidelity(const StateVector& a, const StateVector& b);

/// Maps an angle into [0, 2*pi).
double wrap_phase(double phi) noexcept;

}  // namespace qscd
