#pragma once

#include <vector>

#include "qmve/common.hpp"
#include "qmve/statevector.hpp"

namespace qmve {

// In-place radix-2 FFT, unnormalized.  forward: X_k = sum_j x_j e^{-2pi i jk/n}.
void fft_pow2(Complex* data, std::size_t n, bool inverse);

// Centered lattice transform for one axis of length N (a power of two).
//
// Lattice coordinates are u_j = j/N - 1/2 + 1/(2N) and output slots encode
// the centered integers v_m = m - N/2, so slot m carries phase fraction
// v_m / N in [-1/2, 1/2).  The analysis direction is
//    out[m] = (1/sqrt N) sum_j e^{-2pi i u_j v_m} in[j]
// which maps the plane wave in[j] = e^{2pi i u_j v*} / sqrt(N) to a point
// mass on the slot with v_m = v*.  synthesis = exact inverse.
void centered_transform(Complex* data, std::size_t n, bool synthesis);

// Apply the centered analysis transform along `axes` axes of a row-major
// hypercubic array with `n` points per axis and `block` trailing elements
// per site (block = 1 for a plain scalar field).
void centered_transform_nd(Complex* data, std::size_t axes, std::size_t n, std::size_t block,
                           bool synthesis);

// Inverse QFT on every lattice axis of a statevector (analysis direction:
// plane waves over the lattice become point masses on frequency slots).
StateVector inverse_qft_lattice(const StateVector& state);

// The synthesis direction (builds plane waves); inverse of the above.
StateVector qft_lattice(const StateVector& state);

// Phase fraction encoded by slot m on an axis of resolution N, in [-1/2, 1/2).
inline double slot_fraction(std::size_t m, std::size_t N) {
  return (static_cast<double>(m) - static_cast<double>(N) / 2.0) / static_cast<double>(N);
}

// Slot encoding the centered integer closest to fraction f (wrapped).
inline std::size_t fraction_slot(double f, std::size_t N) {
  long v = std::lround(f * static_cast<double>(N));
  long m = v + static_cast<long>(N) / 2;
  m %= static_cast<long>(N);
  if (m < 0) m += static_cast<long>(N);
  return static_cast<std::size_t>(m);
}

}  // namespace qmve
