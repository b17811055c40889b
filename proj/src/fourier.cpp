#include "qmve/fourier.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace qmve {

namespace {

// Twiddle tables per length, built once.  Guarded map lookup is cheap next to
// the transform itself.
const std::vector<Complex>& twiddles(std::size_t n) {
  static std::map<std::size_t, std::vector<Complex>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Complex> tw(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    tw[k] = Complex(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

}  // namespace

void fft_pow2(Complex* data, std::size_t n, bool inverse) {
  if (n <= 1) return;
  if (!is_power_of_two(n)) fail_precondition("fft_pow2: length must be a power of two");

  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const std::vector<Complex>& tw = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        Complex w = tw[k * step];
        if (inverse) w = std::conj(w);
        Complex a = data[i + k];
        Complex b = data[i + k + len / 2] * w;
        data[i + k] = a + b;
        data[i + k + len / 2] = a - b;
      }
    }
  }
}

void centered_transform(Complex* data, std::size_t n, bool synthesis) {
  if (!is_power_of_two(n)) fail_precondition("centered_transform: length must be a power of two");
  const double root = std::sqrt(static_cast<double>(n));
  std::vector<Complex> scratch(n);

  if (!synthesis) {
    // out[m] = (1/sqrt n) e^{i pi (n-1) v_m / n} X_{v_m mod n}
    fft_pow2(data, n, false);
    for (std::size_t m = 0; m < n; ++m) {
      long v = static_cast<long>(m) - static_cast<long>(n) / 2;
      std::size_t k = static_cast<std::size_t>((v + static_cast<long>(n)) % static_cast<long>(n));
      double ang = kPi * static_cast<double>(n - 1) * static_cast<double>(v) / static_cast<double>(n);
      scratch[m] = data[k] * Complex(std::cos(ang), std::sin(ang)) / root;
    }
    std::copy(scratch.begin(), scratch.end(), data);
  } else {
    // exact inverse of the analysis branch
    for (std::size_t m = 0; m < n; ++m) {
      long v = static_cast<long>(m) - static_cast<long>(n) / 2;
      std::size_t k = static_cast<std::size_t>((v + static_cast<long>(n)) % static_cast<long>(n));
      double ang = kPi * static_cast<double>(n - 1) * static_cast<double>(v) / static_cast<double>(n);
      scratch[k] = data[m] * Complex(std::cos(-ang), std::sin(-ang)) * root;
    }
    std::copy(scratch.begin(), scratch.end(), data);
    fft_pow2(data, n, true);
    for (std::size_t j = 0; j < n; ++j) data[j] /= static_cast<double>(n);
  }
}

void centered_transform_nd(Complex* data, std::size_t axes, std::size_t n, std::size_t block,
                           bool synthesis) {
  std::size_t sites = 1;
  for (std::size_t a = 0; a < axes; ++a) sites *= n;
  std::size_t total = sites * block;

  // Transform one axis at a time; gather strided lines into contiguous
  // scratch so the FFT stays cache-friendly.
  for (std::size_t axis = 0; axis < axes; ++axis) {
    std::size_t inner = block;
    for (std::size_t a = axis + 1; a < axes; ++a) inner *= n;
    std::size_t lines = total / n;
    parallel_for(lines, [&](std::size_t line) {
      // decompose line index into (outer, inner) around the chosen axis
      std::size_t in_idx = line % inner;
      std::size_t out_idx = line / inner;
      Complex* base = data + out_idx * inner * n + in_idx;
      std::vector<Complex> buf(n);
      for (std::size_t j = 0; j < n; ++j) buf[j] = base[j * inner];
      centered_transform(buf.data(), n, synthesis);
      for (std::size_t j = 0; j < n; ++j) base[j * inner] = buf[j];
    });
  }
}

namespace {

StateVector lattice_transform_state(const StateVector& state, bool synthesis) {
  std::size_t axes = 0;
  for (const auto& r : state.layout())
    if (r.kind == RegisterKind::LatticeAxis) ++axes;
  if (axes == 0) fail_precondition("inverse_qft_lattice: no lattice axes present");
  for (std::size_t a = 0; a < axes; ++a)
    if (state.layout()[a].kind != RegisterKind::LatticeAxis)
      fail_precondition("inverse_qft_lattice: lattice axes must be leading registers");
  std::size_t n = state.layout()[0].size;
  std::size_t block = 1;
  for (std::size_t r = axes; r < state.register_count(); ++r) block *= state.register_size(r);

  StateVector out = state;
  centered_transform_nd(out.amplitudes().data(), axes, n, block, synthesis);
  return out;
}

}  // namespace

StateVector inverse_qft_lattice(const StateVector& state) {
  return lattice_transform_state(state, false);
}

StateVector qft_lattice(const StateVector& state) {
  return lattice_transform_state(state, true);
}

}  // namespace qmve
