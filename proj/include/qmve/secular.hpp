#pragma once

#include <cstdint>
#include <vector>

#include "qmve/common.hpp"

namespace qmve {

// Spectral kernels for the Grover operator G = (2|1><1| - I) diag(e^{i th_k}).
//
// Everything here works in half-angle tangent coordinates: an outcome angle
// th_k enters as tau_k = tan(th_k / 2), and an eigenphase alpha is located as
// a root of the secular function
//
//     f(alpha) = sum_k p_k tan((th_k - alpha) / 2)
//
// which is strictly decreasing between consecutive poles (at th_k + pi), so
// every root is bracketed and bisection is safe.  Two rational charts cover
// the circle without trig calls:
//
//   chart 1:  a = tan(alpha/2),        |alpha| <= pi/2  <=>  |a| <= 1
//             f1(a) = sum p_k (tau_k - a) / (1 + tau_k a)
//   chart 2:  b = tan((alpha - pi)/2), alpha in (pi/2, 3pi/2)  <=>  |b| < 1
//             f2(b) = -sum p_k (1 + tau_k b) / (tau_k - b)
//
// Repeated tau values contribute degenerate eigenvectors orthogonal to |1>,
// which never show up in G^N |1>; the solver merges them and reports only the
// simple branches.

inline constexpr std::size_t kSecularMaxOmega = 16;

struct GroverEigs {
  std::size_t count = 0;                     // number of simple branches
  double param[kSecularMaxOmega];            // root in its chart coordinate
  bool chart2[kSecularMaxOmega];
  double alpha[kSecularMaxOmega];            // eigenphase in (-pi, pi]
  double weight[kSecularMaxOmega];           // |<psi_i|1>|^2, renormalized
  double weight_sum_raw = 0.0;               // pre-renormalization sum (diagnostic)
};

// Reference solver, valid for arbitrary tau (poles anywhere on the circle).
GroverEigs grover_eigs_scalar(const double* tau, const double* prob, std::size_t omega);

// amps[k] = <k| G^N |1> = sqrt(p_k) * sum_i w_i z_i^N (1 - i t_ik),
// z_i = e^{i alpha_i}, t_ik = tan((th_k - alpha_i)/2).
void grover_power_scalar(const double* tau, const double* prob, const double* sqrt_prob,
                         std::size_t omega, std::uint64_t power, Complex* amps);

// Batched form over `count` blocks sharing one probability vector: tau is
// row-major [count][omega], amps likewise.  This is the inner loop of the
// lattice path; variants are selected at runtime.
struct PowerBatch {
  const double* tau = nullptr;
  const double* prob = nullptr;
  const double* sqrt_prob = nullptr;
  std::size_t omega = 0;
  std::size_t count = 0;
  std::uint64_t power = 0;
  Complex* amps = nullptr;
};

using PowerBatchFn = void (*)(const PowerBatch&);

void grover_power_batch_scalar(const PowerBatch& batch);
void grover_power_batch_avx2(const PowerBatch& batch);  // falls back if unavailable

// Runtime selection; name reported for diagnostics.
PowerBatchFn select_power_batch();
const char* power_batch_kind();
bool avx2_available();

}  // namespace qmve
