#include "qmve/secular.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(__i386__)
#define QMVE_X86 1
#include <immintrin.h>
#else
#define QMVE_X86 0
#endif

namespace qmve {

bool avx2_available() {
#if QMVE_X86
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

#if QMVE_X86

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kMaxFast = 8;   // fast-path outcome cap
constexpr int kBisect = 46;
constexpr int kNewton = 3;

struct Vec { __m256d v; };

inline __m256d load_col(const double* base, std::size_t stride, std::size_t k) {
  return _mm256_set_pd(base[3 * stride + k], base[2 * stride + k],
                       base[1 * stride + k], base[0 * stride + k]);
}

// Eligibility for the vector path: strictly interior angles and well
// separated tangents, so every lane shares the same bracket structure.
bool fast_ok(const double* tau, std::size_t omega) {
  double sorted[kMaxFast];
  for (std::size_t k = 0; k < omega; ++k) {
    if (!(std::fabs(tau[k]) <= 0.95)) return false;
    sorted[k] = tau[k];
  }
  std::sort(sorted, sorted + omega);
  for (std::size_t k = 1; k < omega; ++k)
    if (sorted[k] - sorted[k - 1] < 1e-7) return false;
  return true;
}

struct Poly {
  __m256d c[kMaxFast + 1];  // c[j] multiplies x^j
  std::size_t deg = 0;
};

inline __m256d horner(const Poly& p, __m256d x) {
  __m256d acc = p.c[p.deg];
  for (std::size_t j = p.deg; j-- > 0;) acc = _mm256_fmadd_pd(acc, x, p.c[j]);
  return acc;
}

inline __m256d horner_deriv(const Poly& p, __m256d x) {
  if (p.deg == 0) return _mm256_setzero_pd();
  __m256d acc = _mm256_mul_pd(p.c[p.deg], _mm256_set1_pd(static_cast<double>(p.deg)));
  for (std::size_t j = p.deg; j-- > 1;)
    acc = _mm256_fmadd_pd(acc, x, _mm256_mul_pd(p.c[j], _mm256_set1_pd(static_cast<double>(j))));
  return acc;
}

// g(x) = sum_k p_k num_k(x) prod_{l != k} den_l(x), built incrementally with
// S <- S*den_m + p_m num_m * Q,  Q <- Q*den_m.  chart 1: num=(tau-x),
// den=(1+tau x); chart 2: num=-(1+tau x), den=(tau-x).
Poly secular_poly(const __m256d* tau, const double* prob, std::size_t omega, bool chart_two) {
  Poly S, Q;
  S.deg = 0;
  S.c[0] = _mm256_setzero_pd();
  Q.deg = 0;
  Q.c[0] = _mm256_set1_pd(1.0);
  for (std::size_t m = 0; m < omega; ++m) {
    __m256d t = tau[m];
    // den = d0 + d1 x, num = n0 + n1 x
    __m256d d0 = chart_two ? t : _mm256_set1_pd(1.0);
    __m256d d1 = chart_two ? _mm256_set1_pd(-1.0) : t;
    __m256d n0 = chart_two ? _mm256_set1_pd(-prob[m]) : _mm256_mul_pd(t, _mm256_set1_pd(prob[m]));
    __m256d n1 = chart_two ? _mm256_mul_pd(t, _mm256_set1_pd(-prob[m])) : _mm256_set1_pd(-prob[m]);

    Poly Sn;
    Sn.deg = S.deg + 1;
    for (std::size_t j = 0; j <= Sn.deg; ++j) Sn.c[j] = _mm256_setzero_pd();
    for (std::size_t j = 0; j <= S.deg; ++j) {
      Sn.c[j] = _mm256_fmadd_pd(S.c[j], d0, Sn.c[j]);
      Sn.c[j + 1] = _mm256_fmadd_pd(S.c[j], d1, Sn.c[j + 1]);
    }
    for (std::size_t j = 0; j <= Q.deg; ++j) {
      Sn.c[j] = _mm256_fmadd_pd(Q.c[j], n0, Sn.c[j]);
      Sn.c[j + 1] = _mm256_fmadd_pd(Q.c[j], n1, Sn.c[j + 1]);
    }
    Poly Qn;
    Qn.deg = Q.deg + 1;
    for (std::size_t j = 0; j <= Qn.deg; ++j) Qn.c[j] = _mm256_setzero_pd();
    for (std::size_t j = 0; j <= Q.deg; ++j) {
      Qn.c[j] = _mm256_fmadd_pd(Q.c[j], d0, Qn.c[j]);
      Qn.c[j + 1] = _mm256_fmadd_pd(Q.c[j], d1, Qn.c[j + 1]);
    }
    S = Sn;
    Q = Qn;
  }
  return S;
}

// One bracketed root per lane; the sign of g just right of `lo` is
// `sign_left` in every lane.
__m256d solve_poly(const Poly& g, __m256d lo, __m256d hi, double sign_left) {
  __m256d sgn = _mm256_set1_pd(sign_left);
  for (int it = 0; it < kBisect; ++it) {
    __m256d mid = _mm256_mul_pd(_mm256_add_pd(lo, hi), _mm256_set1_pd(0.5));
    __m256d v = _mm256_mul_pd(horner(g, mid), sgn);
    __m256d keep_lo_side = _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_GT_OQ);
    lo = _mm256_blendv_pd(lo, mid, keep_lo_side);
    hi = _mm256_blendv_pd(mid, hi, keep_lo_side);
  }
  __m256d x = _mm256_mul_pd(_mm256_add_pd(lo, hi), _mm256_set1_pd(0.5));
  for (int it = 0; it < kNewton; ++it) {
    __m256d v = horner(g, x);
    __m256d dv = horner_deriv(g, x);
    __m256d usable = _mm256_cmp_pd(_mm256_andnot_pd(_mm256_set1_pd(-0.0), dv),
                                   _mm256_set1_pd(1e-300), _CMP_GT_OQ);
    __m256d step = _mm256_div_pd(v, dv);
    __m256d nx = _mm256_sub_pd(x, step);
    nx = _mm256_max_pd(lo, _mm256_min_pd(hi, nx));
    x = _mm256_blendv_pd(x, nx, usable);
  }
  return x;
}

struct CVec {
  __m256d re, im;
};

inline CVec cmul(CVec a, CVec b) {
  CVec r;
  r.re = _mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im));
  r.im = _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re));
  return r;
}

inline CVec cpow(CVec z, std::uint64_t n) {
  CVec r{_mm256_set1_pd(1.0), _mm256_setzero_pd()};
  while (n) {
    if (n & 1) r = cmul(r, z);
    z = cmul(z, z);
    n >>= 1;
  }
  return r;
}

void run_group(const PowerBatch& batch, std::size_t base) {
  const std::size_t omega = batch.omega;
  const double* tau_rows = batch.tau + base * omega;

  __m256d tau[kMaxFast];       // original order
  for (std::size_t k = 0; k < omega; ++k) tau[k] = load_col(tau_rows, omega, k);

  // per-lane sorted tangents (bracket endpoints for the chart-2 roots)
  __m256d stau[kMaxFast];
  for (std::size_t k = 0; k < omega; ++k) stau[k] = tau[k];
  for (std::size_t i = 0; i < omega; ++i) {
    for (std::size_t j = 0; j + 1 < omega - i; ++j) {
      __m256d swap = _mm256_cmp_pd(stau[j], stau[j + 1], _CMP_GT_OQ);
      __m256d tl = stau[j], th = stau[j + 1];
      stau[j] = _mm256_blendv_pd(tl, th, swap);
      stau[j + 1] = _mm256_blendv_pd(th, tl, swap);
    }
  }

  // The secular sum is permutation invariant, so the polynomials are built
  // from the unsorted originals (lane-uniform probabilities); the sorted copy
  // only provides the per-lane brackets.
  __m256d roots[kMaxFast];
  bool chart2[kMaxFast];
  {
    Poly g1 = secular_poly(tau, batch.prob, omega, false);
    roots[0] = solve_poly(g1, _mm256_set1_pd(-1.0), _mm256_set1_pd(1.0), +1.0);
    chart2[0] = false;

    // chart 2: one root between consecutive sorted poles
    Poly g2 = secular_poly(tau, batch.prob, omega, true);
    for (std::size_t i = 0; i + 1 < omega; ++i) {
      double sign_left = (i % 2 == 0) ? -1.0 : 1.0;  // sign of prod(tau_l - b) x f2
      roots[i + 1] = solve_poly(g2, stau[i], stau[i + 1], sign_left);
      chart2[i + 1] = true;
    }
  }

  // weights, phases, and amplitude assembly
  __m256d weight[kMaxFast];
  CVec zn[kMaxFast];
  __m256d wsum = _mm256_setzero_pd();
  for (std::size_t i = 0; i < omega; ++i) {
    __m256d x = roots[i];
    __m256d x2 = _mm256_mul_pd(x, x);
    __m256d inv = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_add_pd(_mm256_set1_pd(1.0), x2));
    CVec z;
    z.re = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), x2), inv);
    z.im = _mm256_mul_pd(_mm256_add_pd(x, x), inv);
    if (chart2[i]) {
      z.re = _mm256_sub_pd(_mm256_setzero_pd(), z.re);
      z.im = _mm256_sub_pd(_mm256_setzero_pd(), z.im);
    }
    zn[i] = cpow(z, batch.power);

    __m256d et2 = _mm256_setzero_pd();
    for (std::size_t k = 0; k < omega; ++k) {
      __m256d t;
      if (chart2[i]) {
        __m256d num = _mm256_fmadd_pd(tau[k], x, _mm256_set1_pd(1.0));
        __m256d den = _mm256_sub_pd(tau[k], x);
        t = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), num), den);
      } else {
        __m256d num = _mm256_sub_pd(tau[k], x);
        __m256d den = _mm256_fmadd_pd(tau[k], x, _mm256_set1_pd(1.0));
        t = _mm256_div_pd(num, den);
      }
      et2 = _mm256_fmadd_pd(_mm256_mul_pd(t, t), _mm256_set1_pd(batch.prob[k]), et2);
    }
    weight[i] = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_add_pd(_mm256_set1_pd(1.0), et2));
    wsum = _mm256_add_pd(wsum, weight[i]);
  }

  // weight sums should be 1; route the whole group to the scalar reference
  // if any lane drifted (near-degenerate spectra).
  alignas(32) double ws[kLanes];
  _mm256_store_pd(ws, wsum);
  for (std::size_t l = 0; l < kLanes; ++l) {
    if (!(std::fabs(ws[l] - 1.0) < 1e-8)) {
      for (std::size_t b = 0; b < kLanes; ++b)
        grover_power_scalar(batch.tau + (base + b) * omega, batch.prob, batch.sqrt_prob,
                            omega, batch.power, batch.amps + (base + b) * omega);
      return;
    }
  }
  __m256d winv = _mm256_div_pd(_mm256_set1_pd(1.0), wsum);
  for (std::size_t i = 0; i < omega; ++i) {
    __m256d w = _mm256_mul_pd(weight[i], winv);
    zn[i].re = _mm256_mul_pd(zn[i].re, w);
    zn[i].im = _mm256_mul_pd(zn[i].im, w);
  }

  for (std::size_t k = 0; k < omega; ++k) {
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    for (std::size_t i = 0; i < omega; ++i) {
      __m256d x = roots[i];
      __m256d t;
      if (chart2[i]) {
        __m256d num = _mm256_fmadd_pd(tau[k], x, _mm256_set1_pd(1.0));
        __m256d den = _mm256_sub_pd(tau[k], x);
        t = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), num), den);
      } else {
        __m256d num = _mm256_sub_pd(tau[k], x);
        __m256d den = _mm256_fmadd_pd(tau[k], x, _mm256_set1_pd(1.0));
        t = _mm256_div_pd(num, den);
      }
      // (1 - i t) * (re + i im)
      acc_re = _mm256_add_pd(acc_re, _mm256_fmadd_pd(t, zn[i].im, zn[i].re));
      acc_im = _mm256_add_pd(acc_im, _mm256_fnmadd_pd(t, zn[i].re, zn[i].im));
    }
    __m256d s = _mm256_set1_pd(batch.sqrt_prob[k]);
    acc_re = _mm256_mul_pd(acc_re, s);
    acc_im = _mm256_mul_pd(acc_im, s);
    alignas(32) double re[kLanes], im[kLanes];
    _mm256_store_pd(re, acc_re);
    _mm256_store_pd(im, acc_im);
    for (std::size_t l = 0; l < kLanes; ++l)
      batch.amps[(base + l) * omega + k] = Complex(re[l], im[l]);
  }
}

}  // namespace

void grover_power_batch_avx2(const PowerBatch& batch) {
  bool plain = !avx2_available() || batch.omega > kMaxFast;
  for (std::size_t k = 0; k < batch.omega && !plain; ++k)
    plain = !(batch.prob[k] > 0.0);
  if (plain) {
    grover_power_batch_scalar(batch);
    return;
  }
  std::size_t b = 0;
  while (b + kLanes <= batch.count) {
    bool ok = true;
    for (std::size_t l = 0; l < kLanes && ok; ++l)
      ok = fast_ok(batch.tau + (b + l) * batch.omega, batch.omega);
    if (ok) {
      run_group(batch, b);
    } else {
      for (std::size_t l = 0; l < kLanes; ++l)
        grover_power_scalar(batch.tau + (b + l) * batch.omega, batch.prob, batch.sqrt_prob,
                            batch.omega, batch.power, batch.amps + (b + l) * batch.omega);
    }
    b += kLanes;
  }
  for (; b < batch.count; ++b)
    grover_power_scalar(batch.tau + b * batch.omega, batch.prob, batch.sqrt_prob,
                        batch.omega, batch.power, batch.amps + b * batch.omega);
}

#else  // !QMVE_X86

void grover_power_batch_avx2(const PowerBatch& batch) {
  grover_power_batch_scalar(batch);
}

#endif

}  // namespace qmve
