#include "qmve/secular.hpp"

#include <algorithm>
#include <cmath>

namespace qmve {

namespace {

constexpr int kBisectIters = 48;
constexpr int kNewtonIters = 4;

struct Deduped {
  double tau[kSecularMaxOmega];
  double prob[kSecularMaxOmega];
  std::size_t count = 0;
};

// Merge tau values that coincide within tolerance; ties carry the class
// probability mass.  Zero-probability outcomes contribute nothing to the
// secular function (their branches live in the degenerate spectrum) and are
// dropped.  Output is ascending.
Deduped dedupe(const double* tau, const double* prob, std::size_t omega) {
  struct Pair { double t, p; };
  Pair pairs[kSecularMaxOmega];
  std::size_t n = 0;
  for (std::size_t k = 0; k < omega; ++k)
    if (prob[k] > 0.0) pairs[n++] = {tau[k], prob[k]};
  if (n == 0) fail_precondition("grover_eigs: all probabilities are zero");
  std::sort(pairs, pairs + n, [](const Pair& a, const Pair& b) { return a.t < b.t; });
  Deduped d;
  for (std::size_t k = 0; k < n; ++k) {
    double scale = std::max(1.0, std::fabs(pairs[k].t));
    if (d.count > 0 && pairs[k].t - d.tau[d.count - 1] <= 1e-9 * scale) {
      d.prob[d.count - 1] += pairs[k].p;
    } else {
      d.tau[d.count] = pairs[k].t;
      d.prob[d.count] = pairs[k].p;
      ++d.count;
    }
  }
  return d;
}

// chart-1 secular function and its derivative (both negative-definite slope)
inline double f1(const Deduped& d, double a, double* deriv = nullptr) {
  double s = 0.0, ds = 0.0;
  for (std::size_t k = 0; k < d.count; ++k) {
    double den = 1.0 + d.tau[k] * a;
    double r = (d.tau[k] - a) / den;
    s += d.prob[k] * r;
    if (deriv) ds -= d.prob[k] * (1.0 + d.tau[k] * d.tau[k]) / (den * den);
  }
  if (deriv) *deriv = ds;
  return s;
}

inline double f2(const Deduped& d, double b, double* deriv = nullptr) {
  double s = 0.0, ds = 0.0;
  for (std::size_t k = 0; k < d.count; ++k) {
    double den = d.tau[k] - b;
    double r = -(1.0 + d.tau[k] * b) / den;
    s += d.prob[k] * r;
    if (deriv) ds -= d.prob[k] * (1.0 + d.tau[k] * d.tau[k]) / (den * den);
  }
  if (deriv) *deriv = ds;
  return s;
}

// Bisection with Newton polish inside a bracket where f runs from + to -.
template <class F>
double solve_bracket(F&& f, double lo, double hi) {
  for (int it = 0; it < kBisectIters; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double v = f(mid, nullptr);
    if (v > 0.0) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < kNewtonIters; ++it) {
    double dv;
    double v = f(x, &dv);
    if (dv == 0.0) break;
    double step = v / dv;
    double nx = x - step;
    if (nx <= lo || nx >= hi) break;
    x = nx;
  }
  return x;
}

// Endpoint sign of a chart function, treating an endpoint that sits exactly
// on a pole as the one-sided limit from inside the chart.
double endpoint_f1(const Deduped& d, double a, bool left) {
  for (std::size_t k = 0; k < d.count; ++k)
    if (1.0 + d.tau[k] * a == 0.0) return left ? 1.0 : -1.0;
  return f1(d, a);
}

double endpoint_f2(const Deduped& d, double b, bool left) {
  for (std::size_t k = 0; k < d.count; ++k)
    if (d.tau[k] - b == 0.0) return left ? 1.0 : -1.0;
  return f2(d, b);
}

}  // namespace

GroverEigs grover_eigs_scalar(const double* tau, const double* prob, std::size_t omega) {
  if (omega == 0 || omega > kSecularMaxOmega)
    fail_precondition("grover_eigs: outcome count out of range");
  Deduped d = dedupe(tau, prob, omega);
  GroverEigs out;

  // chart 1: poles a = -1/tau_k that land in [-1, 1] (i.e. |tau_k| >= 1)
  {
    double poles[kSecularMaxOmega];
    std::size_t npoles = 0;
    for (std::size_t k = 0; k < d.count; ++k) {
      if (d.tau[k] == 0.0) continue;
      double q = -1.0 / d.tau[k];
      if (q >= -1.0 && q <= 1.0) poles[npoles++] = q;
    }
    std::sort(poles, poles + npoles);
    auto fn = [&d](double a, double* dv) { return f1(d, a, dv); };
    double lo = -1.0;
    double flo = endpoint_f1(d, -1.0, true);
    for (std::size_t i = 0; i <= npoles; ++i) {
      double hi = (i < npoles) ? poles[i] : 1.0;
      bool root;
      if (i < npoles) {
        root = flo >= 0.0;  // f falls to -inf at the pole
      } else {
        double fhi = endpoint_f1(d, 1.0, false);
        root = flo >= 0.0 && fhi <= 0.0;
      }
      if (root && hi > lo) {
        double a = solve_bracket(fn, lo, hi);
        out.param[out.count] = a;
        out.chart2[out.count] = false;
        ++out.count;
      }
      lo = hi;
      flo = 1.0;  // just right of a pole, f = +inf
    }
  }

  // chart 2: poles b = tau_k in (-1, 1); endpoints excluded (chart 1 owns them)
  {
    double poles[kSecularMaxOmega];
    std::size_t npoles = 0;
    for (std::size_t k = 0; k < d.count; ++k)
      if (d.tau[k] > -1.0 && d.tau[k] < 1.0) poles[npoles++] = d.tau[k];
    std::sort(poles, poles + npoles);
    auto fn = [&d](double b, double* dv) { return f2(d, b, dv); };
    double lo = -1.0;
    double flo = endpoint_f2(d, -1.0, true);
    for (std::size_t i = 0; i <= npoles; ++i) {
      double hi = (i < npoles) ? poles[i] : 1.0;
      bool root;
      if (i < npoles) {
        root = flo > 0.0;
      } else {
        double fhi = endpoint_f2(d, 1.0, false);
        root = flo > 0.0 && fhi < 0.0;
      }
      if (root && hi > lo) {
        double b = solve_bracket(fn, lo, hi);
        out.param[out.count] = b;
        out.chart2[out.count] = true;
        ++out.count;
      }
      lo = hi;
      flo = 1.0;
    }
  }

  // phases and overlap weights; w_i = 1 / (1 + E[t_i^2])
  double wsum = 0.0;
  for (std::size_t i = 0; i < out.count; ++i) {
    double x = out.param[i];
    double alpha = out.chart2[i] ? wrap_phase(kPi + 2.0 * std::atan(x)) : 2.0 * std::atan(x);
    out.alpha[i] = alpha;
    double et2 = 0.0;
    for (std::size_t k = 0; k < d.count; ++k) {
      double t = out.chart2[i] ? -(1.0 + d.tau[k] * x) / (d.tau[k] - x)
                               : (d.tau[k] - x) / (1.0 + d.tau[k] * x);
      et2 += d.prob[k] * t * t;
    }
    out.weight[i] = 1.0 / (1.0 + et2);
    wsum += out.weight[i];
  }
  out.weight_sum_raw = wsum;
  if (!(std::fabs(wsum - 1.0) < 1e-6))
    fail_certificate("grover_eigs: overlap weights sum to " + std::to_string(wsum));
  for (std::size_t i = 0; i < out.count; ++i) out.weight[i] /= wsum;
  return out;
}

namespace {

inline Complex unit_phase_from_param(double x, bool chart2) {
  double den = 1.0 / (1.0 + x * x);
  Complex z((1.0 - x * x) * den, 2.0 * x * den);
  return chart2 ? -z : z;
}

inline Complex ipow(Complex z, std::uint64_t n) {
  Complex r(1.0, 0.0);
  while (n) {
    if (n & 1) r *= z;
    z *= z;
    n >>= 1;
  }
  return r;
}

}  // namespace

void grover_power_scalar(const double* tau, const double* prob, const double* sqrt_prob,
                         std::size_t omega, std::uint64_t power, Complex* amps) {
  GroverEigs eig = grover_eigs_scalar(tau, prob, omega);
  Complex zn[kSecularMaxOmega];
  for (std::size_t i = 0; i < eig.count; ++i)
    zn[i] = eig.weight[i] * ipow(unit_phase_from_param(eig.param[i], eig.chart2[i]), power);
  for (std::size_t k = 0; k < omega; ++k) {
    if (sqrt_prob[k] == 0.0) {
      amps[k] = Complex(0.0, 0.0);
      continue;
    }
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < eig.count; ++i) {
      double x = eig.param[i];
      double t = eig.chart2[i] ? -(1.0 + tau[k] * x) / (tau[k] - x)
                               : (tau[k] - x) / (1.0 + tau[k] * x);
      acc += zn[i] * Complex(1.0, -t);
    }
    amps[k] = sqrt_prob[k] * acc;
  }
}

void grover_power_batch_scalar(const PowerBatch& batch) {
  for (std::size_t b = 0; b < batch.count; ++b)
    grover_power_scalar(batch.tau + b * batch.omega, batch.prob, batch.sqrt_prob,
                        batch.omega, batch.power, batch.amps + b * batch.omega);
}

PowerBatchFn select_power_batch() {
  return avx2_available() ? &grover_power_batch_avx2 : &grover_power_batch_scalar;
}

const char* power_batch_kind() { return avx2_available() ? "avx2" : "scalar"; }

}  // namespace qmve
