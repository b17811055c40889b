#include "qmve/grover.hpp"

#include <algorithm>
#include <cmath>

namespace qmve {

namespace {

constexpr std::size_t kSpectrumOmegaCap = 64;
constexpr double kDegenerateTol = 1e-9;

double secular_f(const UniRv& theta, double beta) {
  double s = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k)
    s += theta.p(k) * std::tan(0.5 * (theta.x(k) - beta));
  return s;
}

bool pole_in_open_interval(const UniRv& theta, double lo, double hi) {
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta.p(k) == 0.0) continue;
    double pole = theta.x(k) + kPi;
    // shift the pole by multiples of 2pi into [lo, hi]
    double shifted = pole + 2.0 * kPi * std::floor((hi - pole) / (2.0 * kPi));
    if (shifted > lo && shifted < hi) return true;
  }
  return false;
}

}  // namespace

GroverOperator build_grover(const UniRv& theta) {
  std::size_t n = theta.size();
  if (n > kSpectrumOmegaCap)
    fail_cap("build_grover: outcome count " + std::to_string(n) + " exceeds 64");
  Eigen::VectorXcd one(n);
  for (std::size_t k = 0; k < n; ++k) one(k) = std::sqrt(theta.p(k));
  Eigen::MatrixXcd refl = 2.0 * one * one.adjoint() - Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd g(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Complex phase = std::polar(1.0, theta.x(j));
    for (std::size_t i = 0; i < n; ++i) g(i, j) = refl(i, j) * phase;
  }
  return GroverOperator{theta, std::move(g), std::move(one)};
}

double solve_alpha(const UniRv& theta, double lo, double hi) {
  if (!(lo < hi)) fail_precondition("solve_alpha: empty bracket");
  if (pole_in_open_interval(theta, lo, hi))
    fail_precondition("solve_alpha: pole inside bracket; use degenerate_spectrum "
                      "for the coinciding-angle branches");
  double flo = secular_f(theta, lo);
  double fhi = secular_f(theta, hi);
  if (flo == 0.0) return wrap_phase(lo);
  if (fhi == 0.0) return wrap_phase(hi);
  if (!(flo > 0.0 && fhi < 0.0))
    fail_precondition("solve_alpha: no sign change on bracket [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double v = secular_f(theta, mid);
    if (v > 0.0) lo = mid; else hi = mid;
  }
  return wrap_phase(0.5 * (lo + hi));
}

SpectralSolution eigvec_for_alpha(const UniRv& theta, double alpha) {
  std::size_t n = theta.size();
  SpectralSolution sol;
  sol.alpha = wrap_phase(alpha);
  sol.psi.resize(n);
  double et2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double half = 0.5 * (theta.x(k) - alpha);
    if (std::fabs(std::cos(half)) < 1e-14)
      fail_precondition("eigvec_for_alpha: theta_k - alpha = pi (mod 2pi) at outcome " +
                        std::to_string(k));
    double t = std::tan(half);
    et2 += theta.p(k) * t * t;
    sol.psi[k] = Complex(1.0, -t);
  }
  double norm = std::sqrt(1.0 + et2);
  for (auto& v : sol.psi) v /= norm;
  sol.overlap = 1.0 / (1.0 + et2);
  return sol;
}

std::vector<SpectralSolution> degenerate_spectrum(const UniRv& theta) {
  std::size_t n = theta.size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::vector<double> wrapped(n);
  for (std::size_t k = 0; k < n; ++k) wrapped[k] = wrap_phase(theta.x(k));
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return wrapped[a] < wrapped[b]; });

  std::vector<SpectralSolution> out;
  auto emit_class = [&](const std::vector<std::size_t>& members, double value) {
    // zero-probability members carry their own branches; positive-probability
    // classes of size m contribute an (m-1)-dimensional space orthogonal to
    // the weight vector.
    std::vector<std::size_t> pos, zero;
    for (std::size_t k : members)
      (theta.p(k) > 0.0 ? pos : zero).push_back(k);
    double alpha = wrap_phase(value - kPi);
    for (std::size_t k : zero) {
      SpectralSolution sol;
      sol.alpha = alpha;
      sol.degenerate = true;
      sol.psi.assign(n, Complex(0.0, 0.0));
      sol.psi[k] = Complex(1.0, 0.0);  // amplitude basis vector; overlap 0
      sol.overlap = 0.0;
      out.push_back(std::move(sol));
    }
    if (pos.size() < 2) return;
    std::size_t m = pos.size();
    // Householder complement of w = (sqrt p_k) inside the class
    Eigen::VectorXd w(m);
    for (std::size_t i = 0; i < m; ++i) w(i) = std::sqrt(theta.p(pos[i]));
    Eigen::VectorXd v = w;
    v(0) += w.norm();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m) - 2.0 * v * v.transpose() / v.squaredNorm();
    for (std::size_t col = 1; col < m; ++col) {
      SpectralSolution sol;
      sol.alpha = alpha;
      sol.degenerate = true;
      sol.psi.assign(n, Complex(0.0, 0.0));
      for (std::size_t i = 0; i < m; ++i) {
        double amp = h(i, col);
        sol.psi[pos[i]] = Complex(amp / std::sqrt(theta.p(pos[i])), 0.0);
      }
      sol.overlap = 0.0;
      out.push_back(std::move(sol));
    }
  };

  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = order[i];
    if (classes.empty() ||
        circ_dist(wrapped[k], wrapped[classes.back().front()]) > kDegenerateTol)
      classes.emplace_back();
    classes.back().push_back(k);
  }
  // values straddling the +-pi seam sort to opposite ends; merge those classes
  if (classes.size() >= 2 &&
      circ_dist(wrapped[classes.front().front()], wrapped[classes.back().front()]) <=
          kDegenerateTol) {
    for (std::size_t k : classes.back()) classes.front().push_back(k);
    classes.pop_back();
  }
  for (const auto& cls : classes) emit_class(cls, wrapped[cls.front()]);
  return out;
}

std::vector<SpectralSolution> full_spectrum(const UniRv& theta) {
  // distinct pole positions (positive-probability outcomes only)
  std::vector<double> poles;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta.p(k) == 0.0) continue;
    double pole = wrap_phase(theta.x(k) + kPi);
    bool dup = false;
    for (double q : poles)
      if (circ_dist(q, pole) <= kDegenerateTol) { dup = true; break; }
    if (!dup) poles.push_back(pole);
  }
  std::sort(poles.begin(), poles.end());

  std::vector<SpectralSolution> out;
  std::size_t r = poles.size();
  for (std::size_t i = 0; i < r; ++i) {
    double lo = poles[i];
    double hi = (i + 1 < r) ? poles[i + 1] : poles[0] + 2.0 * kPi;
    // nudge off the poles; shrink the pad when a root hides very close to one
    double a = 0.0;
    double pad = std::max(1e-11, (hi - lo) * 1e-6);
    for (int attempt = 0;; ++attempt) {
      try {
        a = solve_alpha(theta, lo + pad, hi - pad);
        break;
      } catch (const Error&) {
        if (attempt >= 3) throw;
        pad *= 1e-3;
      }
    }
    out.push_back(eigvec_for_alpha(theta, a));
  }
  auto degen = degenerate_spectrum(theta);
  out.insert(out.end(), degen.begin(), degen.end());
  return out;
}

double eigen_residual(const GroverOperator& op, const SpectralSolution& sol) {
  std::size_t n = op.theta.size();
  Eigen::VectorXcd state(n);
  for (std::size_t k = 0; k < n; ++k)
    state(k) = std::sqrt(op.theta.p(k)) * sol.psi[k];
  // zero-probability degenerate branches store plain amplitudes
  if (sol.degenerate) {
    for (std::size_t k = 0; k < n; ++k)
      if (op.theta.p(k) == 0.0) state(k) = sol.psi[k];
  }
  Eigen::VectorXcd lhs = op.matrix * state;
  Eigen::VectorXcd rhs = std::polar(1.0, sol.alpha) * state;
  return (lhs - rhs).norm();
}

CertifyResult certify_key_property(const UniRv& rv, double eps, double s0) {
  ScalarStats st = moments(rv);
  if (!(eps > 0.0 && s0 > 0.0)) fail_precondition("certify_key_property: eps, s0 must be positive");
  if (!(eps <= s0 && s0 <= 1.0 / 3.0 + 1e-15))
    fail_precondition("certify_key_property: need eps <= s0 <= 1/3");
  if (std::fabs(st.mean) > eps + 1e-15)
    fail_precondition("certify_key_property: |E X| = " + std::to_string(std::fabs(st.mean)) +
                      " exceeds eps = " + std::to_string(eps));
  if (st.second_moment > s0 * s0 + 1e-15)
    fail_precondition("certify_key_property: E X^2 = " + std::to_string(st.second_moment) +
                      " exceeds s0^2 = " + std::to_string(s0 * s0));

  CertifyResult res;
  SpectrumCertificate& cert = res.certificate;
  cert.eps = eps;
  cert.s0 = s0;
  cert.lambda = 5.0 / (4.0 - 5.0 * s0 * s0);
  cert.c = 1.9088 * s0 * s0;
  double shrink = 1.0 - 1.25 * s0 * s0;
  cert.delta = 0.25 * (1.7983 * s0 * s0 + 7.480 * s0 * eps / shrink);

  UniRv theta = to_angle(rv, cert.lambda, eps);
  // proof bracket: alpha in [2(mu_t - c eps_t), 2(mu_t + c eps_t)] around the
  // truncated-tangent mean, with eps_t = eps / (2 (1 - 1.25 s0^2))
  double mu_t = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k)
    mu_t += theta.p(k) * std::tan(0.5 * theta.x(k));
  double eps_t = 0.5 * eps / shrink;
  double alpha = solve_alpha(theta, 2.0 * (mu_t - cert.c * eps_t), 2.0 * (mu_t + cert.c * eps_t));
  res.solution = eigvec_for_alpha(theta, alpha);

  cert.alpha_error = std::fabs(alpha - st.mean);
  cert.alpha_error_bound = 3.1588 * s0 * s0 * eps / shrink;
  cert.overlap = res.solution.overlap;
  cert.overlap_lower_bound = 1.0 - cert.delta;
  cert.alpha_ok = cert.alpha_error <= cert.alpha_error_bound + 1e-14;
  cert.overlap_ok = cert.overlap >= cert.overlap_lower_bound - 1e-14;
  return res;
}

DistanceBoundResult state_distance_bound_check(const UniRv& rv, double eps, double s0,
                                               std::uint64_t N) {
  ScalarStats st = moments(rv);
  if (!(eps <= s0 && s0 <= 1.0 / 3.0 + 1e-15))
    fail_precondition("state_distance_bound_check: need eps <= s0 <= 1/3");
  if (std::fabs(st.mean) > eps + 1e-15 || st.second_moment > s0 * s0 + 1e-15)
    fail_precondition("state_distance_bound_check: moment preconditions violated");

  double lambda = 5.0 / (4.0 - 5.0 * s0 * s0);
  UniRv theta = to_angle(rv, lambda, eps);
  GroverOperator op = build_grover(theta);
  Eigen::VectorXcd v = op.ket_one;
  for (std::uint64_t i = 0; i < N; ++i) v = op.matrix * v;
  Eigen::VectorXcd target = std::polar(1.0, static_cast<double>(N) * st.mean) * op.ket_one;

  DistanceBoundResult res;
  res.lhs = (v - target).squaredNorm();
  double shrink = 1.0 - 1.25 * s0 * s0;
  double third = 3.1588 * static_cast<double>(N) * eps * s0 * s0 / shrink;
  res.rhs = 1.7983 * s0 * s0 + 7.480 * s0 * eps / shrink + third * third;
  return res;
}

}  // namespace qmve
