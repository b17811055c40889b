#include "qmve/phase_estimation.hpp"

#include <cmath>

#include "qmve/fourier.hpp"

namespace qmve {

namespace {

// |(1/N) sum_{j<N} e^{i j x}|^2
double dirichlet_mass(double x, std::size_t N) {
  double half = 0.5 * x;
  double s = std::sin(half);
  if (std::fabs(s) < 1e-15) return 1.0;
  double num = std::sin(static_cast<double>(N) * half);
  double v = num / (static_cast<double>(N) * s);
  return v * v;
}

}  // namespace

double PhaseTable::total() const {
  double t = 0.0;
  for (double p : prob) t += p;
  return t;
}

double PhaseTable::mass_within(double frac, double window) const {
  double m = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    double d = std::fabs(fraction(i) - frac);
    d = std::min(d, 1.0 - d);  // circular distance on fractions
    if (d <= window + 1e-15) m += prob[i];
  }
  return m;
}

std::vector<std::vector<double>> PEOutcome::sample_estimates(std::uint64_t seed,
                                                             std::size_t trials) const {
  std::vector<std::vector<double>> out(trials, std::vector<double>(dims));
  Rng rng(seed);
  if (!joint.empty()) {
    TableSampler sampler(joint);
    for (std::size_t t = 0; t < trials; ++t) {
      std::size_t lin = sampler.draw(rng);
      for (std::size_t a = dims; a-- > 0;) {
        out[t][a] = slot_fraction(lin % N, N);
        lin /= N;
      }
    }
  } else {
    TableSampler sampler(axis_marginals[0].prob);
    for (std::size_t t = 0; t < trials; ++t) out[t][0] = slot_fraction(sampler.draw(rng), N);
  }
  return out;
}

PEOutcome phase_estimate_1d(const Eigen::MatrixXcd& unitary, const Eigen::VectorXcd& input,
                            const PEConfig& cfg) {
  std::size_t n = unitary.rows();
  if (static_cast<std::size_t>(unitary.cols()) != n || static_cast<std::size_t>(input.size()) != n)
    fail_precondition("phase_estimate_1d: dimension mismatch");
  double gram_err =
      (unitary.adjoint() * unitary - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (gram_err > kTolNorm) fail_precondition("phase_estimate_1d: operator is not unitary");
  if (std::fabs(input.norm() - 1.0) > kTolNorm)
    fail_precondition("phase_estimate_1d: input state not normalized");

  // a unitary is normal, so its Schur form is diagonal with orthonormal
  // Schur vectors: an exact eigenbasis
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(unitary);
  PEOutcome out;
  out.N = cfg.N;
  out.dims = 1;
  PhaseTable table;
  table.N = cfg.N;
  table.prob.assign(cfg.N, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = std::norm(schur.matrixU().col(i).adjoint() * input);
    if (w < 1e-300) continue;
    double theta = std::arg(schur.matrixT()(i, i));
    for (std::size_t m = 0; m < cfg.N; ++m)
      table.prob[m] += w * dirichlet_mass(theta - 2.0 * kPi * slot_fraction(m, cfg.N), cfg.N);
  }
  out.axis_marginals.push_back(std::move(table));
  return out;
}

PEOutcome phase_estimate_1d_grover(const UniRv& theta, const PEConfig& cfg) {
  std::vector<double> tau(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) tau[k] = std::tan(0.5 * theta.x(k));
  GroverEigs eig = grover_eigs_scalar(tau.data(), theta.probs().data(), theta.size());
  PEOutcome out;
  out.N = cfg.N;
  out.dims = 1;
  PhaseTable table;
  table.N = cfg.N;
  table.prob.assign(cfg.N, 0.0);
  for (std::size_t i = 0; i < eig.count; ++i)
    for (std::size_t m = 0; m < cfg.N; ++m)
      table.prob[m] +=
          eig.weight[i] * dirichlet_mass(eig.alpha[i] - 2.0 * kPi * slot_fraction(m, cfg.N), cfg.N);
  out.axis_marginals.push_back(std::move(table));
  return out;
}

GroverPhaseSampler::GroverPhaseSampler(const UniRv& theta, std::size_t N) : N_(N) {
  if (!is_power_of_two(N)) fail_precondition("GroverPhaseSampler: N must be a power of two");
  std::vector<double> tau(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) tau[k] = std::tan(0.5 * theta.x(k));
  eigs_ = grover_eigs_scalar(tau.data(), theta.probs().data(), theta.size());
  branch_cum_.resize(eigs_.count);
  double acc = 0.0;
  for (std::size_t i = 0; i < eigs_.count; ++i) {
    acc += eigs_.weight[i];
    branch_cum_[i] = acc;
  }
}

double GroverPhaseSampler::draw(Rng& rng) const {
  // pick the eigenbranch, then the slot offset around its phase
  double u = rng.uniform() * branch_cum_.back();
  std::size_t i = 0;
  while (i + 1 < branch_cum_.size() && branch_cum_[i] <= u) ++i;
  double alpha = eigs_.alpha[i];

  const double Nd = static_cast<double>(N_);
  double v0 = alpha * Nd / (2.0 * kPi);  // real-valued slot of the branch phase
  double vstar = std::round(v0);
  double f = v0 - vstar;  // in [-1/2, 1/2]
  long half = static_cast<long>(N_) / 2;

  auto wrap_slot = [&](long v) {
    long m = ((v % static_cast<long>(N_)) + static_cast<long>(N_)) % static_cast<long>(N_);
    return m;
  };
  auto to_fraction = [&](long v) {
    long m = wrap_slot(v + half);
    return slot_fraction(static_cast<std::size_t>(m), N_);
  };

  if (std::fabs(f) < 1e-13 || N_ < 8) {
    // on-grid phase (point mass), or a table small enough to invert directly
    if (std::fabs(f) < 1e-13) return to_fraction(static_cast<long>(vstar));
    std::vector<double> tab(N_);
    for (std::size_t m = 0; m < N_; ++m)
      tab[m] = dirichlet_mass(alpha - 2.0 * kPi * slot_fraction(m, N_), N_);
    return slot_fraction(TableSampler(tab).draw(rng), N_);
  }

  // Slot offsets j relative to vstar cover the ring once for
  // j in [-N/2, N/2), with unnormalized mass 1/sin^2(pi (j - f) / N).
  // Envelope: the exact masses at j in {-1, 0, 1}, plus a 1/(t - 1/2)^2
  // continuous majorant for |j| >= 2 (chord bound sin(pi y/N) >= 2y/N).
  auto target = [&](long j) {
    double s = std::sin(kPi * (static_cast<double>(j) - f) / Nd);
    return 1.0 / (s * s);
  };
  const double e_near[3] = {target(-1), target(0), target(1)};
  const double env_scale = Nd * Nd / 4.0;
  // per-side tail: draw T with P[T > t] = (3/2)/(t - 1/2) on [2, inf),
  // j = floor(T); envelope mass at j is (5/3) env_scale / (j^2 - 1/4),
  // which dominates the chord bound env_scale / (j - 1/2)^2
  const double w_side = (10.0 / 9.0) * env_scale;
  const double w_near = e_near[0] + e_near[1] + e_near[2];
  const double w_total = w_near + 2.0 * w_side;

  for (int guard = 0; guard < 100000; ++guard) {
    double pick = rng.uniform() * w_total;
    long j;
    double env_mass;
    if (pick < w_near) {
      if (pick < e_near[0]) j = -1;
      else if (pick < e_near[0] + e_near[1]) j = 0;
      else j = 1;
      env_mass = target(j);
    } else {
      bool negative = pick >= w_near + w_side;
      double u2 = rng.uniform();
      double t = 0.5 + 1.5 / std::max(1e-12, 1.0 - u2);
      if (t >= 1e18) continue;
      long mag = static_cast<long>(std::floor(t));
      j = negative ? -mag : mag;
      if (j < -half || j > half - 1) continue;
      env_mass = (5.0 / 3.0) * env_scale /
                 ((static_cast<double>(mag) - 0.5) * (static_cast<double>(mag) + 0.5));
    }
    if (rng.uniform() * env_mass <= target(j))
      return to_fraction(static_cast<long>(vstar) + j);
  }
  fail_certificate("GroverPhaseSampler: rejection loop failed to terminate");
}

StateVector multidim_pre_qft_state(const UnitaryFamily& family, const LatticeSpec& lat,
                                   const std::vector<Complex>& outcome_init,
                                   std::uint64_t power) {
  StateVector psi = uniform_lattice_state(lat, outcome_init);
  return apply_per_lattice_unitary(psi, family, power);
}

PEOutcome finish_multidim(const StateVector& pre_qft) {
  StateVector post = inverse_qft_lattice(pre_qft);
  std::size_t axes = 0;
  for (const auto& r : post.layout())
    if (r.kind == RegisterKind::LatticeAxis) ++axes;
  std::vector<std::size_t> lattice_regs(axes);
  for (std::size_t a = 0; a < axes; ++a) lattice_regs[a] = a;
  MeasurementDistribution joint = measure_distribution(post, lattice_regs);

  PEOutcome out;
  out.N = post.layout()[0].size;
  out.dims = axes;
  out.joint = joint.probs;
  for (std::size_t a = 0; a < axes; ++a) {
    PhaseTable t;
    t.N = out.N;
    t.prob.assign(out.N, 0.0);
    out.axis_marginals.push_back(std::move(t));
  }
  for (std::size_t lin = 0; lin < joint.probs.size(); ++lin) {
    std::size_t rem = lin;
    for (std::size_t a = axes; a-- > 0;) {
      out.axis_marginals[a].prob[rem % out.N] += joint.probs[lin];
      rem /= out.N;
    }
  }
  return out;
}

PEOutcome multidim_phase_estimate(const UnitaryFamily& family, const LatticeSpec& lat,
                                  const std::vector<Complex>& outcome_init,
                                  std::uint64_t power) {
  return finish_multidim(multidim_pre_qft_state(family, lat, outcome_init, power));
}

StateVector noise_injection(const StateVector& state, double eps, NoiseMode mode,
                            std::uint64_t seed) {
  if (!(eps >= 0.0 && eps <= 2.0)) fail_precondition("noise_injection: eps must be in [0, 2]");

  if (mode == NoiseMode::OrthogonalJunk) {
    // |psi'> = c |psi>|0> + s |chi>|1>, distance exactly eps
    auto layout = state.layout();
    layout.push_back({RegisterKind::Junk, 2});
    std::size_t dim = state.dimension();
    std::vector<Complex> amps(dim * 2, Complex(0.0, 0.0));
    double c = 1.0 - 0.5 * eps * eps;
    double s = std::sqrt(std::max(0.0, eps * eps - 0.25 * eps * eps * eps * eps));
    Rng rng(seed);
    std::vector<Complex> chi(dim);
    double norm2 = 0.0;
    for (auto& z : chi) {
      z = Complex(rng.normal(), rng.normal());
      norm2 += std::norm(z);
    }
    double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < dim; ++i) {
      amps[2 * i] = c * state.amplitudes()[i];
      amps[2 * i + 1] = s * inv * chi[i];
    }
    return StateVector(std::move(layout), std::move(amps));
  }

  // phase jitter: e^{i t g_i} per amplitude, t tuned so the distance hits eps
  if (eps == 0.0) return state;
  Rng rng(seed);
  std::size_t dim = state.dimension();
  std::vector<double> g(dim);
  for (auto& x : g) x = rng.normal();
  auto dist_at = [&](double t) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      d2 += std::norm(state.amplitudes()[i]) * std::norm(std::polar(1.0, t * g[i]) - Complex(1.0, 0.0));
    return std::sqrt(d2);
  };
  double lo = 0.0, hi = 1.0;
  while (dist_at(hi) < eps && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (dist_at(mid) < eps) lo = mid; else hi = mid;
  }
  double t = 0.5 * (lo + hi);
  StateVector out = state;
  for (std::size_t i = 0; i < dim; ++i) out.amplitudes()[i] *= std::polar(1.0, t * g[i]);
  double n = out.norm();
  for (auto& a : out.amplitudes()) a /= n;
  return out;
}

}  // namespace qmve
