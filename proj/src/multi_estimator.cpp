#include "qmve/multi_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "qmve/fourier.hpp"
#include "qmve/schedule.hpp"
#include "qmve/secular.hpp"

namespace qmve {

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> dist_mean(const FiniteDist& d) { return d.mean(); }

// Marginal table of the multivariate phase-estimation circuit where the
// outcome-register block at lattice site u evolves to amps(u).  The planes
// are transformed per axis and collapsed to the lattice marginal.
struct LatticeRun {
  std::size_t N = 0;
  std::size_t d = 0;
  std::vector<double> joint;  // row-major over lattice slots

  std::vector<double> sample_fractions(Rng& rng, const TableSampler& sampler) const {
    std::size_t lin = sampler.draw(rng);
    std::vector<double> f(d);
    for (std::size_t a = d; a-- > 0;) {
      f[a] = slot_fraction(lin % N, N);
      lin /= N;
    }
    return f;
  }
};

// Grover evolution of |1> at every lattice site for the projected variable
// <u, X>, angles 2 atan(clamp(<u, x_k>, tau_cap) / 2).
LatticeRun grover_lattice_run(const FiniteDist& dist, const LatticeSpec& lat, double tau_cap,
                              std::uint64_t power) {
  std::size_t omega = dist.size();
  std::size_t sites = lat.site_count();
  if (sites > kAmplitudeCap / omega)
    fail_cap("grover_lattice_run: lattice x outcome dimension " + std::to_string(sites) + "x" +
             std::to_string(omega) + " exceeds the 2^22 amplitude cap");

  std::vector<double> sqrtp(omega);
  for (std::size_t k = 0; k < omega; ++k) sqrtp[k] = std::sqrt(dist.p(k));

  std::vector<std::vector<Complex>> planes(omega, std::vector<Complex>(sites));
  PowerBatchFn kernel = select_power_batch();

  constexpr std::size_t kChunk = 512;
  std::size_t chunks = (sites + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::size_t lo = c * kChunk, hi = std::min(sites, lo + kChunk);
    std::vector<double> tau((hi - lo) * omega);
    std::vector<Complex> amps((hi - lo) * omega);
    std::vector<double> u(lat.dim);
    for (std::size_t s = lo; s < hi; ++s) {
      std::size_t rem = s;
      for (std::size_t a = lat.dim; a-- > 0;) {
        u[a] = lat.coordinate(rem % lat.resolution);
        rem /= lat.resolution;
      }
      for (std::size_t k = 0; k < omega; ++k) {
        double dot = 0.0;
        for (std::size_t a = 0; a < lat.dim; ++a) dot += u[a] * dist.value(k)[a];
        double t = 0.5 * dot;
        tau[(s - lo) * omega + k] = std::clamp(t, -tau_cap, tau_cap);
      }
    }
    PowerBatch batch;
    batch.tau = tau.data();
    batch.prob = dist.probs().data();
    batch.sqrt_prob = sqrtp.data();
    batch.omega = omega;
    batch.count = hi - lo;
    batch.power = power;
    batch.amps = amps.data();
    kernel(batch);
    for (std::size_t s = lo; s < hi; ++s)
      for (std::size_t k = 0; k < omega; ++k) planes[k][s] = amps[(s - lo) * omega + k];
  });

  LatticeRun run;
  run.N = lat.resolution;
  run.d = lat.dim;
  run.joint.assign(sites, 0.0);
  double inv_sites = 1.0 / static_cast<double>(sites);
  for (std::size_t k = 0; k < omega; ++k) {
    centered_transform_nd(planes[k].data(), lat.dim, lat.resolution, 1, false);
    for (std::size_t s = 0; s < sites; ++s) run.joint[s] += std::norm(planes[k][s]) * inv_sites;
  }
  return run;
}

// Same marginal for the meticulous path: coherent amplitude g(u) per site
// with junk branches orthogonal across sites (a uniform background after the
// lattice transform).
LatticeRun coherent_lattice_run(std::vector<Complex> g, double junk_total,
                                const LatticeSpec& lat) {
  std::size_t sites = g.size();
  double inv_sites = 1.0 / static_cast<double>(sites);
  for (auto& z : g) z *= std::sqrt(inv_sites);
  centered_transform_nd(g.data(), lat.dim, lat.resolution, 1, false);
  LatticeRun run;
  run.N = lat.resolution;
  run.d = lat.dim;
  run.joint.assign(sites, 0.0);
  double background = junk_total * inv_sites * inv_sites;
  for (std::size_t s = 0; s < sites; ++s) run.joint[s] = std::norm(g[s]) + background;
  return run;
}

std::vector<double> per_axis_medians(const LatticeRun& run, std::uint64_t reps, const Rng& rng) {
  TableSampler sampler(run.joint);
  std::vector<std::vector<double>> by_axis(run.d, std::vector<double>(reps));
  for (std::uint64_t t = 0; t < reps; ++t) {
    Rng r = rng.substream(t);
    std::vector<double> f = run.sample_fractions(r, sampler);
    for (std::size_t a = 0; a < run.d; ++a) by_axis[a][t] = f[a];
  }
  std::vector<double> med(run.d);
  for (std::size_t a = 0; a < run.d; ++a) med[a] = median_of(std::move(by_axis[a]));
  return med;
}

// Internal round: no precondition vetting, shared between the public
// refinement op and the constrained ladder.
std::vector<double> refine_multi_core(const FiniteDist& dist, double eps, double delta,
                                      const Rng& rng, CostLedger& ledger,
                                      const std::string& stage, const MultiParams& params) {
  std::size_t d = dist.dim();
  double s0 = params.profile.grover_s0(static_cast<double>(d));
  double lambda = 5.0 / (4.0 - 5.0 * s0 * s0);
  double tau_cap = 0.5 / (lambda * eps);
  std::uint64_t N = params.profile.refine_resolution(eps);
  LatticeSpec lat(d, N);
  LatticeRun run = grover_lattice_run(dist, lat, tau_cap, N);
  std::uint64_t M = median_boost_reps(delta / static_cast<double>(d));
  std::vector<double> med = per_axis_medians(run, M, rng);
  for (double& m : med) m *= 2.0 * kPi;
  ledger.charge_grover_steps(stage, M * N, M);
  return med;
}

std::vector<double> constrained_simple_core(const FiniteDist& dist, double n, double sigma0,
                                            double eps0, double delta, const Rng& rng,
                                            CostLedger& ledger, const MultiParams& params) {
  std::size_t d = dist.dim();
  std::vector<double> running(d, 0.0);
  if (sigma0 == 0.0 || eps0 == 0.0) return running;
  std::int64_t rounds = static_cast<std::int64_t>(std::ceil(std::log2(n * eps0 / sigma0)));
  if (rounds <= 0) return running;
  double K = params.profile.simple_scale(static_cast<double>(d), params.D);
  std::vector<double> ladder(rounds);
  for (std::int64_t l = 0; l < rounds; ++l)
    ladder[l] = (eps0 / sigma0) / (std::pow(2.0, static_cast<double>(l)) * K);
  Schedule sched = schedule_for_eps(ladder, 2.0, delta);
  for (std::int64_t l = 0; l < rounds; ++l) {
    FiniteDist shifted = dist.shift_scale(running, K * sigma0);
    std::vector<double> mu =
        refine_multi_core(shifted, sched.eps[l], sched.delta[l], rng.substream(2000 + l),
                          ledger, "round" + std::to_string(l + 1), params);
    for (std::size_t a = 0; a < d; ++a) running[a] += K * sigma0 * mu[a];
  }
  return running;
}

}  // namespace

TailCheckResult variance_tail_check(const FiniteDist& dist, const LatticeSpec& lat, double D) {
  if (!(D > 0.0)) fail_precondition("variance_tail_check: D must be positive");
  std::size_t sites = lat.site_count();
  if (sites > (std::size_t{1} << 20))
    fail_cap("variance_tail_check: lattice too large to enumerate (N^d > 2^20)");
  if (lat.dim != dist.dim()) fail_precondition("variance_tail_check: dimension mismatch");

  CovSummary cov = covariance(dist);
  std::vector<double> var(sites);
  std::vector<double> u(lat.dim);
  for (std::size_t s = 0; s < sites; ++s) {
    std::size_t rem = s;
    for (std::size_t a = lat.dim; a-- > 0;) {
      u[a] = lat.coordinate(rem % lat.resolution);
      rem /= lat.resolution;
    }
    double v = 0.0;
    for (std::size_t a = 0; a < lat.dim; ++a)
      for (std::size_t b = 0; b < lat.dim; ++b) v += u[a] * cov.at(a, b) * u[b];
    var[s] = v;
  }

  // evaluate the tail at every achieved level (the empirical tail only jumps
  // there, and the bound is monotone)
  std::vector<std::size_t> order(sites);
  for (std::size_t s = 0; s < sites; ++s) order[s] = s;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return var[a] > var[b]; });

  TailCheckResult res;
  res.D = D;
  double count = 0.0;
  for (std::size_t i = 0; i < sites; ++i) {
    count += 1.0;
    bool last_of_level = (i + 1 == sites) || (var[order[i + 1]] < var[order[i]] - 1e-300);
    if (!last_of_level) continue;
    double t = var[order[i]];
    double emp = count / static_cast<double>(sites);
    double bnd = (cov.trace > 0.0) ? 2.0 * std::exp(-t / (D * cov.trace)) : (t > 0.0 ? 0.0 : 2.0);
    res.t_grid.push_back(t);
    res.empirical.push_back(emp);
    res.bound.push_back(bnd);
    if (emp > bnd && res.ok) {
      res.ok = false;
      res.worst_t = t;
      res.worst_u = order[i];
    }
  }
  return res;
}

MultiEstimateReport refine_multi(const FiniteDist& dist, double eps, double delta,
                                 std::uint64_t seed, const MultiParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("refine_multi: delta in (0,1)");
  std::size_t d = dist.dim();
  if (params.enforce_preconditions) {
    double cap = params.profile.refine_eps_cap(static_cast<double>(d));
    if (!(eps > 0.0 && eps <= cap + 1e-15))
      fail_precondition("refine_multi: eps = " + std::to_string(eps) +
                        " outside (0, " + std::to_string(cap) + "]");
    std::vector<double> mu = dist_mean(dist);
    double inf = 0.0;
    for (double m : mu) inf = std::max(inf, std::fabs(m));
    if (inf > std::sqrt(static_cast<double>(d)) * eps + 1e-15)
      fail_precondition("refine_multi: ||E X||_inf = " + std::to_string(inf) +
                        " exceeds sqrt(d) eps");
    double K = params.profile.simple_scale(static_cast<double>(d), params.D);
    if (covariance(dist).trace > 1.0 / (K * K) + 1e-15)
      fail_precondition("refine_multi: tr Sigma exceeds the profile trace budget " +
                        std::to_string(1.0 / (K * K)));
  }
  MultiEstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  rep.estimate =
      refine_multi_core(dist, eps, delta, Rng(seed), ledger, "refine_multi", params);
  rep.cost = ledger.report();
  return rep;
}

MultiEstimateReport constrained_simple(const FiniteDist& dist, double n, double sigma0,
                                       double eps0, double delta, std::uint64_t seed,
                                       const MultiParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("constrained_simple: delta in (0,1)");
  std::size_t d = dist.dim();
  if (params.enforce_preconditions) {
    if (covariance(dist).trace > sigma0 * sigma0 + 1e-15)
      fail_precondition("constrained_simple: tr Sigma exceeds sigma0^2");
    double cap = params.profile.eps0_cap_factor(params.D) * sigma0;
    double mu2 = l2_norm(dist_mean(dist));
    if (mu2 > eps0 + 1e-15)
      fail_precondition("constrained_simple: ||E X||_2 = " + std::to_string(mu2) +
                        " exceeds eps0");
    if (eps0 > cap + 1e-15)
      fail_precondition("constrained_simple: eps0 exceeds profile cap " + std::to_string(cap));
  }
  MultiEstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  rep.estimate =
      constrained_simple_core(dist, n, sigma0, eps0, delta, Rng(seed), ledger, params);
  if (ledger.report().stages.empty()) ledger.charge("constrained_simple", 0, 0);
  rep.cost = ledger.report();
  return rep;
}

VChannel build_v_channel(const UniRv& rv, std::uint64_t N, double sigma0, double eps0,
                         double xi, VMode mode, std::uint64_t seed,
                         const MultiParams& params) {
  VChannel ch;
  ch.mode = mode;
  ch.N = N;
  ch.xi = xi;
  ch.mu = moments(rv).mean;
  VParams vp = VParams::from(N, sigma0, xi);
  ch.deviation_bound =
      4.0 * vp.delta_inner +
      std::pow(static_cast<double>(N) * sigma0 / vp.n_inner, 2.0);

  if (mode == VMode::IdealPhase) {
    double c = 1.0 - 0.5 * xi * xi;
    ch.coherent = c * std::polar(1.0, static_cast<double>(N) * ch.mu);
    ch.junk = xi * xi - 0.25 * xi * xi * xi * xi;
    ch.deviation_sq = xi * xi;  // injected distance, exactly xi
    ch.ok = true;
    return ch;
  }

  std::size_t T = std::max<std::size_t>(params.v_channel_samples, 1);
  UniParams up;
  up.grover_charge = params.grover_charge;
  up.enforce_preconditions = false;  // runs inside a superposition model
  Rng master(seed);
  ch.q.assign(T, 1.0 / static_cast<double>(T));
  ch.y.resize(T);
  for (std::size_t t = 0; t < T; ++t)
    ch.y[t] = constrained_uni(rv, sigma0, eps0, vp.n_inner, vp.delta_inner,
                              master.substream(t).base(), up)
                  .estimate;

  Complex g(0.0, 0.0);
  double dev = 0.0;
  Complex ideal = std::polar(1.0, static_cast<double>(N) * ch.mu);
  for (std::size_t t = 0; t < T; ++t) {
    Complex ph = std::polar(1.0, static_cast<double>(N) * ch.y[t]);
    g += ch.q[t] * ph;
    dev += ch.q[t] * std::norm(ph - ideal);
  }
  ch.coherent = g;
  ch.junk = std::max(0.0, 1.0 - std::norm(g));
  ch.deviation_sq = dev;
  ch.ok = dev <= ch.deviation_bound + 1e-12;
  return ch;
}

MultiEstimateReport constrained_meticulous(const FiniteDist& dist, double n, double sigma0,
                                           double delta, VMode mode, std::uint64_t seed,
                                           const MultiParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("constrained_meticulous: delta in (0,1)");
  std::size_t d = dist.dim();
  if (params.enforce_preconditions) {
    if (covariance(dist).trace > sigma0 * sigma0 + 1e-15)
      fail_precondition("constrained_meticulous: tr Sigma exceeds sigma0^2");
    double cap = params.profile.eps0_cap_factor(params.D) * sigma0;
    if (l2_norm(dist_mean(dist)) > cap + 1e-15)
      fail_precondition("constrained_meticulous: ||E X||_2 exceeds the mean cap");
    if (d >= 2) {
      double floor_n = std::log(static_cast<double>(d) / delta) /
                       std::sqrt(std::log(static_cast<double>(d)));
      if (n < floor_n - 1e-12)
        fail_precondition("constrained_meticulous: n below ln(d/delta)/sqrt(ln d) = " +
                          std::to_string(floor_n));
    }
  }

  const double xi = 1.0 / 13.0;
  std::uint64_t N = params.profile.met_resolution(n, params.D);
  double K = params.profile.met_scale(params.D) * sigma0;
  LatticeSpec lat(d, N);
  std::size_t sites = lat.site_count();
  std::uint64_t M = median_boost_reps(delta / static_cast<double>(d));

  MultiEstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  Rng master(seed);

  // per-site coherent amplitudes of the V channel
  std::vector<Complex> g(sites);
  double junk_total = 0.0;
  bool all_certified = true;
  double worst_dev = 0.0, worst_bound = 0.0;

  if (sigma0 == 0.0 || mode == VMode::IdealPhase) {
    std::vector<double> mu = dist_mean(dist);
    std::vector<double> u(d);
    double c = 1.0 - 0.5 * xi * xi;
    double junk_each = xi * xi - 0.25 * xi * xi * xi * xi;
    for (std::size_t s = 0; s < sites; ++s) {
      std::size_t rem = s;
      for (std::size_t a = d; a-- > 0;) {
        u[a] = lat.coordinate(rem % lat.resolution);
        rem /= lat.resolution;
      }
      double dot = 0.0;
      for (std::size_t a = 0; a < d; ++a) dot += u[a] * mu[a];
      double mu_u = (K > 0.0) ? dot / K : 0.0;
      g[s] = c * std::polar(1.0, static_cast<double>(N) * mu_u);
    }
    junk_total = junk_each * static_cast<double>(sites);
  } else {
    FiniteDist scaled = dist.shift_scale(std::vector<double>(d, 0.0), K);
    std::vector<double> dev(sites, 0.0);
    parallel_for(sites, [&](std::size_t s) {
      std::vector<double> u(d);
      std::size_t rem = s;
      for (std::size_t a = d; a-- > 0;) {
        u[a] = lat.coordinate(rem % lat.resolution);
        rem /= lat.resolution;
      }
      UniRv proj = project_rv(scaled, u);
      VChannel ch = build_v_channel(proj, N, 1.0, 1.0 / 3.0, xi, VMode::Empirical,
                                    derive_seed(seed, 7000 + s), params);
      g[s] = ch.coherent;
      dev[s] = ch.deviation_sq;
    });
    for (std::size_t s = 0; s < sites; ++s) {
      junk_total += std::max(0.0, 1.0 - std::norm(g[s]));
      VParams vp = VParams::from(N, 1.0, xi);
      double bound = 4.0 * vp.delta_inner +
                     std::pow(static_cast<double>(N) / vp.n_inner, 2.0);
      if (dev[s] > worst_dev) worst_dev = dev[s];
      worst_bound = bound;
      if (dev[s] > bound + 1e-12) all_certified = false;
    }
  }

  LatticeRun run = coherent_lattice_run(std::move(g), junk_total, lat);
  std::vector<double> med = per_axis_medians(run, M, master.substream(1));
  rep.estimate.resize(d);
  for (std::size_t a = 0; a < d; ++a) rep.estimate[a] = 2.0 * kPi * K * med[a];

  // modeled cost: V = U^dag (I x Q) U around the quantized inner estimator
  VParams vp = VParams::from(N, 1.0, xi);
  PredictParams pp{params.grover_charge, params.D, params.C, params.profile};
  CostReport inner = predict_constrained_uni(vp.n_inner, 1.0 / 3.0, vp.delta_inner, pp);
  ledger.charge("meticulous_pe", M * 2 * inner.experiment_accesses, M);
  ledger.set_registers_peak(std::max<std::uint64_t>(1, inner.pe_invocations));
  rep.cost = ledger.report();
  if (mode == VMode::Empirical) {
    rep.certificates.push_back(
        {"v_channel_deviation", worst_dev, worst_bound, all_certified});
    if (!all_certified)
      fail_certificate("constrained_meticulous: empirical V deviation " +
                       std::to_string(worst_dev) + " exceeds bound " +
                       std::to_string(worst_bound));
  }
  return rep;
}

MultiEstimateReport classical_multi(const FiniteDist& dist, std::uint64_t n, double delta,
                                    std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("classical_multi: delta in (0,1)");
  std::size_t d = dist.dim();
  std::uint64_t total = classical_multi_draw_count(n, delta);
  std::uint64_t buckets = static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta)));
  buckets = std::max<std::uint64_t>(buckets, 1);
  std::uint64_t raw_total = std::max<std::uint64_t>(n, 1) *
                            static_cast<std::uint64_t>(std::ceil(std::log(1.0 / delta)));
  if (buckets > raw_total) buckets = raw_total;
  std::uint64_t per = raw_total / buckets;

  TableSampler sampler(dist.probs());
  Rng master(seed);
  std::vector<std::vector<double>> means(buckets, std::vector<double>(d, 0.0));
  for (std::uint64_t b = 0; b < buckets; ++b) {
    Rng r = master.substream(b);
    for (std::uint64_t i = 0; i < per; ++i) {
      std::size_t k = sampler.draw(r);
      for (std::size_t a = 0; a < d; ++a) means[b][a] += dist.value(k)[a];
    }
    for (std::size_t a = 0; a < d; ++a) means[b][a] /= static_cast<double>(per);
  }

  // geometric median, Weiszfeld with a singularity guard
  std::vector<double> x = means[0];
  for (int it = 0; it < 200; ++it) {
    std::vector<double> num(d, 0.0);
    double den = 0.0;
    bool at_point = false;
    for (const auto& m : means) {
      double dist2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) dist2 += (x[a] - m[a]) * (x[a] - m[a]);
      double r = std::sqrt(dist2);
      if (r < 1e-14) { at_point = true; continue; }
      for (std::size_t a = 0; a < d; ++a) num[a] += m[a] / r;
      den += 1.0 / r;
    }
    if (den == 0.0) break;
    std::vector<double> nx(d);
    double move = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      nx[a] = num[a] / den;
      move += (nx[a] - x[a]) * (nx[a] - x[a]);
    }
    if (at_point && move > 0.0) {
      // standard damped step through a sample point
      for (std::size_t a = 0; a < d; ++a) nx[a] = 0.5 * (nx[a] + x[a]);
    }
    x = nx;
    if (std::sqrt(move) < 1e-10) break;
  }

  MultiEstimateReport rep;
  rep.seed = seed;
  rep.estimate = x;
  CostLedger ledger(1);
  ledger.charge("classical_multi", total);
  rep.cost = ledger.report();
  return rep;
}

double exact_quantile(const UniRv& rv, double p) {
  // sup { y : P[X >= y] >= p } over the finite support
  std::vector<std::size_t> order(rv.size());
  for (std::size_t k = 0; k < rv.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rv.x(a) > rv.x(b); });
  double tail = 0.0;
  double best = rv.x(order[0]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    tail += rv.p(order[i]);
    if (tail >= p - 1e-15) return rv.x(order[i]);
    best = rv.x(order[i]);
  }
  return best;
}

QuantileResult quantile_estimate(const UniRv& rv, double p, double delta, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) fail_precondition("quantile_estimate: p must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("quantile_estimate: delta in (0,1)");
  QuantileResult res;
  res.classical_draws = quantile_draw_count(p, delta);
  res.quantum_charge = quantile_quantum_charge(p, delta);
  TableSampler sampler(rv.probs());
  Rng rng(seed);
  std::vector<double> draws(res.classical_draws);
  for (auto& v : draws) v = rv.x(sampler.draw(rng));
  std::uint64_t rank = static_cast<std::uint64_t>(
      std::ceil(0.75 * p * static_cast<double>(res.classical_draws)));
  rank = std::clamp<std::uint64_t>(rank, 1, draws.size());
  std::nth_element(draws.begin(), draws.begin() + (rank - 1), draws.end(),
                   std::greater<double>());
  res.value = draws[rank - 1];
  return res;
}

MultiEstimateReport notso_multi(const FiniteDist& dist, double n, double sigma0, double delta,
                                bool meticulous, std::uint64_t seed,
                                const MultiParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("notso_multi: delta in (0,1)");
  std::size_t d = dist.dim();
  if (params.enforce_preconditions && covariance(dist).trace > sigma0 * sigma0 + 1e-15)
    fail_precondition("notso_multi: tr Sigma exceeds sigma0^2");

  MultiEstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  Rng master(seed);

  std::uint64_t nk = notso_multi_kickstart_n(delta, params.D, params.profile);
  MultiEstimateReport kick = classical_multi(dist, nk, delta / 2.0, master.substream(1).base());
  ledger.absorb("classical", kick.cost);

  FiniteDist shifted = dist.shift_scale(kick.estimate, 1.0);
  double eps0 = params.profile.eps0_cap_factor(params.D) * sigma0;
  MultiParams inner = params;
  inner.enforce_preconditions = false;  // conditioned on the kickstart landing
  MultiEstimateReport tail =
      meticulous
          ? constrained_meticulous(shifted, n, sigma0, delta / 2.0, VMode::IdealPhase,
                                   master.substream(2).base(), inner)
          : constrained_simple(shifted, n, sigma0, eps0, delta / 2.0,
                               master.substream(2).base(), inner);
  ledger.absorb("quantum", tail.cost);
  ledger.set_registers_peak(std::max<std::uint64_t>(1, tail.cost.registers_peak));

  rep.estimate.resize(d);
  for (std::size_t a = 0; a < d; ++a) rep.estimate[a] = kick.estimate[a] + tail.estimate[a];
  rep.cost = ledger.report();
  return rep;
}

MultiEstimateReport full_estimator(const FiniteDist& dist, double n, double delta,
                                   bool meticulous, std::uint64_t seed,
                                   const MultiParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("full_estimator: delta in (0,1)");
  if (!(n > 0.0)) fail_precondition("full_estimator: n must be positive");
  std::size_t d = dist.dim();

  MultiEstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  Rng master(seed);

  double p = 25.0 / (52.0 * params.C * n * n);
  if (!(p < 1.0))
    fail_precondition("full_estimator: quantile level p = " + std::to_string(p) +
                      " needs a larger n");
  double n_prime = 2.0 * std::sqrt(52.0 / 25.0) * n;

  // stage 1: classical kickstart
  MultiEstimateReport kick = classical_multi(dist, full_kickstart_n(delta / 4.0), delta / 4.0,
                                             master.substream(1).base());
  ledger.absorb("kickstart", kick.cost);

  // stage 2: quantile of ||X - mu'||_2 pins the truncation radius
  FiniteDist centered = dist.shift_scale(kick.estimate, 1.0);
  std::vector<double> norms(centered.size());
  for (std::size_t k = 0; k < centered.size(); ++k) norms[k] = l2_norm(centered.value(k));
  UniRv norm_rv(centered.probs(), norms);
  QuantileResult quant = quantile_estimate(norm_rv, p, delta / 4.0, master.substream(2).base());
  ledger.charge("quantile", quant.quantum_charge);
  rep.classical_sim_draws += quant.classical_draws;
  double Kq = quant.value;

  double q_lo = exact_quantile(norm_rv, p);
  double q_hi = exact_quantile(norm_rv, params.C * p);
  rep.certificates.push_back({"quantile_sandwich", Kq,
                              q_hi, (Kq >= q_lo - 1e-12 && Kq <= q_hi + 1e-12)});

  // stage 3: truncation and relative-accuracy second moment
  FiniteDist truncated = truncate_multi(centered, Kq);
  double s_prime = 0.0;
  double rel_mean_exact = 0.0;
  if (Kq > 0.0) {
    std::vector<double> rel(truncated.size());
    for (std::size_t k = 0; k < truncated.size(); ++k) {
      double r = l2_norm(truncated.value(k)) / Kq;
      rel[k] = r * r;
    }
    UniRv rel_rv(truncated.probs(), rel);
    rel_mean_exact = moments(rel_rv).mean;
    UniParams up;
    up.grover_charge = params.grover_charge;
    up.enforce_preconditions = false;
    EstimateReport rel_rep = bounded_rel_estimator(rel_rv, 4.0 / std::sqrt(p), delta / 4.0,
                                                   master.substream(3).base(), up);
    ledger.absorb("norm2", rel_rep.cost);
    double s2 = std::max(0.0, rel_rep.estimate);
    s_prime = std::sqrt(s2);

    rep.certificates.push_back(
        {"truncation_moment", Kq * Kq * p, rel_mean_exact * Kq * Kq,
         rel_mean_exact * Kq * Kq >= Kq * Kq * p - 1e-12});
    rep.certificates.push_back({"relative_error", std::fabs(s2 - rel_mean_exact),
                                rel_mean_exact / 3.0,
                                std::fabs(s2 - rel_mean_exact) <= rel_mean_exact / 3.0 + 1e-12});
  } else {
    rep.certificates.push_back({"quantile_zero_radius", 0.0, 0.0, true});
  }

  // stage 4: constrained tail estimator on the truncated variable
  double sigma0 = std::sqrt(1.5) * Kq * s_prime;
  MultiParams inner = params;
  inner.enforce_preconditions = false;
  MultiEstimateReport tail = notso_multi(truncated, n_prime, sigma0, delta / 4.0, meticulous,
                                         master.substream(4).base(), inner);
  ledger.absorb("notso_multi", tail.cost);
  ledger.set_registers_peak(std::max<std::uint64_t>(1, tail.cost.registers_peak));

  rep.estimate.resize(d);
  for (std::size_t a = 0; a < d; ++a) rep.estimate[a] = kick.estimate[a] + tail.estimate[a];
  rep.cost = ledger.report();
  for (const auto& c : tail.certificates) rep.certificates.push_back(c);
  return rep;
}

}  // namespace qmve
