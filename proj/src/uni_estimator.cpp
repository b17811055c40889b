#include "qmve/uni_estimator.hpp"

#include <cmath>

#include "qmve/phase_estimation.hpp"
#include "qmve/schedule.hpp"

namespace qmve {

namespace {

// lambda = 5 / (4 - 5 s0^2) at the refinement step's s0 = sqrt(10)/12
const double kRefineLambda = 5.0 / (4.0 - 5.0 * (10.0 / 144.0));

// Core of the refinement step; assumes the caller already vetted (or chose
// to skip vetting) the moment conditions.
double refine_core(const UniRv& rv, double eps, double delta, const Rng& rng,
                   CostLedger& ledger, const std::string& stage) {
  UniRv theta = to_angle(rv, kRefineLambda, eps);
  std::uint64_t N = uni_resolution(eps);
  std::uint64_t M = median_boost_reps(delta);
  GroverPhaseSampler sampler(theta, N);
  std::vector<double> vals(M);
  for (std::uint64_t t = 0; t < M; ++t) {
    Rng r = rng.substream(t);
    vals[t] = 2.0 * kPi * sampler.draw(r);
  }
  ledger.charge_grover_steps(stage, M * N, M);
  return median_of(std::move(vals));
}

double draw_value(const UniRv& rv, const TableSampler& sampler, Rng& rng) {
  return rv.x(sampler.draw(rng));
}

double classical_mom(const UniRv& rv, std::uint64_t n, double delta, const Rng& rng,
                     CostLedger& ledger, const std::string& stage) {
  std::uint64_t buckets =
      2 * static_cast<std::uint64_t>(std::ceil(4.0 * std::log(1.0 / delta))) + 1;
  std::uint64_t per = 4 * std::max<std::uint64_t>(n, 1);
  TableSampler sampler(rv.probs());
  std::vector<double> means(buckets);
  for (std::uint64_t b = 0; b < buckets; ++b) {
    Rng r = rng.substream(b);
    double acc = 0.0;
    for (std::uint64_t i = 0; i < per; ++i) acc += draw_value(rv, sampler, r);
    means[b] = acc / static_cast<double>(per);
  }
  ledger.charge(stage, buckets * per);
  return median_of(std::move(means));
}

// Ladder of refinement rounds; shared by constrained_uni and the quantized
// V subroutine (which cannot enforce preconditions mid-superposition).
double constrained_core(const UniRv& rv, double sigma0, double eps0, double n, double delta,
                        const Rng& rng, CostLedger& ledger) {
  if (sigma0 == 0.0 || eps0 == 0.0) return 0.0;
  std::int64_t rounds = static_cast<std::int64_t>(std::ceil(std::log2(n * eps0 / sigma0)));
  if (rounds <= 0) return 0.0;
  std::vector<double> ladder(rounds);
  for (std::int64_t l = 0; l < rounds; ++l)
    ladder[l] = (eps0 / sigma0) / (std::pow(2.0, static_cast<double>(l)) * 4.0);
  Schedule sched = schedule_for_eps(ladder, 2.0, delta);
  double running = 0.0;
  for (std::int64_t l = 0; l < rounds; ++l) {
    UniRv shifted = rv.shifted(-running).scaled(1.0 / (4.0 * sigma0));
    double mu = refine_core(shifted, sched.eps[l], sched.delta[l], rng.substream(1000 + l),
                            ledger, "round" + std::to_string(l + 1));
    running += 4.0 * sigma0 * mu;
  }
  return running;
}

}  // namespace

EstimateReport refine_uni(const UniRv& rv, double eps, double delta, std::uint64_t seed,
                          const UniParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("refine_uni: delta must be in (0,1)");
  if (!(eps > 0.0 && eps <= 1.0 / 12.0 + 1e-15))
    fail_precondition("refine_uni: need 0 < eps <= 1/12");
  if (params.enforce_preconditions) {
    ScalarStats st = moments(rv);
    if (std::fabs(st.mean) > eps + 1e-15)
      fail_precondition("refine_uni: |E X| = " + std::to_string(std::fabs(st.mean)) +
                        " exceeds eps = " + std::to_string(eps));
    if (st.variance > 1.0 / 16.0 + 1e-15)
      fail_precondition("refine_uni: Var X = " + std::to_string(st.variance) +
                        " exceeds 1/16");
  }
  EstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  rep.estimate = refine_core(rv, eps, delta, Rng(seed), ledger, "refine_uni");
  rep.cost = ledger.report();
  return rep;
}

EstimateReport constrained_uni(const UniRv& rv, double sigma0, double eps0, double n,
                               double delta, std::uint64_t seed, const UniParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("constrained_uni: delta in (0,1)");
  if (!(sigma0 >= 0.0)) fail_precondition("constrained_uni: sigma0 must be >= 0");
  if (params.enforce_preconditions) {
    ScalarStats st = moments(rv);
    if (st.variance > sigma0 * sigma0 + 1e-15)
      fail_precondition("constrained_uni: Var X = " + std::to_string(st.variance) +
                        " exceeds sigma0^2 = " + std::to_string(sigma0 * sigma0));
    if (std::fabs(st.mean) > eps0 + 1e-15)
      fail_precondition("constrained_uni: |E X| = " + std::to_string(std::fabs(st.mean)) +
                        " exceeds eps0");
    if (eps0 > sigma0 / 3.0 + 1e-15)
      fail_precondition("constrained_uni: eps0 exceeds sigma0 / 3");
  }
  EstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  rep.estimate = constrained_core(rv, sigma0, eps0, n, delta, Rng(seed), ledger);
  if (ledger.report().stages.empty()) {
    CostLedger zero(params.grover_charge);
    zero.charge("constrained_uni", 0, 0);
    rep.cost = zero.report();
  } else {
    rep.cost = ledger.report();
  }
  return rep;
}

EstimateReport notso_uni(const UniRv& rv, double sigma0, double n, double delta,
                         std::uint64_t seed, const UniParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("notso_uni: delta in (0,1)");
  if (params.enforce_preconditions) {
    ScalarStats st = moments(rv);
    if (st.variance > sigma0 * sigma0 + 1e-15)
      fail_precondition("notso_uni: Var X = " + std::to_string(st.variance) +
                        " exceeds sigma0^2");
  }
  EstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  Rng master(seed);
  double mu_prime = classical_mom(rv, 9, delta / 2.0, master.substream(1), ledger, "classical");
  double mu_second = constrained_core(rv.shifted(-mu_prime), sigma0, sigma0 / 3.0, n,
                                      delta / 2.0, master.substream(2), ledger);
  rep.estimate = mu_prime + mu_second;
  rep.cost = ledger.report();
  return rep;
}

EstimateReport median_of_means(const UniRv& rv, std::uint64_t n, double delta,
                               std::uint64_t seed) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("median_of_means: delta in (0,1)");
  EstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(1);
  rep.estimate = classical_mom(rv, n, delta, Rng(seed), ledger, "median_of_means");
  rep.cost = ledger.report();
  return rep;
}

EstimateReport bounded_rel_estimator(const UniRv& rv, double n, double delta,
                                     std::uint64_t seed, const UniParams& params) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("bounded_rel: delta in (0,1)");
  if (!(n > 0.0)) fail_precondition("bounded_rel: n must be positive");
  for (std::size_t k = 0; k < rv.size(); ++k)
    if (rv.x(k) < -1e-12 || rv.x(k) > 1.0 + 1e-12)
      fail_precondition("bounded_rel: value at outcome " + std::to_string(k) +
                        " outside [0, 1]");

  EstimateReport rep;
  rep.seed = seed;
  CostLedger ledger(params.grover_charge);
  Rng master(seed);
  UniParams loose = params;
  loose.enforce_preconditions = false;

  // stage 1: absolute accuracy 1/(4 n^2) with unit variance bound
  EstimateReport coarse = notso_uni(rv, 1.0, 4.0 * n * n, delta / 2.0,
                                    master.substream(1).base(), loose);
  ledger.absorb("stage1", coarse.cost);
  double sigma0_sq = std::min(1.0, std::max(0.0, coarse.estimate) + 1.5 / (n * n));
  // stage 2: sigma0^2 >= Var X once stage 1 landed, since Var X <= E X on [0,1]
  EstimateReport fine = notso_uni(rv, std::sqrt(sigma0_sq), n, delta / 2.0,
                                  master.substream(2).base(), loose);
  ledger.absorb("stage2", fine.cost);
  rep.estimate = fine.estimate;
  rep.cost = ledger.report();
  return rep;
}

}  // namespace qmve
