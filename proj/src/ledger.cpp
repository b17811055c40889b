#include "qmve/ledger.hpp"

#include <cmath>

#include "qmve/schedule.hpp"

namespace qmve {

void CostReport::add(const std::string& stage, std::uint64_t accesses, std::uint64_t pe) {
  experiment_accesses += accesses;
  pe_invocations += pe;
  stages.push_back({stage, accesses, pe});
}

void CostReport::merge(const std::string& prefix, const CostReport& other) {
  experiment_accesses += other.experiment_accesses;
  pe_invocations += other.pe_invocations;
  registers_peak = std::max(registers_peak, other.registers_peak);
  for (const auto& s : other.stages)
    stages.push_back({prefix + "/" + s.stage, s.experiment_accesses, s.pe_invocations});
}

void CostLedger::charge(const std::string& stage, std::uint64_t amount, std::uint64_t pe) {
  report_.add(stage, amount, pe);
}

std::uint64_t mom_draw_count(std::uint64_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("median_of_means: delta in (0,1)");
  std::uint64_t buckets = 2 * static_cast<std::uint64_t>(std::ceil(4.0 * std::log(1.0 / delta))) + 1;
  return buckets * 4 * std::max<std::uint64_t>(n, 1);
}

std::uint64_t classical_multi_draw_count(std::uint64_t n, double delta) {
  std::uint64_t total = std::max<std::uint64_t>(n, 1) *
                        static_cast<std::uint64_t>(std::ceil(std::log(1.0 / delta)));
  std::uint64_t buckets = static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta)));
  buckets = std::max<std::uint64_t>(buckets, 1);
  if (buckets > total) buckets = total;
  std::uint64_t per = total / buckets;
  return buckets * per;
}

std::uint64_t quantile_draw_count(double p, double delta) {
  return static_cast<std::uint64_t>(std::ceil(64.0 * std::log(1.0 / delta) / p));
}

std::uint64_t quantile_quantum_charge(double p, double delta) {
  return static_cast<std::uint64_t>(std::ceil(64.0 * std::log(1.0 / delta) / std::sqrt(p)));
}

std::uint64_t notso_multi_kickstart_n(double delta, double D, const ScaleProfile& profile) {
  double g = 1.0 + std::sqrt(1.0 / std::log(2.0 / delta));
  return static_cast<std::uint64_t>(
      std::ceil((225.0 / 4.0) * profile.tail_exp * D * g * g));
}

std::uint64_t full_kickstart_n(double delta) {
  double g = 1.0 + std::sqrt(1.0 / std::log(4.0 / delta));
  return static_cast<std::uint64_t>(std::ceil(25.0 * g * g));
}

VParams VParams::from(std::uint64_t N, double sigma0, double xi) {
  VParams v;
  v.n_inner = std::ceil(3.0 * static_cast<double>(N) * sigma0 / (2.0 * xi));
  v.delta_inner = xi * xi / 9.0;
  return v;
}

CostReport predict_refine_uni(double eps, double delta, const PredictParams& pp) {
  CostReport r;
  std::uint64_t M = median_boost_reps(delta);
  std::uint64_t N = uni_resolution(eps);
  r.add("refine_uni", M * N * pp.grover_charge, M);
  return r;
}

CostReport predict_constrained_uni(double n, double eps0_ratio, double delta,
                                   const PredictParams& pp) {
  CostReport r;
  double rounds_raw = std::log2(n * eps0_ratio);
  std::int64_t M = static_cast<std::int64_t>(std::ceil(rounds_raw));
  if (M <= 0) {
    r.add("constrained_uni", 0, 0);
    return r;
  }
  std::vector<double> ladder(M);
  for (std::int64_t l = 0; l < M; ++l)
    ladder[l] = eps0_ratio / (std::pow(2.0, static_cast<double>(l)) * 4.0);
  Schedule sched = schedule_for_eps(ladder, 2.0, delta);
  for (std::int64_t l = 0; l < M; ++l) {
    CostReport step = predict_refine_uni(sched.eps[l], sched.delta[l], pp);
    r.merge("round" + std::to_string(l + 1), step);
  }
  return r;
}

CostReport predict_notso_uni(double n, double delta, const PredictParams& pp) {
  CostReport r;
  r.add("classical", mom_draw_count(9, delta / 2.0));
  r.merge("quantum", predict_constrained_uni(n, 1.0 / 3.0, delta / 2.0, pp));
  return r;
}

CostReport predict_median_of_means(std::uint64_t n, double delta) {
  CostReport r;
  r.add("median_of_means", mom_draw_count(n, delta));
  return r;
}

CostReport predict_classical_multi(std::uint64_t n, double delta) {
  CostReport r;
  r.add("classical_multi", classical_multi_draw_count(n, delta));
  return r;
}

CostReport predict_bounded_rel(double n, double delta, const PredictParams& pp) {
  CostReport r;
  r.merge("stage1", predict_notso_uni(4.0 * n * n, delta / 2.0, pp));
  r.merge("stage2", predict_notso_uni(n, delta / 2.0, pp));
  return r;
}

CostReport predict_quantile(double p, double delta) {
  CostReport r;
  r.add("quantile", quantile_quantum_charge(p, delta));
  return r;
}

CostReport predict_refine_multi(double eps, double delta, std::size_t d,
                                const PredictParams& pp) {
  CostReport r;
  std::uint64_t M = median_boost_reps(delta / static_cast<double>(d));
  std::uint64_t N = pp.profile.refine_resolution(eps);
  r.add("refine_multi", M * N * pp.grover_charge, M);
  return r;
}

CostReport predict_constrained_simple(double n, double eps0_ratio, double delta, std::size_t d,
                                      const PredictParams& pp) {
  CostReport r;
  std::int64_t M = static_cast<std::int64_t>(std::ceil(std::log2(n * eps0_ratio)));
  if (M <= 0) {
    r.add("constrained_simple", 0, 0);
    return r;
  }
  double K = pp.profile.simple_scale(static_cast<double>(d), pp.D);
  std::vector<double> ladder(M);
  for (std::int64_t l = 0; l < M; ++l)
    ladder[l] = eps0_ratio / (std::pow(2.0, static_cast<double>(l)) * K);
  Schedule sched = schedule_for_eps(ladder, 2.0, delta);
  for (std::int64_t l = 0; l < M; ++l) {
    CostReport step = predict_refine_multi(sched.eps[l], sched.delta[l], d, pp);
    r.merge("round" + std::to_string(l + 1), step);
  }
  return r;
}

CostReport predict_meticulous(double n, double delta, std::size_t d, const PredictParams& pp) {
  CostReport r;
  std::uint64_t N = pp.profile.met_resolution(n, pp.D);
  std::uint64_t M = median_boost_reps(delta / static_cast<double>(d));
  VParams vp = VParams::from(N, 1.0, 1.0 / 13.0);
  CostReport inner = predict_constrained_uni(vp.n_inner, 1.0 / 3.0, vp.delta_inner, pp);
  // V = U^dag (I x Q) U runs the quantized inner estimator forward and back
  r.add("meticulous_pe", M * 2 * inner.experiment_accesses, M);
  r.registers_peak = std::max<std::uint64_t>(1, inner.pe_invocations);
  return r;
}

CostReport predict_notso_multi(double n, double delta, std::size_t d, bool meticulous,
                               const PredictParams& pp) {
  CostReport r;
  std::uint64_t nk = notso_multi_kickstart_n(delta, pp.D, pp.profile);
  r.add("classical", classical_multi_draw_count(nk, delta / 2.0));
  double eps0_ratio = pp.profile.eps0_cap_factor(pp.D);
  CostReport inner = meticulous
                         ? predict_meticulous(n, delta / 2.0, d, pp)
                         : predict_constrained_simple(n, eps0_ratio, delta / 2.0, d, pp);
  r.merge("quantum", inner);
  r.registers_peak = std::max(r.registers_peak, inner.registers_peak);
  return r;
}

CostReport predict_full(double n, double delta, std::size_t d, bool meticulous,
                        const PredictParams& pp) {
  CostReport r;
  double p = 25.0 / (52.0 * pp.C * n * n);
  double n_prime = 2.0 * std::sqrt(52.0 / 25.0) * n;
  r.add("kickstart", classical_multi_draw_count(full_kickstart_n(delta / 4.0), delta / 4.0));
  r.merge("quantile", predict_quantile(p, delta / 4.0));
  r.merge("norm2", predict_bounded_rel(4.0 / std::sqrt(p), delta / 4.0, pp));
  CostReport tail = predict_notso_multi(n_prime, delta / 4.0, d, meticulous, pp);
  r.merge("notso_multi", tail);
  r.registers_peak = std::max(r.registers_peak, tail.registers_peak);
  return r;
}

CostReport predict(const std::string& algorithm, double n, double delta, std::size_t d,
                   const PredictParams& pp) {
  if (algorithm == "refine_uni") return predict_refine_uni(1.0 / n, delta, pp);
  if (algorithm == "constrained_uni") return predict_constrained_uni(n, 1.0 / 3.0, delta, pp);
  if (algorithm == "notso_uni") return predict_notso_uni(n, delta, pp);
  if (algorithm == "constrained_simple")
    return predict_constrained_simple(n, pp.profile.eps0_cap_factor(pp.D), delta, d, pp);
  if (algorithm == "meticulous") return predict_meticulous(n, delta, d, pp);
  if (algorithm == "notso_multi_simple") return predict_notso_multi(n, delta, d, false, pp);
  if (algorithm == "notso_multi_meticulous") return predict_notso_multi(n, delta, d, true, pp);
  if (algorithm == "full_simple") return predict_full(n, delta, d, false, pp);
  if (algorithm == "full_meticulous") return predict_full(n, delta, d, true, pp);
  fail_precondition("predict: unknown algorithm id '" + algorithm + "'");
}

}  // namespace qmve
