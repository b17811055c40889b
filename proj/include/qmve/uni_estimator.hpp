#pragma once

#include <cstdint>
#include <optional>

#include "qmve/ledger.hpp"
#include "qmve/prob.hpp"
#include "qmve/profile.hpp"
#include "qmve/rng.hpp"

namespace qmve {

struct EstimateReport {
  double estimate = 0.0;
  CostReport cost;
  std::uint64_t seed = 0;

  std::uint64_t oracle_calls() const { return cost.experiment_accesses; }
  std::uint64_t pe_invocations() const { return cost.pe_invocations; }
  std::uint64_t registers_peak() const { return cost.registers_peak; }
};

struct UniParams {
  std::uint64_t grover_charge = 2;
  bool enforce_preconditions = true;
};

// One refinement step: phase estimation on the Grover operator of
// 2 atan(trunc(X, 1/(lambda eps)) / 2), median over the boosted repetitions.
// Needs eps <= 1/12, |E X| <= eps, Var X <= 1/16.
EstimateReport refine_uni(const UniRv& rv, double eps, double delta, std::uint64_t seed,
                          const UniParams& params = {});

// Geometric accuracy ladder of refinement steps on (X - running) / (4 sigma0)
// with the log-log confidence split.  Needs Var X <= sigma0^2 and
// |E X| <= eps0 <= sigma0 / 3; lands within sigma0 / n.
EstimateReport constrained_uni(const UniRv& rv, double sigma0, double eps0, double n,
                               double delta, std::uint64_t seed, const UniParams& params = {});

// Classical kickstart at (9, delta/2) followed by the constrained ladder on
// the recentered variable.  Needs Var X <= sigma0^2 only.
EstimateReport notso_uni(const UniRv& rv, double sigma0, double n, double delta,
                         std::uint64_t seed, const UniParams& params = {});

// Classical median of means over i.i.d. draws (bucket size 4n).
EstimateReport median_of_means(const UniRv& rv, std::uint64_t n, double delta,
                               std::uint64_t seed);

// Relative-accuracy mean estimate for a variable with values in [0, 1]:
// |estimate - E X| <= sqrt(E X)/n + (4/3)/n^2 with probability 1 - delta.
// Two-stage: a coarse absolute pass at accuracy 1/(4 n^2) pins the variance
// bound sigma0^2 = min(1, coarse + 1.5/n^2) (valid since Var X <= E X on
// [0,1]), then the main pass runs at that scale.
EstimateReport bounded_rel_estimator(const UniRv& rv, double n, double delta,
                                     std::uint64_t seed, const UniParams& params = {});

}  // namespace qmve
