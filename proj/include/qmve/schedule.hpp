#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qmve/common.hpp"
#include "qmve/rng.hpp"

namespace qmve {

// Confidence schedule for chained refinement calls: delta'_j =
// (6/pi^2) delta / (T - j + 1)^2, so sum_j delta'_j <= delta while the
// accuracy parameters decay geometrically.
struct Schedule {
  std::size_t steps = 0;
  std::vector<double> eps;    // eps'_j, strictly decreasing by factor >= R
  std::vector<double> delta;  // delta'_j
  double delta_total = 0.0;
  double ratio = 0.0;         // R used to build eps

  double delta_sum() const;
  // [sum_j (1/eps_j) ln(1/delta_j)] / [(1/eps_T) ln(1/delta_total)]
  double cost_ratio() const;
};

// Assign the confidence split to an externally built accuracy ladder.
Schedule schedule_for_eps(std::vector<double> eps_list, double R, double delta);

// Build the geometric ladder eps0 / R^{j-1} down to eps, then assign deltas.
Schedule loglog_schedule(double eps0, double eps, double R, double delta);

// Odd repetition count 2 ceil((18 ln(1/delta) - 1)/2) + 1 that boosts a
// success probability of 2/3 to 1 - delta by taking the median.
std::uint64_t median_boost_reps(double delta);

// Run `runner` the boosted number of times with derived per-trial streams and
// return the median value.
double median_boost(const std::function<double(Rng&)>& runner, double delta, const Rng& master);

double median_of(std::vector<double> values);

}  // namespace qmve
