#include "qmve/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace qmve {

double Schedule::delta_sum() const {
  double s = 0.0;
  for (double d : delta) s += d;
  return s;
}

double Schedule::cost_ratio() const {
  double cost = 0.0;
  for (std::size_t j = 0; j < steps; ++j) cost += (1.0 / eps[j]) * std::log(1.0 / delta[j]);
  double base = (1.0 / eps.back()) * std::log(1.0 / delta_total);
  return cost / base;
}

Schedule schedule_for_eps(std::vector<double> eps_list, double R, double delta) {
  if (eps_list.empty()) fail_precondition("schedule: empty accuracy ladder");
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("schedule: delta must be in (0,1)");
  if (!(R > 1.0)) fail_precondition("schedule: R must exceed 1");
  for (std::size_t j = 1; j < eps_list.size(); ++j)
    if (!(eps_list[j] <= eps_list[j - 1] / R + 1e-15 * eps_list[j - 1]))
      fail_precondition("schedule: accuracy ladder must decay by factor >= R");
  Schedule s;
  s.steps = eps_list.size();
  s.eps = std::move(eps_list);
  s.delta_total = delta;
  s.ratio = R;
  s.delta.resize(s.steps);
  double c = 6.0 / (kPi * kPi);
  for (std::size_t j = 0; j < s.steps; ++j) {
    double back = static_cast<double>(s.steps - j);  // T - j + 1 with 1-based j
    s.delta[j] = c * delta / (back * back);
  }
  return s;
}

Schedule loglog_schedule(double eps0, double eps, double R, double delta) {
  if (!(eps > 0.0 && eps < eps0)) fail_precondition("loglog_schedule: need 0 < eps < eps0");
  std::vector<double> ladder;
  double e = eps0;
  while (e > eps * (1.0 + 1e-12)) {
    ladder.push_back(e);
    e /= R;
  }
  ladder.push_back(eps);
  return schedule_for_eps(std::move(ladder), R, delta);
}

std::uint64_t median_boost_reps(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) fail_precondition("median_boost: delta must be in (0,1)");
  double raw = (18.0 * std::log(1.0 / delta) - 1.0) / 2.0;
  std::int64_t half = static_cast<std::int64_t>(std::ceil(raw));
  if (half < 0) half = 0;
  return 2 * static_cast<std::uint64_t>(half) + 1;
}

double median_of(std::vector<double> values) {
  if (values.empty()) fail_precondition("median_of: empty");
  std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

double median_boost(const std::function<double(Rng&)>& runner, double delta, const Rng& master) {
  std::uint64_t reps = median_boost_reps(delta);
  std::vector<double> vals(reps);
  for (std::uint64_t t = 0; t < reps; ++t) {
    Rng r = master.substream(t);
    vals[t] = runner(r);
  }
  return median_of(std::move(vals));
}

}  // namespace qmve
