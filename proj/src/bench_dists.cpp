#include "qmve/bench_dists.hpp"

#include <cmath>

namespace qmve {

namespace {

FiniteDist uni(std::vector<double> p, std::vector<double> x) {
  std::vector<std::vector<double>> vals;
  vals.reserve(x.size());
  for (double v : x) vals.push_back({v});
  return FiniteDist(std::move(p), std::move(vals));
}

FiniteDist gauss3d() {
  std::vector<double> p;
  std::vector<std::vector<double>> x;
  double total = 0.0;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        double r2 = static_cast<double>(i * i + j * j + k * k);
        double w = std::exp(-r2 / 0.9);
        p.push_back(w);
        x.push_back({0.3 * i + 0.05, 0.3 * j - 0.02, 0.3 * k});
        total += w;
      }
  for (auto& w : p) w /= total;
  // renormalize exactly against rounding drift
  double s = 0.0;
  for (double w : p) s += w;
  p.back() += 1.0 - s;
  return FiniteDist(std::move(p), std::move(x));
}

}  // namespace

FiniteDist bench_dist(const std::string& name) {
  if (name == "uni_skew5")
    return uni({0.30, 0.25, 0.20, 0.15, 0.10}, {0.15, 0.30, 0.45, 0.60, 0.75});
  if (name == "uni_wide8")
    return uni({0.05, 0.10, 0.15, 0.20, 0.20, 0.15, 0.10, 0.05},
               {-0.80, -0.50, -0.20, 0.00, 0.20, 0.40, 0.70, 1.00});
  if (name == "uni_shift2")
    return uni({0.85, 0.15}, {5.085, 4.54});
  if (name == "multi_d2_o6")
    return FiniteDist({0.20, 0.20, 0.15, 0.15, 0.15, 0.15},
                      {{0.28, 0.07},
                       {-0.05, -0.17},
                       {0.22, -0.02},
                       {-0.08, 0.04},
                       {0.15, -0.14},
                       {0.06, -0.08}});
  if (name == "multi_d2_o4")
    return FiniteDist({0.30, 0.30, 0.20, 0.20},
                      {{0.20, 0.10}, {-0.10, -0.05}, {0.15, -0.12}, {-0.02, 0.09}});
  if (name == "multi_d2_iso")
    return FiniteDist({0.25, 0.25, 0.25, 0.25},
                      {{0.21, 0.01}, {-0.19, -0.01}, {0.02, 0.20}, {-0.04, -0.18}});
  if (name == "multi_d3_gauss") return gauss3d();
  fail_io("unknown bench distribution '" + name + "'");
}

std::vector<std::string> bench_dist_names() {
  return {"uni_skew5",   "uni_wide8",   "uni_shift2",   "multi_d2_o6",
          "multi_d2_o4", "multi_d2_iso", "multi_d3_gauss"};
}

}  // namespace qmve
