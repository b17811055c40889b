#pragma once

#include <cmath>
#include <string>

#include "qmve/common.hpp"

namespace qmve {

// Structural constants of the multivariate estimator family.  The three base
// numbers pin everything downstream:
//
//   base      variance budget denominator (the "120" in K = 120 d^{1/4} ...)
//   hoeff     lattice mean-tail level (the "2.5" in the 2.5 sqrt(d) eps step)
//   tail_exp  exponent in the trace-tail gate (the "10" in sqrt(10 D))
//
// "paper" is the full-strength profile.  Its constants force phase-estimation
// resolutions around 2^16 per axis for d = 2, i.e. lattices beyond the 2^22
// amplitude cap, so end-to-end d >= 2 runs of the simple estimator use the
// reduced "desk" profile: same formulas, same code path, smaller constants,
// with the statistical guarantee validated by the seeded Monte Carlo suites
// instead of the worst-case constants.
struct ScaleProfile {
  std::string name = "paper";
  double base = 120.0;
  double hoeff = 2.5;
  double tail_exp = 10.0;

  static ScaleProfile paper() { return ScaleProfile{}; }
  static ScaleProfile desk() { return ScaleProfile{"desk", 1.6, 0.85, 1.0}; }

  double quarter(double d) const { return std::pow(d, 0.25); }

  // K in the constrained simple estimator: rescale by K * sigma0
  double simple_scale(double d, double D) const {
    return base * quarter(d) * std::sqrt(tail_exp * D);
  }
  // second-moment budget fed to the Grover construction per lattice direction
  double grover_s0(double d) const { return std::sqrt(10.0) / (3.0 * base * quarter(d)); }
  // accuracy cap of the multivariate refinement step
  double refine_eps_cap(double d) const { return 1.0 / (3.0 * hoeff * base * quarter(d)); }
  // mean bound cap: eps0 <= eps0_cap_factor * sigma0
  double eps0_cap_factor(double D) const { return std::sqrt(tail_exp * D) / (3.0 * hoeff); }
  // K in the meticulous estimator: rescale by met_scale * sigma0
  double met_scale(double D) const { return std::sqrt(tail_exp * D); }

  std::uint64_t refine_resolution(double eps) const {
    return resolution_for(16.0 * kPi / eps);
  }
  std::uint64_t met_resolution(double n, double D) const {
    return resolution_for(8.0 * kPi * n * std::sqrt(tail_exp * D));
  }

  static std::uint64_t resolution_for(double target) {
    if (!(target > 0.0)) fail_precondition("resolution_for: nonpositive target");
    double l = std::ceil(std::log2(target));
    return std::uint64_t{1} << static_cast<unsigned>(std::max(1.0, l));
  }
};

// Univariate resolution N = 2^ceil(log2(24 pi / eps)).
inline std::uint64_t uni_resolution(double eps) {
  return ScaleProfile::resolution_for(24.0 * kPi / eps);
}

}  // namespace qmve
