#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmve/ledger.hpp"
#include "qmve/prob.hpp"
#include "qmve/profile.hpp"
#include "qmve/statevector.hpp"
#include "qmve/uni_estimator.hpp"

namespace qmve {

struct MultiParams {
  std::uint64_t grover_charge = 2;
  double D = 2.0;            // trace-tail constant (gated, not derived)
  double C = 0.5;            // quantile sandwich constant
  ScaleProfile profile = ScaleProfile::paper();
  bool enforce_preconditions = true;
  std::size_t v_channel_samples = 32;  // empirical V resolution
};

struct StageCertificate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

struct MultiEstimateReport {
  std::vector<double> estimate;
  CostReport cost;
  std::uint64_t seed = 0;
  std::vector<StageCertificate> certificates;
  std::uint64_t classical_sim_draws = 0;  // quantile simulation bookkeeping
};

// Exhaustive check of the trace-to-directional-variance tail over a lattice:
// P_{u~G}[ u^T Sigma u >= t ] <= 2 exp(-t / (D tr Sigma)) at every achieved
// level t.
struct TailCheckResult {
  std::vector<double> t_grid;
  std::vector<double> empirical;
  std::vector<double> bound;
  double D = 0.0;
  bool ok = true;
  double worst_t = 0.0;
  std::size_t worst_u = 0;  // lattice site index of the worst violator
};

TailCheckResult variance_tail_check(const FiniteDist& dist, const LatticeSpec& lat, double D);

// One multivariate refinement round: multidimensional phase estimation on the
// controlled Grover operator of <u, X> angles, coordinate-wise medians.
MultiEstimateReport refine_multi(const FiniteDist& dist, double eps, double delta,
                                 std::uint64_t seed, const MultiParams& params = {});

// Geometric ladder of refinement rounds rescaled by K sigma0; lands within
// sigma0 / n in sup norm.
MultiEstimateReport constrained_simple(const FiniteDist& dist, double n, double sigma0,
                                       double eps0, double delta, std::uint64_t seed,
                                       const MultiParams& params = {});

enum class VMode { Empirical, IdealPhase };

// The modeled approximate phase unitary built from the quantized univariate
// estimator: coherent amplitude toward e^{i N mu} plus junk mass, with the
// deviation certificate of the quantization bound.
struct VChannel {
  VMode mode = VMode::IdealPhase;
  std::uint64_t N = 0;
  double xi = 0.0;
  double mu = 0.0;               // exact E X of the fed variable
  Complex coherent;              // amplitude on the ideal branch
  double junk = 0.0;             // orthogonal mass, 1 - |coherent|^2 kept exact
  std::vector<double> q;         // empirical outcome weights
  std::vector<double> y;         // empirical outcome values
  double deviation_sq = 0.0;     // sum q_j |e^{iNy_j} - e^{iN mu}|^2
  double deviation_bound = 0.0;  // 4 delta_v + (N sigma0 / n_v)^2
  bool ok = true;
};

VChannel build_v_channel(const UniRv& rv, std::uint64_t N, double sigma0, double eps0,
                         double xi, VMode mode, std::uint64_t seed,
                         const MultiParams& params = {});

// Single-shot multivariate estimator running multidimensional phase
// estimation with the V channel per lattice point (junk branches modeled
// orthogonal across points).
MultiEstimateReport constrained_meticulous(const FiniteDist& dist, double n, double sigma0,
                                           double delta, VMode mode, std::uint64_t seed,
                                           const MultiParams& params = {});

// Geometric median of bucket means (Weiszfeld to 1e-10).
MultiEstimateReport classical_multi(const FiniteDist& dist, std::uint64_t n, double delta,
                                    std::uint64_t seed);

// Simulated quantile primitive: order statistic of ceil(64 ln(1/delta)/p)
// draws, sandwiched in [Q(p), Q(C p)]; the ledger charges the sqrt(p) quantum
// formula and the classical simulation count is reported separately.
struct QuantileResult {
  double value = 0.0;
  std::uint64_t quantum_charge = 0;
  std::uint64_t classical_draws = 0;
};

QuantileResult quantile_estimate(const UniRv& rv, double p, double delta, std::uint64_t seed);

// Classical kickstart then the constrained estimator on the recentered
// variable; needs tr Sigma <= sigma0^2 only.
MultiEstimateReport notso_multi(const FiniteDist& dist, double n, double sigma0, double delta,
                                bool meticulous, std::uint64_t seed,
                                const MultiParams& params = {});

// The untuned pipeline: classical kickstart, quantile truncation scale,
// relative-accuracy second moment, constrained tail estimator.  No prior
// bounds on the distribution are required.
MultiEstimateReport full_estimator(const FiniteDist& dist, double n, double delta,
                                   bool meticulous, std::uint64_t seed,
                                   const MultiParams& params = {});

// Exact quantile of a finite scalar variable: sup{ y : P[X >= y] >= p }.
double exact_quantile(const UniRv& rv, double p);

}  // namespace qmve
