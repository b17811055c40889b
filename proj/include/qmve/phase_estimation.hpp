#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qmve/common.hpp"
#include "qmve/prob.hpp"
#include "qmve/rng.hpp"
#include "qmve/secular.hpp"
#include "qmve/statevector.hpp"

namespace qmve {

struct PEConfig {
  std::size_t N = 64;   // power-of-two resolution (controlled applications)
  std::size_t kappa = 4;

  PEConfig(std::size_t n, std::size_t k) : N(n), kappa(k) {
    if (!is_power_of_two(n)) fail_precondition("PEConfig: N must be a power of two");
    if (k < 2) fail_precondition("PEConfig: kappa must be >= 2");
  }
};

// Exact outcome table of one phase-estimation register: slot m encodes the
// phase fraction (m - N/2) / N in [-1/2, 1/2).
struct PhaseTable {
  std::size_t N = 0;
  std::vector<double> prob;

  double fraction(std::size_t m) const { return slot_fraction(m, N); }
  double total() const;
  // probability mass within circular fraction distance `window` of `frac`
  double mass_within(double frac, double window) const;
};

struct PEOutcome {
  std::size_t N = 0;
  std::size_t dims = 1;
  std::vector<PhaseTable> axis_marginals;
  std::vector<double> joint;  // row-major over lattice slots (multidim only)

  // i.i.d. draws of the estimate vector (phase fractions per dimension)
  std::vector<std::vector<double>> sample_estimates(std::uint64_t seed,
                                                    std::size_t trials) const;
};

// Textbook phase estimation with N controlled applications of `unitary` on
// `input`; exact outcome distribution, computed from the Schur eigenbasis.
PEOutcome phase_estimate_1d(const Eigen::MatrixXcd& unitary, const Eigen::VectorXcd& input,
                            const PEConfig& cfg);

// Grover-operator specialization used by the estimator stack: the input is
// |1>, so the table needs only the simple spectral branches.
PEOutcome phase_estimate_1d_grover(const UniRv& theta, const PEConfig& cfg);

// O(1)-per-draw exact sampler for the Grover 1-D table (rejection against a
// 1/offset^2 envelope); avoids building O(N) tables inside estimator loops.
class GroverPhaseSampler {
 public:
  GroverPhaseSampler(const UniRv& theta, std::size_t N);
  // phase fraction in [-1/2, 1/2)
  double draw(Rng& rng) const;
  const GroverEigs& eigs() const { return eigs_; }

 private:
  std::size_t N_;
  GroverEigs eigs_;
  std::vector<double> branch_cum_;
};

// Alg-1 style multidimensional phase estimation, dense statevector path.
StateVector multidim_pre_qft_state(const UnitaryFamily& family, const LatticeSpec& lat,
                                   const std::vector<Complex>& outcome_init,
                                   std::uint64_t power);
PEOutcome finish_multidim(const StateVector& pre_qft);
PEOutcome multidim_phase_estimate(const UnitaryFamily& family, const LatticeSpec& lat,
                                  const std::vector<Complex>& outcome_init, std::uint64_t power);

enum class NoiseMode { OrthogonalJunk, PhaseJitter };

// Perturb a state to 2-norm distance eps (exact for orthogonal-junk, within
// 1e-12 for phase-jitter); the orthogonal-junk mode appends a junk register.
StateVector noise_injection(const StateVector& state, double eps, NoiseMode mode,
                            std::uint64_t seed);

}  // namespace qmve
