#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "qmve/common.hpp"
#include "qmve/prob.hpp"

namespace qmve {

// Dense Grover operator for an angle variable theta:
//   G = (2|1><1| - I) diag(e^{i theta_k}),  |1> = sum_k sqrt(p_k) |k>.
// Spectrum analysis is a verification tool; construction is capped at 64
// outcomes.
struct GroverOperator {
  UniRv theta;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd ket_one;
};

GroverOperator build_grover(const UniRv& theta);

// An eigenpair in random-variable form: the state is sum_k sqrt(p_k) psi_k |k>.
struct SpectralSolution {
  double alpha = 0.0;              // eigenphase in (-pi, pi]
  std::vector<Complex> psi;        // one value per outcome, E|psi|^2 = 1
  double overlap = 0.0;            // |<psi|1>|^2
  bool degenerate = false;
};

struct SpectrumCertificate {
  double eps = 0.0;       // mean bound fed in
  double s0 = 0.0;        // second-moment bound fed in
  double lambda = 0.0;    // truncation scale 5 / (4 - 5 s0^2)
  double c = 0.0;         // proximity constant used for the bracket
  double delta = 0.0;     // overlap deficit bound
  double alpha_error = 0.0;
  double alpha_error_bound = 0.0;
  double overlap = 0.0;
  double overlap_lower_bound = 0.0;
  bool alpha_ok = false;
  bool overlap_ok = false;
  bool ok() const { return alpha_ok && overlap_ok; }
};

// Root of E[tan((theta - alpha)/2)] = 0 inside the bracket, found by
// bisection to 1e-12 phase tolerance (the function is non-increasing there).
// Errors if a pole (theta_k - beta = pi mod 2pi with p_k > 0) sits inside the
// bracket or if the endpoint signs do not change.
double solve_alpha(const UniRv& theta, double lo, double hi);

SpectralSolution eigvec_for_alpha(const UniRv& theta, double alpha);

// Appendix-style degenerate branches: for each value class of theta (mod
// 2pi, tolerance 1e-9) with multiplicity m >= 2, the eigenphase value - pi
// carries an (m-1)-dimensional eigenspace orthogonal to |1>.  Outcomes with
// zero probability each contribute their own branch.
std::vector<SpectralSolution> degenerate_spectrum(const UniRv& theta);

// Simple (root-found) branches plus degenerate branches; on small instances
// this reproduces the full dense eigendecomposition.
std::vector<SpectralSolution> full_spectrum(const UniRv& theta);

// Eigen-residual ||G psi - e^{i alpha} psi|| for a solution.
double eigen_residual(const GroverOperator& op, const SpectralSolution& sol);

struct CertifyResult {
  SpectrumCertificate certificate;
  SpectralSolution solution;
};

// Packaged spectrum certificate: for |E X| <= eps, E X^2 <= s0^2,
// eps <= s0 <= 1/3, the Grover operator on 2 atan(trunc(X, 1/(lambda eps))/2)
// with lambda = 5/(4 - 5 s0^2) has an eigenphase within
// 3.1588 s0^2 eps / (1 - 1.25 s0^2) of E X and overlap at least
// 1 - (1.7983 s0^2 + 7.480 s0 eps / (1 - 1.25 s0^2)) / 4.
CertifyResult certify_key_property(const UniRv& rv, double eps, double s0);

struct DistanceBoundResult {
  double lhs = 0.0;  // || G^N |1> - e^{i N E X} |1> ||^2, dense
  double rhs = 0.0;
  bool ok() const { return lhs <= rhs; }
};

DistanceBoundResult state_distance_bound_check(const UniRv& rv, double eps, double s0,
                                               std::uint64_t N);

}  // namespace qmve
