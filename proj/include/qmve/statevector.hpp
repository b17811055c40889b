#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qmve/common.hpp"
#include "qmve/rng.hpp"

namespace qmve {

// Hypercubic lattice: d axes of N centered coordinates
// u_j = j/N - 1/2 + 1/(2N), j = 0..N-1.  N is a power of two, so every
// coordinate is an exact dyadic rational; the per-axis sum is exactly zero.
struct LatticeSpec {
  std::size_t dim = 1;
  std::size_t resolution = 2;

  LatticeSpec(std::size_t d, std::size_t N) : dim(d), resolution(N) {
    if (d < 1) fail_precondition("LatticeSpec: dimension must be >= 1");
    if (!is_power_of_two(N)) fail_precondition("LatticeSpec: resolution must be a power of two");
  }

  double coordinate(std::size_t j) const {
    return (2.0 * static_cast<double>(j) + 1.0 - static_cast<double>(resolution)) /
           (2.0 * static_cast<double>(resolution));
  }

  std::size_t site_count() const {
    std::size_t n = 1;
    for (std::size_t a = 0; a < dim; ++a) {
      if (n > kAmplitudeCap / resolution)
        fail_cap("LatticeSpec: site count exceeds amplitude cap");
      n *= resolution;
    }
    return n;
  }

  // decode row-major site index into coordinates
  std::vector<double> site(std::size_t linear) const {
    std::vector<double> u(dim);
    for (std::size_t a = dim; a-- > 0;) {
      u[a] = coordinate(linear % resolution);
      linear /= resolution;
    }
    return u;
  }
};

enum class RegisterKind { LatticeAxis, Outcome, Junk };

struct RegisterSpec {
  RegisterKind kind;
  std::size_t size;
};

// Dense complex statevector over an ordered register list (row-major, first
// register slowest).  Mutating operations are member-free; the free functions
// below return new states or mutate an exclusively owned one.
class StateVector {
 public:
  StateVector(std::vector<RegisterSpec> layout, std::vector<Complex> amps);

  static StateVector basis(std::vector<RegisterSpec> layout, std::size_t index);

  const std::vector<RegisterSpec>& layout() const { return layout_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  std::vector<Complex>& amplitudes() { return amps_; }
  std::size_t dimension() const { return amps_.size(); }

  double norm() const;
  void check_norm() const;
  bool same_layout(const StateVector& other) const;

  std::size_t register_count() const { return layout_.size(); }
  std::size_t register_size(std::size_t r) const { return layout_[r].size; }

  // stride of register r in the row-major flattening
  std::size_t stride(std::size_t r) const;

 private:
  std::vector<RegisterSpec> layout_;
  std::vector<Complex> amps_;
};

struct MeasurementDistribution {
  std::vector<std::size_t> registers;    // measured register positions
  std::vector<std::size_t> sizes;        // their sizes, same order
  std::vector<double> probs;             // row-major over the measured subset

  std::size_t table_size() const { return probs.size(); }
  std::vector<std::size_t> decode(std::size_t linear) const;
};

// (1/N^{d/2}) sum_u |u> (x) |outcome_init>; outcome_init must be normalized.
StateVector uniform_lattice_state(const LatticeSpec& lat, const std::vector<Complex>& outcome_init);

// Block-diagonal action: the outcome-register block at lattice site u is
// multiplied by family(u)^power.  Each family member is checked for
// unitarity (dense check, outcome register is capped at 64 anyway).
using UnitaryFamily = std::function<Eigen::MatrixXcd(const std::vector<double>& u)>;
StateVector apply_per_lattice_unitary(const StateVector& state, const UnitaryFamily& family,
                                      std::uint64_t power);

MeasurementDistribution measure_distribution(const StateVector& state,
                                             const std::vector<std::size_t>& registers);

std::vector<std::size_t> sample(const MeasurementDistribution& dist, std::uint64_t seed,
                                std::size_t trials);

double state_distance(const StateVector& a, const StateVector& b);

}  // namespace qmve
