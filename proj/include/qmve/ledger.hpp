#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qmve/common.hpp"
#include "qmve/profile.hpp"

namespace qmve {

// Accounting for the two modeled complexity measures: accesses to the quantum
// experiment (a Grover step costs `grover_charge`, experiment plus inverse)
// and peak entangled experiment registers.  All counts are closed-form in the
// run parameters; predict() and the estimators share the same helpers so the
// equality `predicted == measured` is exact.
struct StageCost {
  std::string stage;
  std::uint64_t experiment_accesses = 0;
  std::uint64_t pe_invocations = 0;
};

struct CostReport {
  std::uint64_t experiment_accesses = 0;
  std::uint64_t pe_invocations = 0;
  std::uint64_t registers_peak = 1;
  std::vector<StageCost> stages;

  void add(const std::string& stage, std::uint64_t accesses, std::uint64_t pe = 0);
  void merge(const std::string& prefix, const CostReport& other);
};

class CostLedger {
 public:
  explicit CostLedger(std::uint64_t grover_charge = 2) : charge_(grover_charge) {}

  void charge(const std::string& stage, std::uint64_t amount, std::uint64_t pe = 0);
  void charge_grover_steps(const std::string& stage, std::uint64_t steps, std::uint64_t pe = 0) {
    charge(stage, steps * charge_, pe);
  }
  void set_registers_peak(std::uint64_t regs) { report_.registers_peak = regs; }
  void absorb(const std::string& prefix, const CostReport& other) { report_.merge(prefix, other); }

  std::uint64_t grover_charge() const { return charge_; }
  const CostReport& report() const { return report_; }

 private:
  std::uint64_t charge_;
  CostReport report_;
};

struct PredictParams {
  std::uint64_t grover_charge = 2;
  double D = 2.0;
  double C = 0.5;
  ScaleProfile profile = ScaleProfile::paper();
};

CostReport predict_refine_uni(double eps, double delta, const PredictParams& pp);
CostReport predict_constrained_uni(double n, double eps0_ratio, double delta,
                                   const PredictParams& pp);
CostReport predict_notso_uni(double n, double delta, const PredictParams& pp);
CostReport predict_median_of_means(std::uint64_t n, double delta);
CostReport predict_classical_multi(std::uint64_t n, double delta);
CostReport predict_bounded_rel(double n, double delta, const PredictParams& pp);
CostReport predict_quantile(double p, double delta);
CostReport predict_refine_multi(double eps, double delta, std::size_t d,
                                const PredictParams& pp);
CostReport predict_constrained_simple(double n, double eps0_ratio, double delta, std::size_t d,
                                      const PredictParams& pp);
CostReport predict_meticulous(double n, double delta, std::size_t d, const PredictParams& pp);
CostReport predict_notso_multi(double n, double delta, std::size_t d, bool meticulous,
                               const PredictParams& pp);
CostReport predict_full(double n, double delta, std::size_t d, bool meticulous,
                        const PredictParams& pp);

// Named algorithm dispatch for the CLI and sweep tests.
CostReport predict(const std::string& algorithm, double n, double delta, std::size_t d,
                   const PredictParams& pp);

// Shared closed-form pieces.
std::uint64_t mom_draw_count(std::uint64_t n, double delta);       // univariate median of means
std::uint64_t classical_multi_draw_count(std::uint64_t n, double delta);
std::uint64_t quantile_draw_count(double p, double delta);         // classical simulation cost
std::uint64_t quantile_quantum_charge(double p, double delta);     // what the ledger charges
std::uint64_t notso_multi_kickstart_n(double delta, double D, const ScaleProfile& profile);
std::uint64_t full_kickstart_n(double delta);

// Meticulous V-subroutine inner parameters (xi = 1/13).
struct VParams {
  double n_inner = 0.0;
  double delta_inner = 0.0;
  static VParams from(std::uint64_t N, double sigma0, double xi);
};

}  // namespace qmve
