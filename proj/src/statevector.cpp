#include "qmve/statevector.hpp"

#include <cmath>

namespace qmve {

StateVector::StateVector(std::vector<RegisterSpec> layout, std::vector<Complex> amps)
    : layout_(std::move(layout)), amps_(std::move(amps)) {
  std::size_t dim = 1;
  for (const auto& r : layout_) {
    if (r.size == 0) fail_precondition("StateVector: empty register");
    if (dim > kAmplitudeCap / r.size)
      fail_cap("StateVector: dimension " + std::to_string(dim) + " * " +
               std::to_string(r.size) + " exceeds amplitude cap 2^22");
    dim *= r.size;
  }
  if (dim != amps_.size())
    fail_precondition("StateVector: amplitude count " + std::to_string(amps_.size()) +
                      " does not match layout dimension " + std::to_string(dim));
}

StateVector StateVector::basis(std::vector<RegisterSpec> layout, std::size_t index) {
  std::size_t dim = 1;
  for (const auto& r : layout) dim *= r.size;
  std::vector<Complex> amps(dim, Complex(0.0, 0.0));
  amps.at(index) = Complex(1.0, 0.0);
  return StateVector(std::move(layout), std::move(amps));
}

double StateVector::norm() const {
  double n2 = 0.0;
  for (const auto& a : amps_) n2 += std::norm(a);
  return std::sqrt(n2);
}

void StateVector::check_norm() const {
  if (std::fabs(norm() - 1.0) > kTolNorm)
    fail_precondition("StateVector: norm " + std::to_string(norm()) + " is not 1");
}

bool StateVector::same_layout(const StateVector& other) const {
  if (layout_.size() != other.layout_.size()) return false;
  for (std::size_t i = 0; i < layout_.size(); ++i)
    if (layout_[i].kind != other.layout_[i].kind || layout_[i].size != other.layout_[i].size)
      return false;
  return true;
}

std::size_t StateVector::stride(std::size_t r) const {
  std::size_t s = 1;
  for (std::size_t i = layout_.size(); i-- > r + 1;) s *= layout_[i].size;
  return s;
}

std::vector<std::size_t> MeasurementDistribution::decode(std::size_t linear) const {
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    idx[i] = linear % sizes[i];
    linear /= sizes[i];
  }
  return idx;
}

StateVector uniform_lattice_state(const LatticeSpec& lat, const std::vector<Complex>& outcome_init) {
  double n2 = 0.0;
  for (const auto& a : outcome_init) n2 += std::norm(a);
  if (std::fabs(n2 - 1.0) > kTolNorm)
    fail_precondition("uniform_lattice_state: outcome register state not normalized");
  std::size_t sites = lat.site_count();
  std::size_t omega = outcome_init.size();
  if (sites > kAmplitudeCap / omega)
    fail_cap("uniform_lattice_state: total dimension exceeds amplitude cap");
  std::vector<RegisterSpec> layout;
  for (std::size_t a = 0; a < lat.dim; ++a)
    layout.push_back({RegisterKind::LatticeAxis, lat.resolution});
  layout.push_back({RegisterKind::Outcome, omega});
  std::vector<Complex> amps(sites * omega);
  double scale = 1.0 / std::sqrt(static_cast<double>(sites));
  for (std::size_t s = 0; s < sites; ++s)
    for (std::size_t k = 0; k < omega; ++k) amps[s * omega + k] = scale * outcome_init[k];
  return StateVector(std::move(layout), std::move(amps));
}

namespace {

void check_unitary(const Eigen::MatrixXcd& m, const std::vector<double>& u) {
  Eigen::MatrixXcd gram = m.adjoint() * m;
  double err = (gram - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  if (err > kTolNorm) {
    std::string where = "(";
    for (std::size_t i = 0; i < u.size(); ++i)
      where += (i ? "," : "") + std::to_string(u[i]);
    where += ")";
    fail_precondition("apply_per_lattice_unitary: non-unitary member at u=" + where +
                      ", deviation " + std::to_string(err));
  }
}

}  // namespace

StateVector apply_per_lattice_unitary(const StateVector& state, const UnitaryFamily& family,
                                      std::uint64_t power) {
  std::size_t axes = 0;
  for (const auto& r : state.layout())
    if (r.kind == RegisterKind::LatticeAxis) ++axes;
  if (axes == 0) fail_precondition("apply_per_lattice_unitary: no lattice axes present");
  // layout is [axes..., outcome]: outcome register must be last and lattice first
  std::size_t omega = state.layout().back().size;
  if (state.layout().back().kind != RegisterKind::Outcome)
    fail_precondition("apply_per_lattice_unitary: outcome register must be last");
  std::size_t N = state.layout()[0].size;
  LatticeSpec lat(axes, N);
  std::size_t sites = state.dimension() / omega;

  StateVector out = state;
  std::vector<Complex>& amps = out.amplitudes();
  parallel_for(sites, [&](std::size_t s) {
    Eigen::MatrixXcd m = family(lat.site(s));
    if (static_cast<std::size_t>(m.rows()) != omega || static_cast<std::size_t>(m.cols()) != omega)
      fail_precondition("apply_per_lattice_unitary: family member has wrong dimension");
    check_unitary(m, lat.site(s));
    Eigen::VectorXcd block(omega);
    for (std::size_t k = 0; k < omega; ++k) block(k) = amps[s * omega + k];
    for (std::uint64_t p = 0; p < power; ++p) block = m * block;
    for (std::size_t k = 0; k < omega; ++k) amps[s * omega + k] = block(k);
  });
  return out;
}

MeasurementDistribution measure_distribution(const StateVector& state,
                                             const std::vector<std::size_t>& registers) {
  if (registers.empty()) fail_precondition("measure_distribution: empty register subset");
  MeasurementDistribution dist;
  dist.registers = registers;
  std::size_t table = 1;
  for (std::size_t r : registers) {
    if (r >= state.register_count())
      fail_precondition("measure_distribution: register index out of range");
    dist.sizes.push_back(state.register_size(r));
    table *= state.register_size(r);
  }
  dist.probs.assign(table, 0.0);

  std::vector<std::size_t> strides(registers.size());
  for (std::size_t i = 0; i < registers.size(); ++i) strides[i] = state.stride(registers[i]);

  const auto& amps = state.amplitudes();
  for (std::size_t idx = 0; idx < amps.size(); ++idx) {
    double w = std::norm(amps[idx]);
    if (w == 0.0) continue;
    std::size_t key = 0;
    for (std::size_t i = 0; i < registers.size(); ++i) {
      std::size_t digit = (idx / strides[i]) % dist.sizes[i];
      key = key * dist.sizes[i] + digit;
    }
    dist.probs[key] += w;
  }
  return dist;
}

std::vector<std::size_t> sample(const MeasurementDistribution& dist, std::uint64_t seed,
                                std::size_t trials) {
  if (trials < 1) fail_precondition("sample: trials must be >= 1");
  TableSampler sampler(dist.probs);
  Rng rng(seed);
  std::vector<std::size_t> draws(trials);
  for (std::size_t t = 0; t < trials; ++t) draws[t] = sampler.draw(rng);
  return draws;
}

double state_distance(const StateVector& a, const StateVector& b) {
  if (!a.same_layout(b)) fail_precondition("state_distance: layout mismatch");
  double n2 = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i)
    n2 += std::norm(a.amplitudes()[i] - b.amplitudes()[i]);
  return std::sqrt(n2);
}

}  // namespace qmve
