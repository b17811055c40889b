#include "qmve/prob.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qmve {

FiniteDist::FiniteDist(std::vector<double> probs,
                       std::vector<std::vector<double>> values)
    : probs_(std::move(probs)), values_(std::move(values)) {
  if (probs_.empty()) fail_precondition("FiniteDist: outcome count must be >= 1");
  if (probs_.size() != values_.size())
    fail_precondition("FiniteDist: probability/value count mismatch");
  dim_ = values_[0].size();
  if (dim_ < 1) fail_precondition("FiniteDist: dimension must be >= 1");
  double total = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!(probs_[k] >= 0.0))
      fail_precondition("FiniteDist: negative probability at outcome " + std::to_string(k));
    if (values_[k].size() != dim_)
      fail_precondition("FiniteDist: dimension mismatch at outcome " + std::to_string(k));
    total += probs_[k];
  }
  if (std::fabs(total - 1.0) > kTolAlgebra)
    fail_precondition("FiniteDist: probabilities sum to " + std::to_string(total));
}

std::vector<double> FiniteDist::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (std::size_t k = 0; k < size(); ++k)
    for (std::size_t a = 0; a < dim_; ++a) m[a] += probs_[k] * values_[k][a];
  return m;
}

FiniteDist FiniteDist::shift_scale(const std::vector<double>& shift, double scale) const {
  if (shift.size() != dim_) fail_precondition("shift_scale: dimension mismatch");
  if (scale == 0.0) fail_precondition("shift_scale: zero scale");
  auto vals = values_;
  for (auto& v : vals)
    for (std::size_t a = 0; a < dim_; ++a) v[a] = (v[a] - shift[a]) / scale;
  return FiniteDist(probs_, std::move(vals));
}

FiniteDist FiniteDist::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail_io(std::string("distribution JSON parse error: ") + e.what());
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer())
    fail_io("distribution JSON: missing integer field 'dim'");
  if (!j.contains("outcomes") || !j["outcomes"].is_array())
    fail_io("distribution JSON: missing array field 'outcomes'");
  std::size_t dim = j["dim"].get<std::size_t>();
  std::vector<double> probs;
  std::vector<std::vector<double>> values;
  std::size_t k = 0;
  for (const auto& o : j["outcomes"]) {
    if (!o.contains("p") || !o["p"].is_number())
      fail_io("distribution JSON: outcome " + std::to_string(k) + " missing 'p'");
    if (!o.contains("x") || !o["x"].is_array())
      fail_io("distribution JSON: outcome " + std::to_string(k) + " missing 'x'");
    double p = o["p"].get<double>();
    if (p < 0.0)
      fail_io("distribution JSON: outcome " + std::to_string(k) + " has p < 0");
    std::vector<double> x = o["x"].get<std::vector<double>>();
    if (x.size() != dim)
      fail_io("distribution JSON: outcome " + std::to_string(k) +
              " has dimension " + std::to_string(x.size()) + ", expected " +
              std::to_string(dim));
    probs.push_back(p);
    values.push_back(std::move(x));
    ++k;
  }
  if (probs.empty()) fail_io("distribution JSON: no outcomes");
  double total = 0.0;
  for (double p : probs) total += p;
  if (std::fabs(total - 1.0) > kTolAlgebra)
    fail_io("distribution JSON: probabilities sum to " + std::to_string(total) +
            ", expected 1 within 1e-12");
  return FiniteDist(std::move(probs), std::move(values));
}

FiniteDist FiniteDist::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open distribution file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string FiniteDist::to_json_text() const {
  nlohmann::json j;
  j["dim"] = dim_;
  j["outcomes"] = nlohmann::json::array();
  for (std::size_t k = 0; k < size(); ++k)
    j["outcomes"].push_back({{"p", probs_[k]}, {"x", values_[k]}});
  return j.dump(2);
}

UniRv::UniRv(std::vector<double> probs, std::vector<double> values)
    : probs_(std::move(probs)), values_(std::move(values)) {
  if (probs_.empty() || probs_.size() != values_.size())
    fail_precondition("UniRv: bad outcome arrays");
}

UniRv UniRv::shifted(double c) const {
  auto v = values_;
  for (auto& x : v) x += c;
  return UniRv(probs_, std::move(v));
}

UniRv UniRv::scaled(double s) const {
  auto v = values_;
  for (auto& x : v) x *= s;
  return UniRv(probs_, std::move(v));
}

ScalarStats moments(const UniRv& rv) {
  ScalarStats st;
  for (std::size_t k = 0; k < rv.size(); ++k) {
    st.mean += rv.p(k) * rv.x(k);
    st.second_moment += rv.p(k) * rv.x(k) * rv.x(k);
  }
  for (std::size_t k = 0; k < rv.size(); ++k) {
    double d = rv.x(k) - st.mean;
    st.variance += rv.p(k) * d * d;
  }
  return st;
}

CovSummary covariance(const FiniteDist& dist) {
  std::size_t d = dist.dim();
  CovSummary cov;
  cov.dim = d;
  cov.matrix.assign(d * d, 0.0);
  std::vector<double> mu = dist.mean();
  for (std::size_t k = 0; k < dist.size(); ++k) {
    for (std::size_t a = 0; a < d; ++a) {
      double da = dist.value(k)[a] - mu[a];
      for (std::size_t b = 0; b < d; ++b)
        cov.matrix[a * d + b] += dist.p(k) * da * (dist.value(k)[b] - mu[b]);
    }
  }
  for (std::size_t a = 0; a < d; ++a) cov.trace += cov.matrix[a * d + a];
  return cov;
}

UniRv truncate_uni(const UniRv& rv, double K) {
  if (K < 0.0) fail_precondition("truncate_uni: negative threshold");
  std::vector<double> v(rv.size());
  for (std::size_t k = 0; k < rv.size(); ++k) {
    double x = rv.x(k);
    v[k] = x < -K ? -K : (x > K ? K : x);
  }
  return rv.map(v);
}

FiniteDist truncate_multi(const FiniteDist& dist, double K) {
  if (K < 0.0) fail_precondition("truncate_multi: negative threshold");
  auto vals = dist.values();
  for (auto& x : vals) {
    double n2 = 0.0;
    for (double c : x) n2 += c * c;
    if (n2 > K * K) std::fill(x.begin(), x.end(), 0.0);
  }
  return FiniteDist(dist.probs(), std::move(vals));
}

UniRv to_angle(const UniRv& rv, double lambda, double eps) {
  if (!(lambda > 0.0)) fail_precondition("to_angle: lambda must be positive");
  if (!(eps > 0.0)) fail_precondition("to_angle: eps must be positive");
  double K = 1.0 / (lambda * eps);
  UniRv t = truncate_uni(rv, K);
  std::vector<double> v(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) v[k] = 2.0 * std::atan(0.5 * t.x(k));
  return t.map(v);
}

UniRv project_rv(const FiniteDist& dist, const std::vector<double>& u) {
  if (u.size() != dist.dim()) fail_precondition("project_rv: dimension mismatch");
  std::vector<double> v(dist.size(), 0.0);
  for (std::size_t k = 0; k < dist.size(); ++k)
    for (std::size_t a = 0; a < dist.dim(); ++a) v[k] += u[a] * dist.value(k)[a];
  return UniRv(dist.probs(), std::move(v));
}

UniRv coordinate_rv(const FiniteDist& dist, std::size_t axis) {
  if (axis >= dist.dim()) fail_precondition("coordinate_rv: axis out of range");
  std::vector<double> v(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) v[k] = dist.value(k)[axis];
  return UniRv(dist.probs(), std::move(v));
}

}  // namespace qmve
