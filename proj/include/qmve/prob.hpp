#pragma once

#include <string>
#include <vector>

#include "qmve/common.hpp"

namespace qmve {

// Explicit finite probability space with one real vector per outcome.
// Outcomes are addressed by index 0..size()-1.  Immutable after construction;
// all transforms return new objects.
class FiniteDist {
 public:
  FiniteDist(std::vector<double> probs, std::vector<std::vector<double>> values);

  std::size_t size() const { return probs_.size(); }
  std::size_t dim() const { return dim_; }
  double p(std::size_t k) const { return probs_[k]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& value(std::size_t k) const { return values_[k]; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  // mean vector, exact finite sum
  std::vector<double> mean() const;

  // componentwise shift then scale: x -> (x - shift) / scale
  FiniteDist shift_scale(const std::vector<double>& shift, double scale) const;

  static FiniteDist from_json_text(const std::string& text);
  static FiniteDist load_json(const std::string& path);
  std::string to_json_text() const;

 private:
  std::vector<double> probs_;
  std::vector<std::vector<double>> values_;
  std::size_t dim_;
};

struct ScalarStats {
  double mean = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;
};

struct CovSummary {
  std::vector<double> matrix;  // row-major d x d
  std::size_t dim = 0;
  double trace = 0.0;

  double at(std::size_t a, std::size_t b) const { return matrix[a * dim + b]; }
};

// Univariate random variable: a probability space plus one scalar per
// outcome.  Carries its own copy of the weights so algebraic transforms
// compose cheaply.
class UniRv {
 public:
  UniRv(std::vector<double> probs, std::vector<double> values);

  std::size_t size() const { return probs_.size(); }
  double p(std::size_t k) const { return probs_[k]; }
  double x(std::size_t k) const { return values_[k]; }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<double>& values() const { return values_; }

  UniRv map(const std::vector<double>& new_values) const {
    return UniRv(probs_, new_values);
  }
  UniRv shifted(double c) const;
  UniRv scaled(double s) const;

 private:
  std::vector<double> probs_;
  std::vector<double> values_;
};

ScalarStats moments(const UniRv& rv);
CovSummary covariance(const FiniteDist& dist);

// Clamp each value into [-K, K].
UniRv truncate_uni(const UniRv& rv, double K);

// Zero out every outcome vector with euclidean norm above K.
FiniteDist truncate_multi(const FiniteDist& dist, double K);

// theta_k = 2 atan( clamp(X_k, 1/(lambda*eps)) / 2 ); all outputs in (-pi, pi).
UniRv to_angle(const UniRv& rv, double lambda, double eps);

// <u, X>: scalar projection of a multivariate variable.
UniRv project_rv(const FiniteDist& dist, const std::vector<double>& u);

// Coordinate view X^axis.
UniRv coordinate_rv(const FiniteDist& dist, std::size_t axis);

}  // namespace qmve
