#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qmve {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Tolerance policy: algebraic identities at 1e-12, norm/PSD checks at 1e-10,
// eigen-residuals at 1e-9.
inline constexpr double kTolAlgebra = 1e-12;
inline constexpr double kTolNorm = 1e-10;
inline constexpr double kTolResidual = 1e-9;

// Total state dimension cap for dense simulation (amplitude count).
inline constexpr std::size_t kAmplitudeCap = std::size_t{1} << 22;

enum class ErrorCategory { Precondition, Cap, Certificate, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), category_(cat) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail_precondition(const std::string& msg) {
  throw Error(ErrorCategory::Precondition, msg);
}
[[noreturn]] inline void fail_cap(const std::string& msg) {
  throw Error(ErrorCategory::Cap, msg);
}
[[noreturn]] inline void fail_certificate(const std::string& msg) {
  throw Error(ErrorCategory::Certificate, msg);
}
[[noreturn]] inline void fail_io(const std::string& msg) {
  throw Error(ErrorCategory::Io, msg);
}

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Precondition: return "precondition";
    case ErrorCategory::Cap: return "cap";
    case ErrorCategory::Certificate: return "certificate-failure";
    case ErrorCategory::Io: return "io";
  }
  return "unknown";
}

inline bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Wrap a phase into (-pi, pi].
inline double wrap_phase(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Circular distance |a - b| mod 2pi, in [0, pi].
inline double circ_dist(double a, double b) {
  double d = std::fabs(wrap_phase(a - b));
  return d;
}

std::size_t thread_count();

// Deterministic parallel map over [0, n): partitioning depends only on n and
// the worker count, and workers write disjoint outputs, so results never
// depend on scheduling order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::size_t workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  workers = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::size_t thread_count_impl() {
  if (const char* env = std::getenv("QMVE_THREADS")) {
    long v = std::atol(env);
    if (v >= 1) return static_cast<std::size_t>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

inline std::size_t thread_count() {
  static const std::size_t n = thread_count_impl();
  return n;
}

}  // namespace qmve
