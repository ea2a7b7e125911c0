#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fngw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad inputs: shapes, non-histogram weights, non-finite entries, invalid configs.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures inside iterative solvers (pivot caps, lost certificates).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Worker cap for the OpenMP kernels and pairwise loops. Results are identical
// for every thread count; this only bounds the parallelism.
void set_max_threads(int n);
int max_threads();

Vector uniform_weights(int n);

// Deterministic RNG: mt19937_64 with fixed draw algorithms (no dependence on
// the standard library's distribution implementations). All randomness in the
// library flows through caller-supplied 64-bit seeds and this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [lo, hi], inclusive, rejection-sampled (unbiased)
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // standard normal via Box-Muller; second draw of each pair is cached
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fngw
