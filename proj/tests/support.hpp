#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ndopt/types.hpp"

namespace testing {

// Small seeded generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  int label() { return integer(0, 1) ? 1 : -1; }

  ndopt::RatePair rates(double cap = 1.0) { return {uniform(0, cap), uniform(0, cap)}; }

  ndopt::Sample sample(std::uint32_t dim, double scale = 1.0) {
    ndopt::Sample s;
    for (std::uint32_t i = 0; i < dim; ++i) {
      if (integer(0, 3) != 0) s.features.push_back({i, uniform(-scale, scale)});
    }
    s.label = label();
    return s;
  }

  ndopt::LinearModel model(std::size_t dim, double scale = 1.0) {
    std::vector<double> w(dim);
    for (double& x : w) x = uniform(-scale, scale);
    return ndopt::LinearModel(std::move(w), uniform(-scale, scale));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Sample with dense features x (0-based indices) and a label.
inline ndopt::Sample dense(std::vector<double> x, int label) {
  ndopt::Sample s;
  for (std::uint32_t i = 0; i < x.size(); ++i) s.features.push_back({i, x[i]});
  s.label = label;
  return s;
}

}  // namespace testing
