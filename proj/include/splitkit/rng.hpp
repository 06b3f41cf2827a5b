// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_RNG_HPP_
#define SPLITKIT_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "splitkit/vec.hpp"

namespace splitkit {

// Deterministic random source for problem generators. mt19937_64 output is
// fixed by the standard; the gaussian transform is done here by hand because
// std::normal_distribution is implementation-defined and would break the
// same-seed reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() {
    return std::ldexp(static_cast<double>(engine_()), -64);
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one spare value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  Vec gaussian_vec(std::size_t n) {
    Vec out(n);
    for (double& v : out) v = gaussian();
    return out;
  }

  Vec uniform_vec(std::size_t n, double lo, double hi) {
    Vec out(n);
    for (double& v : out) v = uniform(lo, hi);
    return out;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace splitkit

#endif  // SPLITKIT_RNG_HPP_
