// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_VEC_HPP_
#define SPLITKIT_VEC_HPP_

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "splitkit/kernels.hpp"

namespace splitkit {

// Dense real vector. Solver state lives in these; all arithmetic below routes
// through the runtime-dispatched kernels.
using Vec = std::vector<double>;

inline double dot(const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  return kernels::active().dot(x.data(), y.data(), x.size());
}

inline double nrm2_sq(const Vec& x) {
  return kernels::active().nrm2_sq(x.data(), x.size());
}

inline double nrm2(const Vec& x) { return std::sqrt(nrm2_sq(x)); }

inline double dist_sq(const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  return kernels::active().dist_sq(x.data(), y.data(), x.size());
}

inline double dist(const Vec& x, const Vec& y) { return std::sqrt(dist_sq(x, y)); }

// y += a*x
inline void axpy_inplace(double a, const Vec& x, Vec& y) {
  assert(x.size() == y.size());
  kernels::active().axpy(a, x.data(), y.data(), x.size());
}

inline void scale_inplace(double a, Vec& x) {
  kernels::active().scale(a, x.data(), x.size());
}

// a*x + b*y
inline Vec combine(double a, const Vec& x, double b, const Vec& y) {
  assert(x.size() == y.size());
  Vec out(x.size());
  kernels::active().combine(a, x.data(), b, y.data(), out.data(), x.size());
  return out;
}

inline void combine_into(double a, const Vec& x, double b, const Vec& y, Vec& out) {
  assert(x.size() == y.size() && x.size() == out.size());
  kernels::active().combine(a, x.data(), b, y.data(), out.data(), x.size());
}

inline Vec add(const Vec& x, const Vec& y) { return combine(1.0, x, 1.0, y); }

inline Vec sub(const Vec& x, const Vec& y) { return combine(1.0, x, -1.0, y); }

inline Vec scaled(double a, const Vec& x) {
  Vec out = x;
  scale_inplace(a, out);
  return out;
}

// 2*p - x, the reflection of x through p
inline Vec reflect_through(const Vec& p, const Vec& x) {
  return combine(2.0, p, -1.0, x);
}

inline Vec soft_threshold(const Vec& x, double t) {
  Vec out(x.size());
  kernels::active().shrink(x.data(), t, out.data(), x.size());
  return out;
}

inline Vec clamp(const Vec& x, const Vec& lo, const Vec& hi) {
  assert(x.size() == lo.size() && x.size() == hi.size());
  Vec out(x.size());
  kernels::active().clamp(x.data(), lo.data(), hi.data(), out.data(), x.size());
  return out;
}

inline Vec clamp_uniform(const Vec& x, double lo, double hi) {
  Vec out(x.size());
  kernels::active().clamp_uniform(x.data(), lo, hi, out.data(), x.size());
  return out;
}

inline bool all_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

inline Vec zeros(std::size_t n) { return Vec(n, 0.0); }

inline Vec concat(const Vec& x, const Vec& y) {
  Vec out;
  out.reserve(x.size() + y.size());
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

inline Vec slice(const Vec& x, std::size_t begin, std::size_t len) {
  assert(begin + len <= x.size());
  return Vec(x.begin() + static_cast<std::ptrdiff_t>(begin),
             x.begin() + static_cast<std::ptrdiff_t>(begin + len));
}

}  // namespace splitkit

#endif  // SPLITKIT_VEC_HPP_
