// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/kernels.hpp"

// AVX2 variants of the vector kernels. This translation unit is the only one
// compiled with -mavx2; everything else stays at the baseline ISA, so the
// runtime CPU check below is the sole gate for executing these paths.

#if defined(__AVX2__)

#include <immintrin.h>

#include <algorithm>

namespace splitkit::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(acc) + tail;
}

double nrm2_sq_avx2(const double* x, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vx));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * x[i];
  return hsum(acc) + tail;
}

double dist_sq_avx2(const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    tail += d * d;
  }
  return hsum(acc) + tail;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(a);
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(a);
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void combine_avx2(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(vx, vy));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void shrink_avx2(const double* x, double t, double* out, std::size_t n) {
  std::size_t i = 0;
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d pos = _mm256_max_pd(_mm256_sub_pd(vx, vt), zero);
    __m256d neg = _mm256_max_pd(_mm256_sub_pd(_mm256_sub_pd(zero, vx), vt), zero);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(pos, neg));
  }
  for (; i < n; ++i) {
    const double pos = std::max(x[i] - t, 0.0);
    const double neg = std::max(-x[i] - t, 0.0);
    out[i] = pos - neg;
  }
}

void clamp_avx2(const double* x, const double* lo, const double* hi,
                double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d vlo = _mm256_loadu_pd(lo + i);
    __m256d vhi = _mm256_loadu_pd(hi + i);
    _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(vx, vlo), vhi));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void clamp_uniform_avx2(const double* x, double lo, double hi, double* out,
                        std::size_t n) {
  std::size_t i = 0;
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, _mm256_min_pd(_mm256_max_pd(vx, vlo), vhi));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

constexpr Ops kAvx2Ops = {
    dot_avx2,   nrm2_sq_avx2, dist_sq_avx2,
    axpy_avx2,  scale_avx2,   combine_avx2,
    shrink_avx2, clamp_avx2,  clamp_uniform_avx2,
};

}  // namespace

const Ops* avx2_ops() {
  static const Ops* table =
      __builtin_cpu_supports("avx2") ? &kAvx2Ops : nullptr;
  return table;
}

}  // namespace splitkit::kernels

#else  // !defined(__AVX2__)

namespace splitkit::kernels {

const Ops* avx2_ops() { return nullptr; }

}  // namespace splitkit::kernels

#endif
