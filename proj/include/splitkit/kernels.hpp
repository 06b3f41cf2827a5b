// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_KERNELS_HPP_
#define SPLITKIT_KERNELS_HPP_

#include <cstddef>

// Vector kernels underlying every solver loop. A scalar reference
// implementation is always available; an AVX2 variant is selected at runtime
// when the CPU supports it. Elementwise kernels are bit-identical across
// backends (the build disables FMA contraction); reductions may differ by
// summation order only.

namespace splitkit::kernels {

enum class Backend { kScalar, kAvx2 };

// Table of kernel entry points. All pointers are non-null in a valid table.
struct Ops {
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*nrm2_sq)(const double* x, std::size_t n);
  double (*dist_sq)(const double* x, const double* y, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // x *= a
  void (*scale)(double a, double* x, std::size_t n);
  // out = a*x + b*y; out may alias x or y
  void (*combine)(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n);
  // out = sign(x) * max(|x| - t, 0), t >= 0; out may alias x
  void (*shrink)(const double* x, double t, double* out, std::size_t n);
  // out = min(max(x, lo), hi) elementwise; out may alias x
  void (*clamp)(const double* x, const double* lo, const double* hi,
                double* out, std::size_t n);
  void (*clamp_uniform)(const double* x, double lo, double hi, double* out,
                        std::size_t n);
};

// Reference implementation; always valid.
const Ops& scalar_ops();

// AVX2 implementation, or nullptr when the build or the CPU lacks AVX2.
const Ops* avx2_ops();

// Active table. Resolved once: AVX2 when available, unless the environment
// variable SPLITKIT_KERNELS is set to "scalar" or "avx2".
const Ops& active();
Backend active_backend();

// Overrides the active table (used by equivalence tests). Returns false and
// leaves the selection unchanged when the requested backend is unavailable.
bool force_backend(Backend b);

const char* backend_name(Backend b);

}  // namespace splitkit::kernels

#endif  // SPLITKIT_KERNELS_HPP_
