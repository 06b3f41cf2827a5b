// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

namespace splitkit::kernels {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double nrm2_sq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double dist_sq_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void combine_scalar(double a, const double* x, double b, const double* y,
                    double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void shrink_scalar(const double* x, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double pos = std::max(x[i] - t, 0.0);
    const double neg = std::max(-x[i] - t, 0.0);
    out[i] = pos - neg;
  }
}

void clamp_scalar(const double* x, const double* lo, const double* hi,
                  double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(x[i], lo[i]), hi[i]);
}

void clamp_uniform_scalar(const double* x, double lo, double hi, double* out,
                          std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(x[i], lo), hi);
}

constexpr Ops kScalarOps = {
    dot_scalar,   nrm2_sq_scalar, dist_sq_scalar,
    axpy_scalar,  scale_scalar,   combine_scalar,
    shrink_scalar, clamp_scalar,  clamp_uniform_scalar,
};

struct Selection {
  const Ops* ops;
  Backend backend;
};

Selection resolve_from_environment() {
  const char* pref = std::getenv("SPLITKIT_KERNELS");
  const Ops* avx2 = avx2_ops();
  if (pref != nullptr) {
    if (std::strcmp(pref, "scalar") == 0) return {&kScalarOps, Backend::kScalar};
    if (std::strcmp(pref, "avx2") == 0 && avx2 != nullptr)
      return {avx2, Backend::kAvx2};
    // Unknown value or unavailable backend: fall through to auto.
  }
  if (avx2 != nullptr) return {avx2, Backend::kAvx2};
  return {&kScalarOps, Backend::kScalar};
}

Selection& selection() {
  static Selection sel = resolve_from_environment();
  return sel;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

const Ops& active() { return *selection().ops; }

Backend active_backend() { return selection().backend; }

bool force_backend(Backend b) {
  if (b == Backend::kScalar) {
    selection() = {&kScalarOps, Backend::kScalar};
    return true;
  }
  const Ops* avx2 = avx2_ops();
  if (avx2 == nullptr) return false;
  selection() = {avx2, Backend::kAvx2};
  return true;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

}  // namespace splitkit::kernels
