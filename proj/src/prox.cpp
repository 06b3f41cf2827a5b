// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "splitkit/errors.hpp"

namespace splitkit {

double ConvexSet::distance(const Vec& x) const { return dist(x, project(x)); }

bool ConvexSet::contains(const Vec& x, double tol) const {
  return distance(x) <= tol;
}

Vec ProxFunction::grad(const Vec&) const {
  throw InvalidArgumentError(name() + ": gradient is not available");
}

// ---- Free operations ----

Vec prox_eval(const ProxFunction& fn, double gamma, const Vec& x) {
  if (!(gamma > 0.0))
    throw InvalidArgumentError("prox_eval: gamma must be positive");
  return fn.prox(gamma, x);
}

Vec refl_eval(const ProxFunction& fn, double gamma, const Vec& x) {
  return reflect_through(prox_eval(fn, gamma, x), x);
}

Subgradient extract_subgradient(const ProxFunction& fn, double gamma,
                                const Vec& x) {
  Vec p = prox_eval(fn, gamma, x);
  Subgradient g;
  g.vector = combine(1.0 / gamma, x, -1.0 / gamma, p);
  g.at_point = std::move(p);
  g.gamma_used = gamma;
  return g;
}

std::pair<double, double> dist_sq_prox_coeffs(double gamma) {
  if (gamma < 0.0)
    throw InvalidArgumentError("dist_sq_prox_coeffs: gamma must be nonnegative");
  const double denom = 2.0 * gamma + 1.0;
  return {1.0 / denom, 2.0 * gamma / denom};
}

double s_term(double mu, double beta, const Vec& x, const Vec& y,
              const Vec& gx, const Vec& gy) {
  double s = 0.0;
  if (mu > 0.0) s = 0.5 * mu * dist_sq(x, y);
  if (beta > 0.0) {
    assert(!gx.empty() && !gy.empty());
    s = std::max(s, 0.5 * beta * dist_sq(gx, gy));
  }
  return s;
}

// ---- Functions ----

namespace {

class QuadraticFn final : public ProxFunction {
 public:
  QuadraticFn(Matrix p, Vec q, double mu, double beta)
      : ProxFunction("quadratic", mu, beta), p_(std::move(p)), q_(std::move(q)) {}

  double eval(const Vec& x) const override {
    return 0.5 * dot(x, matvec(p_, x)) + dot(q_, x);
  }

  Vec prox(double gamma, const Vec& x) const override {
    auto factor = factor_for(gamma);
    Vec rhs = combine(1.0, x, -gamma, q_);
    return factor->solve(rhs);
  }

  bool has_grad() const override { return true; }

  Vec grad(const Vec& x) const override {
    Vec g = matvec(p_, x);
    axpy_inplace(1.0, q_, g);
    return g;
  }

  void prepare(double gamma) const override { factor_for(gamma); }

  std::size_t dim() const override { return q_.size(); }

 private:
  std::shared_ptr<const SpdFactor> factor_for(double gamma) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(gamma);
    if (it != cache_.end()) return it->second;
    Matrix m = p_;
    scale_inplace(gamma, m.data);
    for (std::size_t i = 0; i < m.rows; ++i) m(i, i) += 1.0;
    auto factor = std::make_shared<const SpdFactor>(SpdFactor::make(m));
    cache_.emplace(gamma, factor);
    return factor;
  }

  Matrix p_;
  Vec q_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const SpdFactor>> cache_;
};

class ScaledNormSquaredFn final : public ProxFunction {
 public:
  ScaledNormSquaredFn(double c, Vec center)
      : ProxFunction("scaled-norm-squared", c, 1.0 / c),
        c_(c),
        center_(std::move(center)) {}

  double eval(const Vec& x) const override { return 0.5 * c_ * dist_sq(x, center_); }

  Vec prox(double gamma, const Vec& x) const override {
    const double t = gamma * c_;
    return combine(1.0 / (1.0 + t), x, t / (1.0 + t), center_);
  }

  bool has_grad() const override { return true; }

  Vec grad(const Vec& x) const override { return combine(c_, x, -c_, center_); }

  std::size_t dim() const override { return center_.size(); }

 private:
  double c_;
  Vec center_;
};

class L1Fn final : public ProxFunction {
 public:
  explicit L1Fn(double weight) : ProxFunction("l1", 0.0, 0.0), weight_(weight) {}

  double eval(const Vec& x) const override {
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return weight_ * s;
  }

  Vec prox(double gamma, const Vec& x) const override {
    return soft_threshold(x, gamma * weight_);
  }

 private:
  double weight_;
};

class ZeroFn final : public ProxFunction {
 public:
  ZeroFn() : ProxFunction("zero", 0.0, 0.0) {}

  double eval(const Vec&) const override { return 0.0; }
  Vec prox(double, const Vec& x) const override { return x; }
  bool has_grad() const override { return true; }
  Vec grad(const Vec& x) const override { return zeros(x.size()); }
};

class IndicatorFn final : public ProxFunction {
 public:
  explicit IndicatorFn(SetPtr set)
      : ProxFunction("indicator(" + set->name() + ")", 0.0, 0.0),
        set_(std::move(set)) {}

  double eval(const Vec& x) const override {
    return set_->contains(x, kMembershipTol) ? 0.0 : kPlusInfinity;
  }

  Vec prox(double, const Vec& x) const override { return set_->project(x); }

  std::size_t dim() const override { return set_->dim(); }

 private:
  SetPtr set_;
};

class SquaredDistanceFn final : public ProxFunction {
 public:
  SquaredDistanceFn(SetPtr set, double weight)
      : ProxFunction("squared-distance(" + set->name() + ")", 0.0,
                     1.0 / (2.0 * weight)),
        set_(std::move(set)),
        weight_(weight) {}

  double eval(const Vec& x) const override {
    const double d = set_->distance(x);
    return weight_ * d * d;
  }

  Vec prox(double gamma, const Vec& x) const override {
    const auto [self_w, proj_w] = dist_sq_prox_coeffs(gamma * weight_);
    return combine(self_w, x, proj_w, set_->project(x));
  }

  bool has_grad() const override { return true; }

  Vec grad(const Vec& x) const override {
    // 2*weight*(x - P(x))
    return combine(2.0 * weight_, x, -2.0 * weight_, set_->project(x));
  }

  std::size_t dim() const override { return set_->dim(); }

 private:
  SetPtr set_;
  double weight_;
};

}  // namespace

FnPtr make_quadratic(Matrix p, Vec q) {
  if (p.rows != p.cols || p.rows != q.size())
    throw InvalidArgumentError("quadratic: P must be n x n and q length n");
  double max_abs = 0.0, max_asym = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i)
    for (std::size_t j = 0; j < p.cols; ++j) {
      max_abs = std::max(max_abs, std::abs(p(i, j)));
      max_asym = std::max(max_asym, std::abs(p(i, j) - p(j, i)));
    }
  if (max_asym > 1e-12 * (1.0 + max_abs))
    throw InvalidArgumentError("quadratic: P must be symmetric");
  const auto ev = symmetric_eigenvalues(p);
  const double lo = ev.front(), hi = ev.back();
  if (lo < -1e-10 * (1.0 + std::abs(hi)))
    throw InvalidArgumentError("quadratic: P must be positive semidefinite");
  const double mu = std::max(lo, 0.0);
  const double beta = hi > 0.0 ? 1.0 / hi : 0.0;
  return std::make_shared<QuadraticFn>(std::move(p), std::move(q), mu, beta);
}

FnPtr make_scaled_norm_squared(double c, Vec center) {
  if (!(c > 0.0))
    throw InvalidArgumentError("scaled-norm-squared: scale must be positive");
  return std::make_shared<ScaledNormSquaredFn>(c, std::move(center));
}

FnPtr make_scaled_norm_squared(double c, std::size_t dim) {
  return make_scaled_norm_squared(c, zeros(dim));
}

FnPtr make_l1(double weight) {
  if (!(weight > 0.0)) throw InvalidArgumentError("l1: weight must be positive");
  return std::make_shared<L1Fn>(weight);
}

FnPtr make_zero() { return std::make_shared<ZeroFn>(); }

FnPtr make_indicator(SetPtr set) {
  if (!set) throw InvalidArgumentError("indicator: set must be non-null");
  return std::make_shared<IndicatorFn>(std::move(set));
}

FnPtr make_squared_distance(SetPtr set, double weight) {
  if (!set) throw InvalidArgumentError("squared-distance: set must be non-null");
  if (!(weight > 0.0))
    throw InvalidArgumentError("squared-distance: weight must be positive");
  return std::make_shared<SquaredDistanceFn>(std::move(set), weight);
}

// ---- Sets ----

namespace {

class AffineSubspaceSet final : public ConvexSet {
 public:
  AffineSubspaceSet(Matrix a, Vec b)
      : ConvexSet("affine-subspace"), a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows != b_.size())
      throw InvalidArgumentError("affine-subspace: A rows must match b length");
    pinv_ = pseudo_inverse(a_);
    // Solvability check: the least-squares solution must satisfy the system.
    Vec x_ls = matvec(pinv_, b_);
    Vec r = sub(matvec(a_, x_ls), b_);
    if (nrm2(r) > 1e-9 * (1.0 + nrm2(b_)))
      throw InvalidArgumentError("affine-subspace: system A x = b is inconsistent");
  }

  Vec project(const Vec& x) const override {
    Vec r = sub(matvec(a_, x), b_);
    Vec correction = matvec(pinv_, r);
    return sub(x, correction);
  }

  std::size_t dim() const override { return a_.cols; }

 private:
  Matrix a_;
  Vec b_;
  Matrix pinv_;
};

class HyperplaneSet final : public ConvexSet {
 public:
  HyperplaneSet(Vec normal, double offset)
      : ConvexSet("hyperplane"), normal_(std::move(normal)), offset_(offset) {
    norm_sq_ = nrm2_sq(normal_);
    if (norm_sq_ == 0.0)
      throw InvalidArgumentError("hyperplane: normal must be nonzero");
  }

  Vec project(const Vec& x) const override {
    const double r = dot(normal_, x) - offset_;
    return combine(1.0, x, -r / norm_sq_, normal_);
  }

  double distance(const Vec& x) const override {
    return std::abs(dot(normal_, x) - offset_) / std::sqrt(norm_sq_);
  }

  std::size_t dim() const override { return normal_.size(); }

 private:
  Vec normal_;
  double offset_;
  double norm_sq_;
};

class HalfspaceSet final : public ConvexSet {
 public:
  HalfspaceSet(Vec normal, double offset)
      : ConvexSet("halfspace"), normal_(std::move(normal)), offset_(offset) {
    norm_sq_ = nrm2_sq(normal_);
    if (norm_sq_ == 0.0)
      throw InvalidArgumentError("halfspace: normal must be nonzero");
  }

  Vec project(const Vec& x) const override {
    const double r = dot(normal_, x) - offset_;
    if (r <= 0.0) return x;
    return combine(1.0, x, -r / norm_sq_, normal_);
  }

  double distance(const Vec& x) const override {
    return std::max(dot(normal_, x) - offset_, 0.0) / std::sqrt(norm_sq_);
  }

  std::size_t dim() const override { return normal_.size(); }

 private:
  Vec normal_;
  double offset_;
  double norm_sq_;
};

class BoxSet final : public ConvexSet {
 public:
  BoxSet(Vec lo, Vec hi) : ConvexSet("box"), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size())
      throw InvalidArgumentError("box: bound lengths differ");
    for (std::size_t i = 0; i < lo_.size(); ++i)
      if (lo_[i] > hi_[i]) throw InvalidArgumentError("box: requires lo <= hi");
  }

  Vec project(const Vec& x) const override { return clamp(x, lo_, hi_); }

  std::size_t dim() const override { return lo_.size(); }

  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

 private:
  Vec lo_;
  Vec hi_;
};

class BallSet final : public ConvexSet {
 public:
  BallSet(Vec center, double radius)
      : ConvexSet("euclidean-ball"), center_(std::move(center)), radius_(radius) {
    if (radius_ < 0.0) throw InvalidArgumentError("ball: radius must be >= 0");
  }

  Vec project(const Vec& x) const override {
    const double d = dist(x, center_);
    if (d <= radius_) return x;
    const double t = radius_ / d;
    return combine(t, x, 1.0 - t, center_);
  }

  double distance(const Vec& x) const override {
    return std::max(dist(x, center_) - radius_, 0.0);
  }

  std::size_t dim() const override { return center_.size(); }

 private:
  Vec center_;
  double radius_;
};

class NonnegOrthantSet final : public ConvexSet {
 public:
  explicit NonnegOrthantSet(std::size_t n) : ConvexSet("nonneg-orthant"), n_(n) {}

  Vec project(const Vec& x) const override {
    return clamp_uniform(x, 0.0, kPlusInfinity);
  }

  double distance(const Vec& x) const override {
    double s = 0.0;
    for (double v : x) {
      const double neg = std::min(v, 0.0);
      s += neg * neg;
    }
    return std::sqrt(s);
  }

  std::size_t dim() const override { return n_; }

 private:
  std::size_t n_;
};

class LineThroughOriginSet final : public ConvexSet {
 public:
  explicit LineThroughOriginSet(Vec direction)
      : ConvexSet("line-through-origin"), d_(std::move(direction)) {
    norm_sq_ = nrm2_sq(d_);
    if (norm_sq_ == 0.0)
      throw InvalidArgumentError("line-through-origin: direction must be nonzero");
  }

  Vec project(const Vec& x) const override {
    return scaled(dot(d_, x) / norm_sq_, d_);
  }

  std::size_t dim() const override { return d_.size(); }

 private:
  Vec d_;
  double norm_sq_;
};

class DiagonalSet final : public ConvexSet {
 public:
  DiagonalSet(std::size_t m, std::size_t n)
      : ConvexSet("diagonal-set"), m_(m), n_(n) {
    if (m_ < 1 || n_ < 1)
      throw InvalidArgumentError("diagonal-set: m and n must be >= 1");
  }

  Vec project(const Vec& x) const override {
    assert(x.size() == m_ * n_);
    Vec mean(n_, 0.0);
    const auto& ops = kernels::active();
    for (std::size_t i = 0; i < m_; ++i)
      ops.axpy(1.0 / static_cast<double>(m_), x.data() + i * n_, mean.data(), n_);
    Vec out(x.size());
    for (std::size_t i = 0; i < m_; ++i)
      std::copy(mean.begin(), mean.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n_));
    return out;
  }

  std::size_t dim() const override { return m_ * n_; }

 private:
  std::size_t m_;
  std::size_t n_;
};

class ProductSet final : public ConvexSet {
 public:
  explicit ProductSet(std::vector<SetPtr> blocks)
      : ConvexSet("product-set"), blocks_(std::move(blocks)) {
    if (blocks_.empty())
      throw InvalidArgumentError("product-set: needs at least one block");
    dim_ = 0;
    for (const auto& b : blocks_) {
      if (!b || b->dim() == 0)
        throw InvalidArgumentError("product-set: blocks must have fixed dimension");
      dim_ += b->dim();
    }
  }

  Vec project(const Vec& x) const override {
    assert(x.size() == dim_);
    Vec out;
    out.reserve(dim_);
    std::size_t off = 0;
    for (const auto& b : blocks_) {
      Vec part = b->project(slice(x, off, b->dim()));
      out.insert(out.end(), part.begin(), part.end());
      off += b->dim();
    }
    return out;
  }

  std::size_t dim() const override { return dim_; }

 private:
  std::vector<SetPtr> blocks_;
  std::size_t dim_ = 0;
};

}  // namespace

SetPtr make_affine_subspace(Matrix a, Vec b) {
  return std::make_shared<AffineSubspaceSet>(std::move(a), std::move(b));
}

SetPtr make_hyperplane(Vec normal, double offset) {
  return std::make_shared<HyperplaneSet>(std::move(normal), offset);
}

SetPtr make_halfspace(Vec normal, double offset) {
  return std::make_shared<HalfspaceSet>(std::move(normal), offset);
}

SetPtr make_box(Vec lo, Vec hi) {
  return std::make_shared<BoxSet>(std::move(lo), std::move(hi));
}

SetPtr make_ball(Vec center, double radius) {
  return std::make_shared<BallSet>(std::move(center), radius);
}

SetPtr make_nonneg_orthant(std::size_t n) {
  return std::make_shared<NonnegOrthantSet>(n);
}

SetPtr make_line_through_origin(Vec direction) {
  return std::make_shared<LineThroughOriginSet>(std::move(direction));
}

SetPtr make_diagonal_set(std::size_t m, std::size_t n) {
  return std::make_shared<DiagonalSet>(m, n);
}

SetPtr make_product_set(std::vector<SetPtr> blocks) {
  return std::make_shared<ProductSet>(std::move(blocks));
}

}  // namespace splitkit
