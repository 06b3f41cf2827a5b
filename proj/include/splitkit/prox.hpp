// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_PROX_HPP_
#define SPLITKIT_PROX_HPP_

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "splitkit/linalg.hpp"
#include "splitkit/vec.hpp"

// Proximal calculus: convex functions with prox oracles, convex sets with
// projection oracles, and a catalog of closed-form instances. Objects are
// immutable after construction and safe to share across threads.

namespace splitkit {

// Sentinel for extended-real function values.
inline constexpr double kPlusInfinity = std::numeric_limits<double>::infinity();

// Absolute tolerance for set-membership decisions.
inline constexpr double kMembershipTol = 1e-9;

class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  virtual Vec project(const Vec& x) const = 0;
  // Euclidean distance to the set; equals the distance to project(x).
  virtual double distance(const Vec& x) const;
  virtual bool contains(const Vec& x, double tol = kMembershipTol) const;
  virtual std::size_t dim() const = 0;
  const std::string& name() const { return name_; }

 protected:
  explicit ConvexSet(std::string name) : name_(std::move(name)) {}

 private:
  std::string name_;
};

using SetPtr = std::shared_ptr<const ConvexSet>;

class ProxFunction {
 public:
  virtual ~ProxFunction() = default;

  // Extended-real function value (kPlusInfinity outside the domain).
  virtual double eval(const Vec& x) const = 0;
  // argmin_y eval(y) + (1/(2*gamma)) ||y - x||^2, gamma > 0.
  virtual Vec prox(double gamma, const Vec& x) const = 0;
  virtual bool has_grad() const { return false; }
  virtual Vec grad(const Vec& x) const;
  // Builds any per-stepsize factorization now rather than inside the first
  // iteration; repeated calls with the same gamma are cheap.
  virtual void prepare(double gamma) const { (void)gamma; }
  // Dimension this instance is bound to, or 0 when dimension-agnostic.
  virtual std::size_t dim() const { return 0; }

  // Strong-convexity modulus; 0 when none is claimed.
  double mu() const { return mu_; }
  // Gradient is (1/beta)-Lipschitz when beta > 0; 0 when none is claimed.
  double beta() const { return beta_; }
  const std::string& name() const { return name_; }

 protected:
  ProxFunction(std::string name, double mu, double beta)
      : name_(std::move(name)), mu_(mu), beta_(beta) {}

 private:
  std::string name_;
  double mu_ = 0.0;
  double beta_ = 0.0;
};

using FnPtr = std::shared_ptr<const ProxFunction>;

// The prox optimality residual (x - prox(x))/gamma, which lies in the
// subdifferential at the prox point.
struct Subgradient {
  Vec vector;
  Vec at_point;
  double gamma_used = 0.0;
};

Vec prox_eval(const ProxFunction& fn, double gamma, const Vec& x);
// 2*prox - identity; nonexpansive.
Vec refl_eval(const ProxFunction& fn, double gamma, const Vec& x);
Subgradient extract_subgradient(const ProxFunction& fn, double gamma, const Vec& x);

// Coefficients (self_weight, proj_weight) of the prox of gamma * dist^2:
// prox(x) = self_weight * x + proj_weight * project(x).
std::pair<double, double> dist_sq_prox_coeffs(double gamma);

// Regularity slack max{(mu/2)||x-y||^2, (beta/2)||gx-gy||^2}; gx/gy are the
// subgradients at x and y and may be empty when beta == 0.
double s_term(double mu, double beta, const Vec& x, const Vec& y,
              const Vec& gx, const Vec& gy);

// ---- Catalog: functions ----

// (1/2) x^T P x + q^T x with P symmetric PSD. mu = lambda_min(P),
// beta = 1/lambda_max(P) when lambda_max > 0.
FnPtr make_quadratic(Matrix p, Vec q);
// (c/2) ||x - center||^2, c > 0.
FnPtr make_scaled_norm_squared(double c, Vec center);
FnPtr make_scaled_norm_squared(double c, std::size_t dim);
// weight * ||x||_1
FnPtr make_l1(double weight = 1.0);
FnPtr make_zero();
// Indicator of a set: 0 inside (within membership tolerance), +inf outside.
FnPtr make_indicator(SetPtr set);
// weight * dist(x, set)^2; beta = 1/(2*weight), smooth everywhere.
FnPtr make_squared_distance(SetPtr set, double weight = 1.0);

// ---- Catalog: sets ----

// {x : A x = b}; throws InvalidArgumentError when the system is inconsistent.
SetPtr make_affine_subspace(Matrix a, Vec b);
SetPtr make_hyperplane(Vec normal, double offset);
// {x : <normal, x> <= offset}
SetPtr make_halfspace(Vec normal, double offset);
SetPtr make_box(Vec lo, Vec hi);
SetPtr make_ball(Vec center, double radius);
SetPtr make_nonneg_orthant(std::size_t n);
SetPtr make_line_through_origin(Vec direction);
// Diagonal subspace of (R^n)^m: m stacked blocks of size n, all equal.
SetPtr make_diagonal_set(std::size_t m, std::size_t n);
// Cartesian product of blocks laid out consecutively.
SetPtr make_product_set(std::vector<SetPtr> blocks);

}  // namespace splitkit

#endif  // SPLITKIT_PROX_HPP_
