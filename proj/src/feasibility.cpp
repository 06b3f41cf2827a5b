// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>
#include <utility>

#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

// Pass threshold for the energy-type inequalities, applied after dividing
// the raw slack by the report scale.
constexpr double kIneqTol = 1e-9;
// Pass threshold for the prox-to-projection distance identities.
constexpr double kDistIdentityTol = 1e-10;

void validate_lambda(double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw InvalidArgumentError("relaxation parameter must lie in (0, 1]");
  }
}

void validate_gamma(double gamma, const char* which) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgumentError(std::string(which) +
                               " stepsize must be positive and finite");
  }
}

bool is_map_parameters(double gamma_f, double gamma_g, double lambda) {
  return gamma_f == 0.5 && gamma_g == 0.5 && lambda == 1.0;
}

// Everything one step produces; the runner wants the intermediates the
// public step result drops.
struct StepParts {
  Vec x_g;
  Vec refl;  // the point x_f's projection was taken at
  Vec x_f;
  Vec z_next;
};

StepParts compute_step(const ConvexSet& cf, const ConvexSet& cg,
                       double gamma_f, double gamma_g, double lambda,
                       const Vec& z) {
  StepParts parts;
  if (is_map_parameters(gamma_f, gamma_g, lambda)) {
    // Midpoint coefficients collapse the recursion to plain alternating
    // projections; take that path literally so the update is bit-exact.
    Vec p_g = cg.project(z);
    Vec p_f = cf.project(p_g);
    parts.x_g = combine(0.5, z, 0.5, p_g);
    parts.x_f = combine(0.5, p_g, 0.5, p_f);
    parts.refl = std::move(p_g);
    parts.z_next = std::move(p_f);
    return parts;
  }
  const auto [self_g, proj_g] = dist_sq_prox_coeffs(gamma_g);
  const Vec p_g = cg.project(z);
  parts.x_g = combine(self_g, z, proj_g, p_g);
  parts.refl = reflect_through(parts.x_g, z);
  const auto [self_f, proj_f] = dist_sq_prox_coeffs(gamma_f);
  const Vec p_f = cf.project(parts.refl);
  parts.x_f = combine(self_f, parts.refl, proj_f, p_f);
  parts.z_next = z;
  axpy_inplace(2.0 * lambda, sub(parts.x_f, parts.x_g), parts.z_next);
  return parts;
}

}  // namespace

std::size_t FeasibilityProblem::dim() const {
  return sets.empty() || sets.front() == nullptr ? 0 : sets.front()->dim();
}

void FeasibilityProblem::validate() const {
  if (sets.size() < 2) {
    throw InvalidArgumentError("feasibility problem needs at least two sets");
  }
  for (const SetPtr& set : sets) {
    if (set == nullptr) {
      throw InvalidArgumentError("feasibility problem has a null set");
    }
  }
  const std::size_t n = sets.front()->dim();
  if (n == 0) {
    throw InvalidArgumentError("feasibility sets must have a fixed dimension");
  }
  for (const SetPtr& set : sets) {
    if (set->dim() != n) {
      throw InvalidArgumentError("feasibility sets live in different spaces");
    }
  }
  if (regularity.has_value()) {
    if (!(regularity->mu_rho >= 1.0) || !std::isfinite(regularity->mu_rho)) {
      throw InvalidArgumentError("regularity constant must be >= 1");
    }
    if (regularity->rho < 0.0 || !std::isfinite(regularity->rho)) {
      throw InvalidArgumentError("regularity radius must be >= 0");
    }
  }
}

StepsizePair::StepsizePair(std::function<double(std::size_t)> f,
                           std::function<double(std::size_t)> g, bool constant)
    : f_(std::move(f)), g_(std::move(g)), constant_(constant) {}

StepsizePair StepsizePair::constant(double gamma_f, double gamma_g) {
  validate_gamma(gamma_f, "gamma_f");
  validate_gamma(gamma_g, "gamma_g");
  return StepsizePair([gamma_f](std::size_t) { return gamma_f; },
                      [gamma_g](std::size_t) { return gamma_g; }, true);
}

StepsizePair StepsizePair::from_functions(
    std::function<double(std::size_t)> gamma_f,
    std::function<double(std::size_t)> gamma_g) {
  if (!gamma_f || !gamma_g) {
    throw InvalidArgumentError("stepsize generators must be callable");
  }
  return StepsizePair(std::move(gamma_f), std::move(gamma_g), false);
}

double StepsizePair::gamma_f(std::size_t k) const {
  const double value = f_(k);
  validate_gamma(value, "gamma_f");
  return value;
}

double StepsizePair::gamma_g(std::size_t k) const {
  const double value = g_(k);
  validate_gamma(value, "gamma_g");
  return value;
}

FeasStepResult feas_prs_step(const ConvexSet& cf, const ConvexSet& cg,
                             double gamma_f, double gamma_g, double lambda,
                             const Vec& z) {
  validate_gamma(gamma_f, "gamma_f");
  validate_gamma(gamma_g, "gamma_g");
  validate_lambda(lambda);
  StepParts parts = compute_step(cf, cg, gamma_f, gamma_g, lambda, z);
  return FeasStepResult{std::move(parts.z_next), std::move(parts.x_g),
                        std::move(parts.x_f)};
}

void FeasibilityConfig::validate() const {
  if (max_iters == 0) {
    throw InvalidArgumentError("max_iters must be positive");
  }
  if (fpr_stop < 0.0 || !std::isfinite(fpr_stop)) {
    throw InvalidArgumentError("fpr_stop must be nonnegative");
  }
  if (intersection_point.has_value() && !all_finite(*intersection_point)) {
    throw InvalidArgumentError("intersection_point must be finite");
  }
  if (regularity.has_value()) {
    if (!(regularity->mu_rho >= 1.0) || !std::isfinite(regularity->mu_rho)) {
      throw InvalidArgumentError("regularity constant must be >= 1");
    }
    if (regularity->rho < 0.0 || !std::isfinite(regularity->rho)) {
      throw InvalidArgumentError("regularity radius must be >= 0");
    }
  }
}

FeasibilityTrace run_two_set(const ConvexSet& cf, const ConvexSet& cg,
                             const FeasibilityConfig& config, const Vec& z0) {
  config.validate();
  if (!all_finite(z0)) {
    throw InvalidArgumentError("z0 must be finite");
  }
  if (config.intersection_point.has_value()) {
    const Vec& x_star = *config.intersection_point;
    if (!cf.contains(x_star) || !cg.contains(x_star)) {
      throw InvalidArgumentError(
          "intersection_point must lie in both sets");
    }
  }

  const bool have_star = config.intersection_point.has_value();
  const bool have_inter = config.intersection != nullptr;
  const bool decrease_on = config.assert_inequalities && have_inter &&
                           config.regularity.has_value();
  const double mu_rho =
      config.regularity.has_value() ? config.regularity->mu_rho : 0.0;
  const double rho_limit =
      config.regularity.has_value() ? config.regularity->rho : 0.0;

  const Vec* x_star = have_star ? &*config.intersection_point : nullptr;
  const double scale =
      have_star ? std::max(1.0, dist_sq(z0, *x_star)) : 1.0;
  const double inter_scale =
      have_inter ? std::max(1.0, config.intersection->distance(z0)) : 1.0;

  CheckAccumulator upper("feas-upper", kIneqTol);
  CheckAccumulator ident_g("dist-identity-g", kDistIdentityTol);
  CheckAccumulator ident_f("dist-identity-f", kDistIdentityTol);
  CheckAccumulator decrease("linear-decrease", kIneqTol);

  FeasibilityTrace trace;
  Vec zc = z0;
  bool stopped = false;
  double last_fpr = 0.0;

  std::size_t k = 0;
  for (; k < config.max_iters; ++k) {
    const double gamma_f = config.stepsizes.gamma_f(k);
    const double gamma_g = config.stepsizes.gamma_g(k);
    const double lambda = config.schedule.lambda(k);

    StepParts parts = compute_step(cf, cg, gamma_f, gamma_g, lambda, zc);
    const double fpr = 4.0 * dist_sq(parts.x_f, parts.x_g);
    last_fpr = fpr;
    if (k >= 1 && fpr <= config.fpr_stop) {
      stopped = true;
      break;
    }
    if (!all_finite(parts.z_next)) {
      throw DivergenceError("iterate left the representable range");
    }
    const double step_sq = lambda * lambda * fpr;

    const double d_f_z = cf.distance(zc);
    const double d_g_z = cg.distance(zc);
    const double d_inter_z =
        have_inter ? config.intersection->distance(zc) : 0.0;

    if (config.assert_inequalities) {
      // Distances at the prox points through fresh projections, so the
      // identity checks exercise the projector, not the step's algebra.
      const double d_f_xf = cf.distance(parts.x_f);
      const double d_g_xg = cg.distance(parts.x_g);

      const double d_g_expected = d_g_z / (2.0 * gamma_g + 1.0);
      ident_g.observe(k, std::abs(d_g_xg - d_g_expected) /
                             std::max(1.0, d_g_z));
      const double d_f_refl = cf.distance(parts.refl);
      const double d_f_expected = d_f_refl / (2.0 * gamma_f + 1.0);
      ident_f.observe(k, std::abs(d_f_xf - d_f_expected) /
                             std::max(1.0, d_f_refl));

      if (have_star) {
        const double lhs = 8.0 * lambda *
                           (gamma_f * d_f_xf * d_f_xf +
                            gamma_g * d_g_xg * d_g_xg);
        const double rhs = dist_sq(zc, *x_star) -
                           dist_sq(parts.z_next, *x_star) +
                           (1.0 - 1.0 / lambda) * step_sq;
        upper.observe(k, (lhs - rhs) / scale);
      }
      if (decrease_on) {
        const bool in_ball =
            rho_limit == 0.0 ||
            (nrm2(zc) <= rho_limit && nrm2(parts.z_next) <= rho_limit);
        if (in_ball) {
          const double factor =
              feas_contraction_constant(gamma_f, gamma_g, lambda, mu_rho);
          const double d_next = config.intersection->distance(parts.z_next);
          decrease.observe(k, (d_next - factor * d_inter_z) / inter_scale);
        }
      }
    }

    trace.lambda.push_back(lambda);
    trace.gamma_f.push_back(gamma_f);
    trace.gamma_g.push_back(gamma_g);
    trace.fpr.push_back(fpr);
    trace.step_sq.push_back(step_sq);
    trace.dist_f.push_back(d_f_z);
    trace.dist_g.push_back(d_g_z);
    if (have_inter) trace.dist_intersection.push_back(d_inter_z);
    trace.z.push_back(zc);
    trace.x_g.push_back(std::move(parts.x_g));
    trace.x_f.push_back(std::move(parts.x_f));

    zc = std::move(parts.z_next);
  }

  if (stopped) {
    trace.stopped_on_fpr = true;
  } else {
    // Loop exhausted; measure the residual the next step would have seen.
    const StepParts parts = compute_step(cf, cg, config.stepsizes.gamma_f(k),
                                         config.stepsizes.gamma_g(k),
                                         config.schedule.lambda(k), zc);
    last_fpr = 4.0 * dist_sq(parts.x_f, parts.x_g);
  }
  trace.final_z = std::move(zc);
  trace.final_fpr = last_fpr;

  if (config.assert_inequalities) {
    InequalityReport report;
    report.scale = scale;
    report.checks.push_back(upper.take());
    report.checks.push_back(ident_g.take());
    report.checks.push_back(ident_f.take());
    report.checks.push_back(decrease.take());
    trace.inequalities = std::move(report);
  }
  return trace;
}

FeasibilityTrace map_run(const ConvexSet& cf, const ConvexSet& cg,
                         const Vec& z0, std::size_t max_iters) {
  return map_run(cf, cg, z0, max_iters, FeasibilityConfig{});
}

FeasibilityTrace map_run(const ConvexSet& cf, const ConvexSet& cg,
                         const Vec& z0, std::size_t max_iters,
                         FeasibilityConfig config) {
  config.stepsizes = StepsizePair::constant(0.5, 0.5);
  config.schedule = RelaxationSchedule::constant(1.0);
  config.max_iters = max_iters;
  return run_two_set(cf, cg, config, z0);
}

std::string GapDiagnostics::summary() const {
  return divergence_suspected ? "gap not attained (suspected)"
                              : "gap estimate stabilized";
}

GapDiagnostics map_infeasible_diagnostics(const ConvexSet& cf,
                                          const ConvexSet& cg,
                                          const FeasibilityTrace& trace) {
  if (trace.z.empty()) {
    throw InvalidArgumentError("trace carries no iterate history");
  }
  const auto gap_at = [&cf, &cg](const Vec& point) {
    Vec p_g = cg.project(point);
    Vec p_f = cf.project(p_g);
    return sub(p_g, p_f);
  };

  GapDiagnostics out;
  out.gap_estimate = gap_at(trace.final_z);
  out.gap_vectors.reserve(trace.z.size());
  out.gap_norms.reserve(trace.z.size());
  out.best_error_sq.reserve(trace.z.size());
  double best = kPlusInfinity;
  for (const Vec& point : trace.z) {
    Vec gap = gap_at(point);
    out.gap_norms.push_back(nrm2(gap));
    best = std::min(best, dist_sq(gap, out.gap_estimate));
    out.best_error_sq.push_back(best);
    out.gap_vectors.push_back(std::move(gap));
  }

  std::vector<double> norms;
  norms.reserve(trace.z.size() + 1);
  for (const Vec& point : trace.z) norms.push_back(nrm2(point));
  norms.push_back(nrm2(trace.final_z));
  if (norms.size() >= 8) {
    const std::size_t half = norms.size() / 2;
    bool climbing = true;
    for (std::size_t i = half + 1; i < norms.size(); ++i) {
      if (norms[i] <= norms[i - 1]) {
        climbing = false;
        break;
      }
    }
    out.divergence_suspected =
        climbing && norms.back() >= 2.0 * norms[half];
  }
  return out;
}

Vec multi_set_step(const FeasibilityProblem& problem, double gamma_f,
                   double gamma_g, double lambda, const Vec& zz) {
  problem.validate();
  validate_gamma(gamma_f, "gamma_f");
  validate_gamma(gamma_g, "gamma_g");
  validate_lambda(lambda);
  const std::size_t m = problem.sets.size();
  const std::size_t n = problem.dim();
  if (zz.size() != m * n) {
    throw InvalidArgumentError("stacked iterate has the wrong size");
  }

  Vec zbar = zeros(n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) zbar[j] += zz[i * n + j];
  }
  scale_inplace(1.0 / static_cast<double>(m), zbar);

  const bool map_params = is_map_parameters(gamma_f, gamma_g, lambda);
  const auto [self_g, proj_g] = dist_sq_prox_coeffs(gamma_g);
  const auto [self_f, proj_f] = dist_sq_prox_coeffs(gamma_f);

  Vec out(m * n, 0.0);
  const auto update_block = [&](std::size_t i) {
    const Vec z_i = slice(zz, i * n, n);
    Vec block;
    if (map_params) {
      block = problem.sets[i]->project(zbar);
    } else {
      const Vec x_g = combine(self_g, z_i, proj_g, zbar);
      const Vec refl = reflect_through(x_g, z_i);
      const Vec x_f =
          combine(self_f, refl, proj_f, problem.sets[i]->project(refl));
      block = z_i;
      axpy_inplace(2.0 * lambda, sub(x_f, x_g), block);
    }
    std::copy(block.begin(), block.end(), out.begin() + i * n);
  };

  // Blocks read only zz and the mean, and each writes its own slice, so
  // dispatch order cannot change the result.
  if (std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<void>> pending;
    pending.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      pending.push_back(std::async(std::launch::async, update_block, i));
    }
    for (std::future<void>& task : pending) task.get();
  } else {
    for (std::size_t i = 0; i < m; ++i) update_block(i);
  }
  return out;
}

Vec averaged_map_step(const FeasibilityProblem& problem, const Vec& x) {
  problem.validate();
  if (x.size() != problem.dim()) {
    throw InvalidArgumentError("iterate has the wrong size");
  }
  Vec out = zeros(x.size());
  for (const SetPtr& set : problem.sets) {
    axpy_inplace(1.0, set->project(x), out);
  }
  scale_inplace(1.0 / static_cast<double>(problem.sets.size()), out);
  return out;
}

double feas_contraction_constant(double gamma_f, double gamma_g,
                                 double lambda, double mu_rho) {
  validate_gamma(gamma_f, "gamma_f");
  validate_gamma(gamma_g, "gamma_g");
  validate_lambda(lambda);
  if (!(mu_rho >= 1.0) || !std::isfinite(mu_rho)) {
    throw InvalidArgumentError("regularity constant must be >= 1");
  }
  const double term_g = gamma_g / ((2.0 * gamma_g + 1.0) * (2.0 * gamma_g + 1.0));
  const double term_f = gamma_f / ((2.0 * gamma_f + 1.0) * (2.0 * gamma_f + 1.0));
  const double c1_sq = 16.0 * gamma_g * gamma_g /
                       ((2.0 * gamma_g + 1.0) * (2.0 * gamma_g + 1.0));
  const double drop = 4.0 * lambda * std::min(term_g, term_f) /
                      (mu_rho * mu_rho * std::max(c1_sq, 1.0));
  return std::sqrt(std::clamp(1.0 - drop, 0.0, 1.0));
}

double map_contraction_constant(double mu_rho) {
  if (!(mu_rho >= 1.0) || !std::isfinite(mu_rho)) {
    throw InvalidArgumentError("regularity constant must be >= 1");
  }
  return std::sqrt(std::clamp(1.0 - 1.0 / (mu_rho * mu_rho), 0.0, 1.0));
}

double product_space_mu(std::size_t m, double mu_rho) {
  if (m < 2) {
    throw InvalidArgumentError("block count must be at least two");
  }
  if (!(mu_rho >= 1.0) || !std::isfinite(mu_rho)) {
    throw InvalidArgumentError("regularity constant must be >= 1");
  }
  return std::sqrt(1.0 + 4.0 * static_cast<double>(m) * mu_rho * mu_rho);
}

double subspace_mu_bound(double friedrichs_cos) {
  if (!(friedrichs_cos >= 0.0) || !(friedrichs_cos < 1.0)) {
    throw InvalidArgumentError("Friedrichs cosine must lie in [0, 1)");
  }
  return 2.0 / std::sqrt(1.0 - friedrichs_cos);
}

SetPtr affine_intersection(const Matrix& a1, const Vec& b1, const Matrix& a2,
                           const Vec& b2) {
  if (a1.cols != a2.cols) {
    throw InvalidArgumentError("affine systems act on different spaces");
  }
  if (a1.rows != b1.size() || a2.rows != b2.size()) {
    throw InvalidArgumentError("affine system shape mismatch");
  }
  Matrix stacked(a1.rows + a2.rows, a1.cols);
  std::copy(a1.data.begin(), a1.data.end(), stacked.data.begin());
  std::copy(a2.data.begin(), a2.data.end(),
            stacked.data.begin() + static_cast<std::ptrdiff_t>(a1.data.size()));
  Vec rhs = concat(b1, b2);
  return make_affine_subspace(std::move(stacked), std::move(rhs));
}

SetPtr box_intersection(const Vec& lo1, const Vec& hi1, const Vec& lo2,
                        const Vec& hi2) {
  if (lo1.size() != hi1.size() || lo2.size() != hi2.size() ||
      lo1.size() != lo2.size()) {
    throw InvalidArgumentError("box bound lengths differ");
  }
  Vec lo(lo1.size());
  Vec hi(hi1.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    lo[i] = std::max(lo1[i], lo2[i]);
    hi[i] = std::min(hi1[i], hi2[i]);
    if (lo[i] > hi[i]) {
      throw InvalidArgumentError("boxes do not intersect");
    }
  }
  return make_box(std::move(lo), std::move(hi));
}

SetPtr box_halfspace_intersection(Vec lo, Vec hi, std::size_t axis,
                                  double sign, double bound) {
  if (lo.size() != hi.size()) {
    throw InvalidArgumentError("box bound lengths differ");
  }
  if (axis >= lo.size()) {
    throw InvalidArgumentError("axis is out of range");
  }
  if (sign != 1.0 && sign != -1.0) {
    throw InvalidArgumentError("sign must be +1 or -1");
  }
  if (sign > 0.0) {
    hi[axis] = std::min(hi[axis], bound);
  } else {
    lo[axis] = std::max(lo[axis], -bound);
  }
  if (lo[axis] > hi[axis]) {
    throw InvalidArgumentError("box and halfspace do not intersect");
  }
  return make_box(std::move(lo), std::move(hi));
}

double default_regularity_radius(const Vec& z0,
                                 const ConvexSet& intersection) {
  return 2.0 * nrm2(z0) + 2.0 * intersection.distance(z0);
}

double sample_mu_lower_bound(const FeasibilityProblem& problem,
                             const ConvexSet& intersection, double rho,
                             std::size_t samples, Rng& rng) {
  problem.validate();
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgumentError("sampling radius must be positive");
  }
  if (samples == 0) {
    throw InvalidArgumentError("sample count must be positive");
  }
  const std::size_t n = problem.dim();
  const double exponent = 1.0 / static_cast<double>(n);
  double best = 1.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Vec direction = rng.gaussian_vec(n);
    const double length = nrm2(direction);
    const double radius = rho * std::pow(rng.uniform(), exponent);
    if (length == 0.0) continue;
    scale_inplace(radius / length, direction);
    double d_max = 0.0;
    for (const SetPtr& set : problem.sets) {
      d_max = std::max(d_max, set->distance(direction));
    }
    if (d_max < 1e-12) continue;
    best = std::max(best, intersection.distance(direction) / d_max);
  }
  return best;
}

}  // namespace splitkit
