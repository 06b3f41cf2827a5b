// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "splitkit/constants.hpp"
#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

// Pass threshold for the energy-type inequalities, applied after dividing
// the raw slack by max(1, ||z0 - z*||^2).
constexpr double kIneqTol = 1e-9;
// Pass threshold for the step identity, relative to the step length.
constexpr double kStepIdentityTol = 1e-10;

void validate_lambda(double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw InvalidArgumentError("relaxation parameter must lie in (0, 1]");
  }
}

}  // namespace

RelaxationSchedule::RelaxationSchedule(
    std::function<double(std::size_t)> generator, bool constant, double value)
    : generator_(std::move(generator)), constant_(constant), value_(value) {}

RelaxationSchedule RelaxationSchedule::constant(double lambda) {
  validate_lambda(lambda);
  return RelaxationSchedule([lambda](std::size_t) { return lambda; },
                            /*constant=*/true, lambda);
}

RelaxationSchedule RelaxationSchedule::from_function(
    std::function<double(std::size_t)> generator) {
  if (!generator) {
    throw InvalidArgumentError("relaxation generator must be callable");
  }
  return RelaxationSchedule(std::move(generator), /*constant=*/false, 0.0);
}

double RelaxationSchedule::lambda(std::size_t k) const {
  const double value = generator_(k);
  validate_lambda(value);
  return value;
}

double RelaxationSchedule::lambda_sum(std::size_t k) const {
  double sum = 0.0;
  for (std::size_t i = 0; i <= k; ++i) sum += lambda(i);
  return sum;
}

double RelaxationSchedule::min_lambda(std::size_t k) const {
  double lo = 1.0;
  for (std::size_t i = 0; i <= k; ++i) lo = std::min(lo, lambda(i));
  return lo;
}

double RelaxationSchedule::min_tau(std::size_t k) const {
  double lo = 0.25;
  for (std::size_t i = 0; i <= k; ++i) {
    const double l = lambda(i);
    lo = std::min(lo, l * (1.0 - l));
  }
  return lo;
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgumentError("gamma must be positive and finite");
  }
  if (max_iters == 0) {
    throw InvalidArgumentError("max_iters must be at least 1");
  }
  if (!(fpr_stop >= 0.0)) {
    throw InvalidArgumentError("fpr_stop must be nonnegative");
  }
  if (known_fixed_point && !all_finite(*known_fixed_point)) {
    throw InvalidArgumentError("known_fixed_point must be finite");
  }
}

bool InequalityReport::all_passed() const {
  for (const auto& check : checks) {
    if (!check.passed()) return false;
  }
  return true;
}

const InequalityCheck* InequalityReport::find(std::string_view name) const {
  for (const auto& check : checks) {
    if (check.name == name) return &check;
  }
  return nullptr;
}

PrsStepResult prs_step(const ProxFunction& f, const ProxFunction& g,
                       double gamma, double lambda, const Vec& z) {
  validate_lambda(lambda);
  PrsStepResult out;
  out.x_g = prox_eval(g, gamma, z);
  out.x_f = prox_eval(f, gamma, reflect_through(out.x_g, z));
  out.z_next = z;
  axpy_inplace(2.0 * lambda, sub(out.x_f, out.x_g), out.z_next);
  return out;
}

FbsStepResult fbs_step(const ProxFunction& f, const ProxFunction& g,
                       double gamma, const Vec& z) {
  if (!(gamma > 0.0)) {
    throw InvalidArgumentError("gamma must be positive");
  }
  if (!g.has_grad()) {
    throw InvalidArgumentError(
        "forward-backward step needs a differentiable g");
  }
  Vec inner = z;
  axpy_inplace(-gamma, g.grad(z), inner);
  FbsStepResult out;
  out.z_next = prox_eval(f, gamma, inner);
  out.stepsize_flagged = g.beta() > 0.0 && gamma >= 2.0 * g.beta();
  return out;
}

Vec estimate_fixed_point(const ProxFunction& f, const ProxFunction& g,
                         double gamma, const Vec& z0, std::size_t iters) {
  Vec z = z0;
  for (std::size_t k = 0; k < iters; ++k) {
    z = prs_step(f, g, gamma, 0.5, z).z_next;
    if (!all_finite(z)) {
      throw DivergenceError("fixed-point pre-run produced non-finite iterates");
    }
  }
  return z;
}

IterationTrace run_prs(const ProxFunction& f, const ProxFunction& g,
                       const SolverConfig& config, const Vec& z0) {
  config.validate();
  if (!all_finite(z0)) {
    throw InvalidArgumentError("z0 must be finite");
  }
  const double gamma = config.gamma;
  f.prepare(gamma);
  g.prepare(gamma);

  IterationTrace trace;
  trace.gamma = gamma;
  trace.mode = config.trace_mode;
  trace.smooth_point = (g.beta() == 0.0 && f.beta() > 0.0)
                           ? SmoothEvalPoint::kXg
                           : SmoothEvalPoint::kXf;

  if (config.known_fixed_point) {
    trace.z_star = *config.known_fixed_point;
  } else if (config.assert_inequalities) {
    trace.z_star =
        estimate_fixed_point(f, g, gamma, z0, 10 * config.max_iters);
  }

  const bool have_ref = trace.z_star.has_value();
  Vec grad_g_star;
  Vec grad_f_star;
  bool have_obj_star = false;
  double z0_to_zstar_sq = 0.0;
  if (have_ref) {
    const Vec& zs = *trace.z_star;
    trace.x_star = prox_eval(g, gamma, zs);
    const Vec refl_star = reflect_through(trace.x_star, zs);
    const Vec x_f_star = prox_eval(f, gamma, refl_star);
    grad_g_star = scaled(1.0 / gamma, sub(zs, trace.x_star));
    grad_f_star = scaled(1.0 / gamma, sub(refl_star, x_f_star));
    const double f_star = f.eval(trace.x_star);
    const double g_star = g.eval(trace.x_star);
    if (std::isfinite(f_star) && std::isfinite(g_star)) {
      trace.obj_star = f_star + g_star;
      have_obj_star = true;
    }
    z0_to_zstar_sq = dist_sq(z0, zs);
  }
  const double scale = std::max(1.0, z0_to_zstar_sq);
  const bool assert_on = config.assert_inequalities && have_ref;

  const double beta_smooth =
      trace.smooth_point == SmoothEvalPoint::kXf ? g.beta() : f.beta();
  const bool lipschitz_on = assert_on && have_obj_star && beta_smooth > 0.0;
  const bool composite_on = assert_on && have_obj_star && g.beta() > 0.0 &&
                            config.schedule.is_constant() &&
                            config.schedule.constant_value() == 0.5 &&
                            gamma < kKappa * g.beta();

  CheckAccumulator fejer("fejer", kIneqTol);
  CheckAccumulator fpr_monotone("fpr-monotone", kIneqTol);
  CheckAccumulator fpr_summable("fpr-summability", kIneqTol);
  CheckAccumulator upper("upper-fundamental", kIneqTol);
  CheckAccumulator lower("lower-fundamental", kIneqTol);
  CheckAccumulator auxiliary("auxiliary-bound", kIneqTol);
  CheckAccumulator aux_ergodic("auxiliary-ergodic", kIneqTol);
  CheckAccumulator lipschitz("lipschitz-upper", kIneqTol);
  CheckAccumulator comp_monotone("smooth-composite-monotone", kIneqTol);
  CheckAccumulator comp_summable("smooth-composite-summable", kIneqTol);
  CheckAccumulator step_identity("step-identity", kStepIdentityTol);

  Vec zc = z0;
  double lambda_total = 0.0;
  Vec erg_xf;
  Vec erg_xg;
  Vec erg_gf;
  Vec erg_gg;
  double weighted_fpr_sum = 0.0;
  double xg0_to_xstar_sq = 0.0;

  // State carried across steps for the pairwise checks.
  bool have_prev = false;
  double prev_fpr = 0.0;
  Vec prev_xg;
  Vec prev_gradg;
  double prev_gap_at_xf = 0.0;
  bool have_prev_b = false;
  double prev_b = 0.0;
  double composite_sum = 0.0;

  // Prox pair, tilde gradients and residual at the current iterate.
  Vec cur_xg;
  Vec cur_xf;
  Vec cur_gradg;
  Vec cur_gradf;
  double cur_fpr = 0.0;
  const auto compute_pair = [&](const Vec& at) {
    cur_xg = prox_eval(g, gamma, at);
    const Vec refl = reflect_through(cur_xg, at);
    cur_xf = prox_eval(f, gamma, refl);
    cur_gradg = scaled(1.0 / gamma, sub(at, cur_xg));
    cur_gradf = scaled(1.0 / gamma, sub(refl, cur_xf));
    cur_fpr = 4.0 * dist_sq(cur_xf, cur_xg);
  };

  // Checks that compare step pair_k against the pair at iterate pair_k + 1
  // (held in cur_*). Run when the later pair becomes available.
  const auto cross_step_checks = [&](std::size_t pair_k) {
    if (!assert_on) return;
    fpr_monotone.observe(pair_k, (cur_fpr - prev_fpr) / scale);
    if (composite_on) {
      const double beta = g.beta();
      const double b =
          2.0 * gamma * prev_gap_at_xf +
          kThetaStar * gamma * gamma * dist_sq(cur_gradg, prev_gradg) +
          (1.0 - kThetaStar) * gamma * gamma / (beta * beta) *
              dist_sq(cur_xg, prev_xg);
      if (have_prev_b) {
        comp_monotone.observe(pair_k, (b - prev_b) / scale);
      }
      composite_sum += b;
      comp_summable.observe(pair_k, (composite_sum - xg0_to_xstar_sq) / scale);
      prev_b = b;
      have_prev_b = true;
    }
  };

  bool stopped = false;
  std::size_t k = 0;
  for (; k < config.max_iters; ++k) {
    compute_pair(zc);
    if (have_prev) {
      cross_step_checks(k - 1);
    }
    if (k >= 1 && cur_fpr <= config.fpr_stop) {
      stopped = true;
      break;
    }

    const double lam = config.schedule.lambda(k);
    lambda_total += lam;

    Vec z_next = zc;
    axpy_inplace(2.0 * lam, sub(cur_xf, cur_xg), z_next);
    if (!all_finite(z_next)) {
      throw DivergenceError("relaxed splitting iterate became non-finite");
    }
    const double step_sq = lam * lam * cur_fpr;

    if (k == 0) {
      erg_xf = cur_xf;
      erg_xg = cur_xg;
      erg_gf = cur_gradf;
      erg_gg = cur_gradg;
      if (have_ref) xg0_to_xstar_sq = dist_sq(cur_xg, trace.x_star);
    } else {
      const double w = lam / lambda_total;
      combine_into(1.0 - w, erg_xf, w, cur_xf, erg_xf);
      combine_into(1.0 - w, erg_xg, w, cur_xg, erg_xg);
      combine_into(1.0 - w, erg_gf, w, cur_gradf, erg_gf);
      combine_into(1.0 - w, erg_gg, w, cur_gradg, erg_gg);
    }

    const double obj_split = f.eval(cur_xf) + g.eval(cur_xg);
    const Vec& smooth_at =
        trace.smooth_point == SmoothEvalPoint::kXf ? cur_xf : cur_xg;
    const double obj_smooth = f.eval(smooth_at) + g.eval(smooth_at);

    double s_f_k = std::numeric_limits<double>::quiet_NaN();
    double s_g_k = std::numeric_limits<double>::quiet_NaN();
    double dist_zstar_k = std::numeric_limits<double>::quiet_NaN();
    double gap_nonerg = std::numeric_limits<double>::quiet_NaN();
    double gap_erg = std::numeric_limits<double>::quiet_NaN();
    if (have_ref) {
      s_f_k = s_term(f.mu(), f.beta(), cur_xf, trace.x_star, cur_gradf,
                     grad_f_star);
      s_g_k = s_term(g.mu(), g.beta(), cur_xg, trace.x_star, cur_gradg,
                     grad_g_star);
      dist_zstar_k = dist(zc, *trace.z_star);
      if (have_obj_star) {
        gap_nonerg = obj_split - trace.obj_star;
        gap_erg = f.eval(erg_xf) + g.eval(erg_xg) - trace.obj_star;
      }
    }

    trace.lambda.push_back(lam);
    trace.lambda_sum.push_back(lambda_total);
    trace.fpr.push_back(cur_fpr);
    trace.step_sq.push_back(step_sq);
    trace.obj_split.push_back(obj_split);
    trace.obj_smooth.push_back(obj_smooth);
    trace.obj_gap_nonergodic.push_back(gap_nonerg);
    trace.obj_gap_ergodic.push_back(gap_erg);
    trace.s_f.push_back(s_f_k);
    trace.s_g.push_back(s_g_k);
    trace.dist_to_zstar.push_back(dist_zstar_k);
    const bool improved =
        trace.k_best_fpr.empty() || cur_fpr < trace.fpr[trace.k_best_fpr.back()];
    trace.k_best_fpr.push_back(improved ? k : trace.k_best_fpr.back());

    if (trace.mode == TraceMode::kFull) {
      trace.z.push_back(zc);
      trace.x_g.push_back(cur_xg);
      trace.x_f.push_back(cur_xf);
      trace.grad_g.push_back(cur_gradg);
      trace.grad_f.push_back(cur_gradf);
      trace.erg_x_f.push_back(erg_xf);
      trace.erg_x_g.push_back(erg_xg);
    }

    if (assert_on) {
      const double dz_sq = dist_sq(zc, *trace.z_star);
      const double dz_next_sq = dist_sq(z_next, *trace.z_star);
      const double telescoped = dz_sq - dz_next_sq;

      fejer.observe(
          k, (dz_next_sq - (dz_sq - (1.0 - lam) / lam * step_sq)) / scale);

      weighted_fpr_sum += lam * (1.0 - lam) * cur_fpr;
      fpr_summable.observe(k, (weighted_fpr_sum - z0_to_zstar_sq) / scale);

      const double aux_lhs = 8.0 * gamma * lam * (s_f_k + s_g_k);
      const double aux_rhs = telescoped + (1.0 - 1.0 / lam) * step_sq;
      auxiliary.observe(k, (aux_lhs - aux_rhs) / scale);

      const double sbar_f = s_term(f.mu(), f.beta(), erg_xf, trace.x_star,
                                   erg_gf, grad_f_star);
      const double sbar_g = s_term(g.mu(), g.beta(), erg_xg, trace.x_star,
                                   erg_gg, grad_g_star);
      const double erg_bound = z0_to_zstar_sq / (8.0 * gamma * lambda_total);
      aux_ergodic.observe(k, (sbar_f + sbar_g - erg_bound) / scale);

      if (have_obj_star) {
        const double upper_lhs =
            4.0 * gamma * lam * (gap_nonerg + s_f_k + s_g_k);
        const double upper_rhs = dist_sq(zc, trace.x_star) -
                                 dist_sq(z_next, trace.x_star) +
                                 (1.0 - 1.0 / lam) * step_sq;
        upper.observe(k, (upper_lhs - upper_rhs) / scale);

        const double lower_rhs =
            dot(sub(cur_xg, cur_xf), sub(*trace.z_star, trace.x_star)) /
                gamma +
            s_f_k + s_g_k;
        lower.observe(k, (lower_rhs - gap_nonerg) / scale);
      }

      if (lipschitz_on) {
        const double lip_lhs =
            4.0 * gamma * lam * (obj_smooth - trace.obj_star);
        double lip_rhs = 0.0;
        if (gamma <= beta_smooth) {
          lip_rhs = telescoped +
                    (1.0 + (gamma / beta_smooth - 1.0) / (2.0 * lam)) * step_sq;
        } else {
          lip_rhs = (1.0 + (gamma - beta_smooth) / (2.0 * beta_smooth)) *
                    (telescoped + step_sq);
        }
        lipschitz.observe(k, (lip_lhs - lip_rhs) / scale);
      }

      Vec predicted = zc;
      axpy_inplace(-2.0 * lam * gamma, add(cur_gradg, cur_gradf), predicted);
      step_identity.observe(
          k, dist(predicted, z_next) / std::max(1.0, dist(z_next, zc)));
    }

    prev_fpr = cur_fpr;
    prev_xg = cur_xg;
    prev_gradg = cur_gradg;
    prev_gap_at_xf = have_obj_star ? obj_smooth - trace.obj_star : 0.0;
    have_prev = true;

    zc = std::move(z_next);
  }

  if (stopped) {
    trace.stopped_on_fpr = true;
  } else {
    // Loop exhausted: evaluate the pair at the final iterate, closing the
    // trailing pairwise comparisons.
    compute_pair(zc);
    if (have_prev) {
      cross_step_checks(k - 1);
    }
  }

  trace.final_z = std::move(zc);
  trace.final_x_g = std::move(cur_xg);
  trace.final_x_f = std::move(cur_xf);
  trace.final_fpr = cur_fpr;
  trace.final_erg_x_f = std::move(erg_xf);
  trace.final_erg_x_g = std::move(erg_xg);

  if (assert_on) {
    InequalityReport report;
    report.scale = scale;
    report.checks.push_back(fejer.take());
    report.checks.push_back(fpr_monotone.take());
    report.checks.push_back(fpr_summable.take());
    report.checks.push_back(upper.take());
    report.checks.push_back(lower.take());
    report.checks.push_back(auxiliary.take());
    report.checks.push_back(aux_ergodic.take());
    report.checks.push_back(lipschitz.take());
    report.checks.push_back(comp_monotone.take());
    report.checks.push_back(comp_summable.take());
    report.checks.push_back(step_identity.take());
    trace.inequalities = std::move(report);
  }
  return trace;
}

ErgodicPair ergodic_average(const IterationTrace& trace, std::size_t k) {
  if (k >= trace.steps()) {
    throw InvalidArgumentError("ergodic_average: k is beyond the trace");
  }
  if (trace.mode != TraceMode::kFull) {
    throw InvalidArgumentError(
        "ergodic_average needs the full per-iteration history");
  }
  const double lambda_total = trace.lambda_sum[k];
  ErgodicPair out;
  out.x_f_bar = zeros(trace.x_f[0].size());
  out.x_g_bar = zeros(trace.x_g[0].size());
  for (std::size_t i = 0; i <= k; ++i) {
    axpy_inplace(trace.lambda[i], trace.x_f[i], out.x_f_bar);
    axpy_inplace(trace.lambda[i], trace.x_g[i], out.x_g_bar);
  }
  scale_inplace(1.0 / lambda_total, out.x_f_bar);
  scale_inplace(1.0 / lambda_total, out.x_g_bar);
  return out;
}

BestIterateSeq best_iterate(const IterationTrace& trace, BestMetric metric) {
  const std::size_t n = trace.steps();
  std::vector<double> values;
  values.reserve(n);
  switch (metric) {
    case BestMetric::kFpr:
      values = trace.fpr;
      break;
    case BestMetric::kObjectiveGap:
      if (!trace.z_star || !std::isfinite(trace.obj_star)) {
        throw InvalidArgumentError(
            "objective-gap metric needs a known fixed point");
      }
      values = trace.obj_gap_nonergodic;
      break;
    case BestMetric::kSSum:
      if (!trace.z_star) {
        throw InvalidArgumentError("S-term metric needs a known fixed point");
      }
      for (std::size_t i = 0; i < n; ++i) {
        values.push_back(trace.s_f[i] + trace.s_g[i]);
      }
      break;
  }

  BestIterateSeq out;
  out.k_best.reserve(n);
  out.value.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || values[i] < out.value.back()) {
      out.k_best.push_back(i);
      out.value.push_back(values[i]);
    } else {
      out.k_best.push_back(out.k_best.back());
      out.value.push_back(out.value.back());
    }
  }
  return out;
}

}  // namespace splitkit
