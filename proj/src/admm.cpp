// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/admm.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitkit/constants.hpp"
#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Pass thresholds on normalized slack, shared with the splitting runs.
constexpr double kIneqTol = 1e-9;
constexpr double kExactIdentityTol = 1e-10;
constexpr double kImpliedTol = 1e-8;

// +1 / -1 when m is plus / minus the identity, 0 otherwise.
double identity_sign(const Matrix& m) {
  if (m.rows != m.cols || m.rows == 0) return 0.0;
  const double sign = m(0, 0);
  if (sign != 1.0 && sign != -1.0) return 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (m(i, j) != (i == j ? sign : 0.0)) return 0.0;
    }
  }
  return sign;
}

Matrix add_scaled(const Matrix& p, double c, const Matrix& m) {
  Matrix out = p;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += c * m.data[i];
  return out;
}

// Closed-form minimizer of h(v) - <w, M v> + (gamma/2) ||M v + c||^2 for one
// catalog objective h with constraint matrix M.
class BlockSolver {
 public:
  BlockSolver(const AdmmObjective& obj, const Matrix& m, double gamma,
              const char* which)
      : obj_(obj), m_(m), gamma_(gamma) {
    if (obj.kind() == AdmmObjectiveKind::kQuadratic) {
      factor_ = SpdFactor::make(add_scaled(obj.quad_p(), gamma, gram(m)));
    } else {
      sign_ = identity_sign(m);
      if (sign_ == 0.0) {
        throw UnsupportedSubproblemError(
            std::string("no closed-form ") + which +
            "-update: a nonquadratic objective needs a +/- identity "
            "constraint matrix");
      }
    }
  }

  Vec minimize(const Vec& w, const Vec& c) const {
    switch (obj_.kind()) {
      case AdmmObjectiveKind::kQuadratic: {
        // normal equations (P + gamma M^T M) v = M^T (w - gamma c) - q
        Vec rhs =
            sub(matvec_transpose(m_, combine(1.0, w, -gamma_, c)), obj_.quad_q());
        return factor_->solve(rhs);
      }
      case AdmmObjectiveKind::kL1: {
        // prox of h/gamma at sign * (w/gamma - c)
        Vec v = combine(sign_ / gamma_, w, -sign_, c);
        return soft_threshold(v, obj_.l1_weight() / gamma_);
      }
      case AdmmObjectiveKind::kBox: {
        Vec v = combine(sign_ / gamma_, w, -sign_, c);
        return clamp(v, obj_.box_lo(), obj_.box_hi());
      }
    }
    throw InvalidArgumentError("unknown objective kind");
  }

 private:
  const AdmmObjective& obj_;
  const Matrix& m_;
  double gamma_ = 0.0;
  std::optional<SpdFactor> factor_;
  double sign_ = 0.0;
};

// One relaxed sweep (y, then the multiplier, then x) with the constraint
// images A x and B y carried along so callers never recompute them.
class StepCore {
 public:
  StepCore(const AdmmProblem& problem, double gamma)
      : p_(problem),
        gamma_(gamma),
        y_solver_(problem.g, problem.bmat, gamma, "y"),
        x_solver_(problem.f, problem.amat, gamma, "x") {}

  struct Out {
    Vec x;
    Vec y;
    Vec w_dg;
    Vec w_df;
    Vec ax;  // A x
    Vec by;  // B y
  };

  Out advance(const Vec& w_k, const Vec& ax_k, const Vec& by_k,
              double lambda) const {
    const double shift = 2.0 * lambda - 1.0;
    Vec r_prev = sub(add(ax_k, by_k), p_.rhs);
    // y-subproblem penalty center ax_k - rhs + (2 lambda - 1) r_prev
    Vec c = sub(ax_k, p_.rhs);
    axpy_inplace(shift, r_prev, c);
    Vec y = y_solver_.minimize(w_k, c);
    Vec by = matvec(p_.bmat, y);
    // w_dg update against the fresh y and the relaxation shift
    Vec w = w_k;
    axpy_inplace(-gamma_, ax_k, w);
    axpy_inplace(-gamma_, by, w);
    axpy_inplace(gamma_, p_.rhs, w);
    axpy_inplace(-gamma_ * shift, r_prev, w);
    // x-subproblem penalty center by - rhs
    Vec c2 = sub(by, p_.rhs);
    Vec x = x_solver_.minimize(w, c2);
    Vec ax = matvec(p_.amat, x);
    Vec w_df = w;
    axpy_inplace(-gamma_, ax, w_df);
    axpy_inplace(-gamma_, by, w_df);
    axpy_inplace(gamma_, p_.rhs, w_df);
    return Out{std::move(x), std::move(y), std::move(w),
               std::move(w_df), std::move(ax), std::move(by)};
  }

  // Governing variable z = w_dg + gamma (B y - rhs).
  Vec governing(const Out& s) const {
    Vec z = s.w_dg;
    axpy_inplace(gamma_, s.by, z);
    axpy_inplace(-gamma_, p_.rhs, z);
    return z;
  }

  bool finite(const Out& s) const {
    return all_finite(s.x) && all_finite(s.y) && all_finite(s.w_dg) &&
           all_finite(s.w_df);
  }

 private:
  const AdmmProblem& p_;
  double gamma_ = 0.0;
  BlockSolver y_solver_;
  BlockSolver x_solver_;
};

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgumentError("gamma must be positive and finite");
  }
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) {
    throw InvalidArgumentError("lambda must lie in (0, 1]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

AdmmObjective AdmmObjective::quadratic(Matrix p, Vec q) {
  if (q.empty()) {
    throw InvalidArgumentError("quadratic objective needs dimension >= 1");
  }
  FnPtr fn = make_quadratic(p, q);
  AdmmObjective out(AdmmObjectiveKind::kQuadratic, q.size(), std::move(fn));
  out.p_ = std::move(p);
  out.q_ = std::move(q);
  return out;
}

AdmmObjective AdmmObjective::l1(std::size_t dim, double weight) {
  if (dim == 0) throw InvalidArgumentError("l1 objective needs dimension >= 1");
  AdmmObjective out(AdmmObjectiveKind::kL1, dim, make_l1(weight));
  out.weight_ = weight;
  return out;
}

AdmmObjective AdmmObjective::box(Vec lo, Vec hi) {
  if (lo.empty()) throw InvalidArgumentError("box objective needs dimension >= 1");
  AdmmObjective out(AdmmObjectiveKind::kBox, lo.size(),
                    make_indicator(make_box(lo, hi)));
  out.lo_ = std::move(lo);
  out.hi_ = std::move(hi);
  return out;
}

void AdmmProblem::validate() const {
  if (rhs.empty() || amat.rows != rhs.size() || bmat.rows != rhs.size()) {
    throw InvalidArgumentError("coupling rows of A, B and rhs must agree");
  }
  if (f.dim() != amat.cols) {
    throw InvalidArgumentError("A column count does not match the dimension of f");
  }
  if (g.dim() != bmat.cols) {
    throw InvalidArgumentError("B column count does not match the dimension of g");
  }
  if (!(norm_a > 0.0) || !(norm_b > 0.0)) {
    throw InvalidArgumentError("constraint matrices must be nonzero");
  }
}

AdmmProblem make_admm_problem(AdmmObjective f, AdmmObjective g, Matrix amat,
                              Matrix bmat, Vec rhs) {
  if (amat.rows == 0 || amat.cols == 0 || bmat.rows == 0 || bmat.cols == 0) {
    throw InvalidArgumentError("constraint matrices must be nonempty");
  }
  AdmmProblem p{std::move(f), std::move(g), std::move(amat), std::move(bmat),
                std::move(rhs)};
  p.alpha_a = min_eigenvalue_gram_rows(p.amat);
  p.alpha_b = min_eigenvalue_gram_rows(p.bmat);
  p.norm_a = spectral_norm(p.amat);
  p.norm_b = spectral_norm(p.bmat);
  p.validate();
  return p;
}

DualConstants dual_constants(const AdmmProblem& problem) {
  problem.validate();
  DualConstants out;
  out.mu_df = problem.f.function()->beta() * problem.alpha_a;
  out.mu_dg = problem.g.function()->beta() * problem.alpha_b;
  out.beta_df = problem.f.function()->mu() / (problem.norm_a * problem.norm_a);
  out.beta_dg = problem.g.function()->mu() / (problem.norm_b * problem.norm_b);
  return out;
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

AdmmStepResult admm_step(const AdmmProblem& problem, double gamma,
                         double lambda, const AdmmState& state) {
  problem.validate();
  check_gamma(gamma);
  check_lambda(lambda);
  if (state.x.size() != problem.f.dim() || state.y.size() != problem.g.dim() ||
      state.w_dg.size() != problem.coupled_dim()) {
    throw InvalidArgumentError("state dimensions do not match the problem");
  }
  if (!all_finite(state.x) || !all_finite(state.y) || !all_finite(state.w_dg)) {
    throw InvalidArgumentError("state must be finite");
  }
  StepCore core(problem, gamma);
  StepCore::Out out = core.advance(state.w_dg, matvec(problem.amat, state.x),
                                   matvec(problem.bmat, state.y), lambda);
  return AdmmStepResult{std::move(out.x), std::move(out.y), std::move(out.w_dg),
                        std::move(out.w_df)};
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

AdmmSolution estimate_admm_solution(const AdmmProblem& problem, double gamma,
                                    const Vec& w0, std::size_t iters) {
  problem.validate();
  check_gamma(gamma);
  if (w0.size() != problem.coupled_dim()) {
    throw InvalidArgumentError("w0 dimension does not match the coupling rows");
  }
  if (!all_finite(w0)) throw InvalidArgumentError("w0 must be finite");
  if (iters == 0) throw InvalidArgumentError("iters must be positive");

  StepCore core(problem, gamma);
  const std::size_t d = problem.coupled_dim();
  StepCore::Out cur = core.advance(w0, zeros(d), zeros(d), 0.5);
  for (std::size_t k = 1; k < iters; ++k) {
    if (!core.finite(cur)) {
      throw DivergenceError("iterates stopped being finite at step " +
                            std::to_string(k) + " of the solution pre-run");
    }
    cur = core.advance(cur.w_dg, cur.ax, cur.by, 0.5);
  }
  if (!core.finite(cur)) {
    throw DivergenceError("solution pre-run ended on a nonfinite iterate");
  }
  AdmmSolution sol;
  sol.z = core.governing(cur);
  sol.objective = problem.objective(cur.x, cur.y);
  sol.x = std::move(cur.x);
  sol.y = std::move(cur.y);
  sol.w = std::move(cur.w_dg);
  return sol;
}

void AdmmConfig::validate() const {
  check_gamma(gamma);
  if (max_iters == 0) throw InvalidArgumentError("max_iters must be positive");
  if (residual_stop.has_value() &&
      (!(*residual_stop >= 0.0) || !std::isfinite(*residual_stop))) {
    throw InvalidArgumentError("residual_stop must be finite and nonnegative");
  }
}

AdmmTrace run_admm(const AdmmProblem& problem, const AdmmConfig& config,
                   const Vec& w0) {
  problem.validate();
  config.validate();
  const std::size_t d = problem.coupled_dim();
  if (w0.size() != d) {
    throw InvalidArgumentError("w0 dimension does not match the coupling rows");
  }
  if (!all_finite(w0)) throw InvalidArgumentError("w0 must be finite");

  const double gamma = config.gamma;
  StepCore core(problem, gamma);

  std::optional<AdmmSolution> ref = config.reference;
  if (ref) {
    if (ref->x.size() != problem.f.dim() || ref->y.size() != problem.g.dim() ||
        ref->w.size() != d || ref->z.size() != d) {
      throw InvalidArgumentError("reference solution dimensions do not match");
    }
  } else if (config.assert_inequalities) {
    ref = estimate_admm_solution(problem, gamma, w0, 10 * config.max_iters);
  }

  AdmmTrace trace;
  trace.gamma = gamma;
  trace.reference = ref;

  const DualConstants dc = dual_constants(problem);
  const bool f_quadratic = problem.f.kind() == AdmmObjectiveKind::kQuadratic;
  const bool g_quadratic = problem.g.kind() == AdmmObjectiveKind::kQuadratic;

  // Reference-derived data.
  Vec w_star, z_star, zc, ax_star, by_star;
  double obj_star = kNaN;
  if (ref) {
    w_star = ref->w;
    z_star = ref->z;
    zc = sub(z_star, w_star);
    ax_star = matvec(problem.amat, ref->x);
    by_star = matvec(problem.bmat, ref->y);
    obj_star = ref->objective;
  }

  const bool checks_on = config.assert_inequalities && ref.has_value();
  CheckAccumulator residual_identity("residual-identity", kExactIdentityTol);
  CheckAccumulator upper("upper-fundamental", kIneqTol);
  CheckAccumulator lower("lower-fundamental", kIneqTol);
  CheckAccumulator envelope("residual-envelope", kIneqTol);
  CheckAccumulator contraction("linear-contraction", kIneqTol);
  CheckAccumulator grad_g_identity("primal-gradient-g", kExactIdentityTol);
  CheckAccumulator grad_f_identity("primal-gradient-f", kExactIdentityTol);

  // The residual envelope needs plain relaxation and a smooth strongly convex
  // dual pair on the g side: beta = mu_g / ||B||^2 positive and gamma below
  // kKappa * beta.
  const double beta_env = dc.beta_dg;
  const bool envelope_on = checks_on && config.schedule.is_constant() &&
                           config.schedule.constant_value() == 0.5 &&
                           beta_env > 0.0 && gamma < kKappa * beta_env;
  double env_denom = 0.0;
  double env_w0_dist_sq = 0.0;
  if (envelope_on) {
    const double ratio = 1.0 + gamma / beta_env;
    env_denom = gamma * gamma * ratio * ratio *
                (beta_env * beta_env - gamma * gamma / (kKappa * kKappa));
  }

  std::vector<int> rate_cases;
  if (checks_on) {
    const double mu_f = problem.f.function()->mu();
    const double beta_f = problem.f.function()->beta();
    const double mu_g = problem.g.function()->mu();
    const double beta_g = problem.g.function()->beta();
    if (mu_g * beta_g * problem.alpha_b > 0.0) rate_cases.push_back(1);
    if (mu_f * beta_f * problem.alpha_a > 0.0) rate_cases.push_back(2);
    if (mu_f * beta_g * problem.alpha_b > 0.0) rate_cases.push_back(3);
    if (mu_g * beta_f * problem.alpha_a > 0.0) rate_cases.push_back(4);
  }

  double scale = 1.0;
  double norm_scale = 1.0;

  StepCore::Out cur = core.advance(w0, zeros(d), zeros(d), 0.5);
  if (envelope_on) env_w0_dist_sq = dist_sq(cur.w_dg, w_star);

  Vec erg_x, erg_y, erg_w_dg, erg_w_df;
  double lambda_sum = 0.0;
  double prev_obj = kNaN;
  bool stopped = false;

  for (std::size_t k = 0; k < config.max_iters; ++k) {
    if (!core.finite(cur)) {
      throw DivergenceError("iterates stopped being finite at step " +
                            std::to_string(k));
    }
    Vec r = sub(add(cur.ax, cur.by), problem.rhs);
    const double r_sq = nrm2_sq(r);
    Vec z = core.governing(cur);
    const double obj = problem.objective(cur.x, cur.y);

    if (config.residual_stop.has_value() && k >= 1 &&
        r_sq <= *config.residual_stop &&
        std::abs(obj - prev_obj) <=
            *config.residual_stop * std::max(1.0, std::abs(prev_obj))) {
      stopped = true;
      break;
    }

    if (k == 0 && ref) {
      scale = std::max(1.0, dist_sq(z, z_star));
      norm_scale = std::sqrt(scale);
    }

    const double lambda_k = config.schedule.lambda(k);
    lambda_sum += lambda_k;
    const double wgt = lambda_k / lambda_sum;
    if (k == 0) {
      erg_x = cur.x;
      erg_y = cur.y;
      erg_w_dg = cur.w_dg;
      erg_w_df = cur.w_df;
    } else {
      combine_into(1.0 - wgt, erg_x, wgt, cur.x, erg_x);
      combine_into(1.0 - wgt, erg_y, wgt, cur.y, erg_y);
      combine_into(1.0 - wgt, erg_w_dg, wgt, cur.w_dg, erg_w_dg);
      combine_into(1.0 - wgt, erg_w_df, wgt, cur.w_df, erg_w_df);
    }

    StepCore::Out nxt = core.advance(cur.w_dg, cur.ax, cur.by, lambda_k);
    if (checks_on) {
      Vec z_next = core.governing(nxt);
      // z^{k+1} - z^k = -2 gamma lambda_k (A x^k + B y^k - rhs)
      Vec predicted = z;
      axpy_inplace(-2.0 * gamma * lambda_k, r, predicted);
      residual_identity.observe(
          k, dist(predicted, z_next) / std::max(1.0, dist(z_next, z)));
      // Upper fundamental bound on the objective gap, centered at z* - w*.
      const double up_lhs = 4.0 * gamma * lambda_k * (obj - obj_star);
      const double up_rhs = dist_sq(z, zc) - dist_sq(z_next, zc) +
                            (1.0 - 1.0 / lambda_k) * dist_sq(z_next, z);
      upper.observe(k, (up_lhs - up_rhs) / scale);
      // Lower fundamental bound: gap >= <r, w*>.
      lower.observe(k, (dot(r, w_star) - (obj - obj_star)) / scale);
      if (envelope_on && k >= 1) {
        const double env = beta_env * beta_env * env_w0_dist_sq /
                           (env_denom * static_cast<double>(k * k));
        envelope.observe(k, (r_sq - env) / scale);
      }
      if (!rate_cases.empty()) {
        double factor = 1.0;
        for (int which : rate_cases) {
          factor = std::min(
              factor, admm_rate_constant(which, problem, gamma, lambda_k));
        }
        contraction.observe(k, (dist(z_next, z_star) -
                                factor * dist(z, z_star)) /
                                   norm_scale);
      }
      // First-order conditions of the subproblems on the quadratic sides.
      if (g_quadratic) {
        Vec grad = add(matvec(problem.g.quad_p(), cur.y), problem.g.quad_q());
        Vec btw = matvec_transpose(problem.bmat, cur.w_dg);
        grad_g_identity.observe(k, dist(grad, btw) / std::max(1.0, nrm2(btw)));
      }
      if (f_quadratic) {
        Vec grad = add(matvec(problem.f.quad_p(), cur.x), problem.f.quad_q());
        Vec atw = matvec_transpose(problem.amat, cur.w_df);
        grad_f_identity.observe(k, dist(grad, atw) / std::max(1.0, nrm2(atw)));
      }
    }

    trace.lambda.push_back(lambda_k);
    trace.lambda_sum.push_back(lambda_sum);
    trace.residual_norm_sq.push_back(r_sq);
    trace.fpr.push_back(4.0 * dist_sq(cur.w_df, cur.w_dg));
    trace.step_sq.push_back(lambda_k * lambda_k * trace.fpr.back());
    trace.objective.push_back(obj);
    if (ref) {
      trace.obj_gap_nonergodic.push_back(obj - obj_star);
      trace.obj_gap_ergodic.push_back(problem.objective(erg_x, erg_y) -
                                      obj_star);
      trace.s_df.push_back(
          s_term(dc.mu_df, dc.beta_df, cur.w_df, w_star, cur.ax, ax_star));
      trace.s_dg.push_back(
          s_term(dc.mu_dg, dc.beta_dg, cur.w_dg, w_star, cur.by, by_star));
      trace.dist_to_zstar.push_back(dist(z, z_star));
      trace.w_dg_dist.push_back(dist(cur.w_dg, w_star));
      trace.w_df_dist.push_back(dist(cur.w_df, w_star));
    } else {
      trace.obj_gap_nonergodic.push_back(kNaN);
      trace.obj_gap_ergodic.push_back(kNaN);
      trace.s_df.push_back(kNaN);
      trace.s_dg.push_back(kNaN);
      trace.dist_to_zstar.push_back(kNaN);
      trace.w_dg_dist.push_back(kNaN);
      trace.w_df_dist.push_back(kNaN);
    }
    trace.x.push_back(cur.x);
    trace.y.push_back(cur.y);
    trace.w_dg.push_back(cur.w_dg);
    trace.w_df.push_back(cur.w_df);
    trace.z.push_back(std::move(z));
    trace.erg_x.push_back(erg_x);
    trace.erg_y.push_back(erg_y);
    trace.erg_w_dg.push_back(erg_w_dg);
    trace.erg_w_df.push_back(erg_w_df);

    prev_obj = obj;
    cur = std::move(nxt);
  }

  if (!core.finite(cur)) {
    throw DivergenceError("run ended on a nonfinite iterate");
  }
  trace.stopped_on_residual = stopped;
  Vec r_fin = sub(add(cur.ax, cur.by), problem.rhs);
  trace.final_residual_sq = nrm2_sq(r_fin);
  trace.final_z = core.governing(cur);
  trace.final_x = std::move(cur.x);
  trace.final_y = std::move(cur.y);
  trace.final_w_dg = std::move(cur.w_dg);
  trace.final_w_df = std::move(cur.w_df);

  if (checks_on) {
    InequalityReport report;
    report.scale = scale;
    report.checks.push_back(residual_identity.take());
    report.checks.push_back(upper.take());
    report.checks.push_back(lower.take());
    report.checks.push_back(envelope.take());
    report.checks.push_back(contraction.take());
    report.checks.push_back(grad_g_identity.take());
    report.checks.push_back(grad_f_identity.take());
    trace.inequalities = std::move(report);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

double admm_rate_constant(int which_case, const AdmmProblem& problem,
                          double gamma, double lambda) {
  problem.validate();
  check_gamma(gamma);
  check_lambda(lambda);
  const double mu_f = problem.f.function()->mu();
  const double beta_f = problem.f.function()->beta();
  const double mu_g = problem.g.function()->mu();
  const double beta_g = problem.g.function()->beta();
  const double na_sq = problem.norm_a * problem.norm_a;
  const double nb_sq = problem.norm_b * problem.norm_b;
  const auto need = [](double value, const char* what) {
    if (!(value > 0.0)) {
      throw ConditionNotMetError(std::string("rate constant needs ") + what +
                                 " > 0");
    }
  };
  switch (which_case) {
    case 1: {
      need(mu_g, "mu(g)");
      need(beta_g, "beta(g)");
      need(problem.alpha_b, "alpha_B");
      const double den = 1.0 + gamma * nb_sq / mu_g;
      const double inner =
          4.0 * gamma * lambda * beta_g * problem.alpha_b / (den * den);
      return std::sqrt(std::max(0.0, 1.0 - inner));
    }
    case 2: {
      need(mu_f, "mu(f)");
      need(beta_f, "beta(f)");
      need(problem.alpha_a, "alpha_A");
      const double den = 1.0 + gamma * na_sq / mu_f;
      const double m = std::min(
          4.0 * gamma * beta_f * problem.alpha_a / (den * den), 1.0 - lambda);
      return std::sqrt(std::max(0.0, 1.0 - 0.5 * lambda * m));
    }
    case 3: {
      need(mu_f, "mu(f)");
      need(beta_g, "beta(g)");
      need(problem.alpha_b, "alpha_B");
      const double m = std::min({gamma * beta_g * problem.alpha_b,
                                 mu_f / (na_sq * gamma), 1.0 - lambda});
      return std::sqrt(std::max(0.0, 1.0 - (4.0 / 3.0) * lambda * m));
    }
    case 4: {
      need(mu_g, "mu(g)");
      need(beta_f, "beta(f)");
      need(problem.alpha_a, "alpha_A");
      const double m = std::min({gamma * beta_f * problem.alpha_a,
                                 mu_g / (nb_sq * gamma), 1.0 - lambda});
      return std::sqrt(std::max(0.0, 1.0 - (4.0 / 3.0) * lambda * m));
    }
    default:
      throw InvalidArgumentError("rate case must be 1, 2, 3 or 4");
  }
}

InequalityReport admm_implied_bounds(const AdmmTrace& trace,
                                     const std::vector<double>& factors,
                                     const Vec& w_star, const Vec& z_star,
                                     double gamma,
                                     std::optional<double> obj_star) {
  check_gamma(gamma);
  const std::size_t steps = trace.steps();
  if (steps == 0) throw InvalidArgumentError("trace has no recorded steps");
  if (trace.z.size() != steps || trace.w_dg.size() != steps ||
      trace.w_df.size() != steps) {
    throw InvalidArgumentError("trace must carry per-step vectors");
  }
  if (w_star.size() != trace.z[0].size() || z_star.size() != w_star.size()) {
    throw InvalidArgumentError("w* and z* must match the coupling dimension");
  }
  if (factors.size() + 1 < steps) {
    throw InvalidArgumentError(
        "need a contraction factor for every step but the last");
  }
  for (double c : factors) {
    if (!(c >= 0.0) || c > 1.0) {
      throw InvalidArgumentError("contraction factors must lie in [0, 1]");
    }
  }
  if (!obj_star.has_value() && trace.reference.has_value()) {
    obj_star = trace.reference->objective;
  }
  const bool obj_on = obj_star.has_value() && std::isfinite(*obj_star);

  const double d0_sq = dist_sq(trace.z[0], z_star);
  const double d0 = std::sqrt(d0_sq);
  const double w_norm = nrm2(w_star);
  const double scale = std::max(1.0, d0_sq);
  const double norm_scale = std::sqrt(scale);
  const Vec zw = sub(z_star, w_star);

  CheckAccumulator dual_g("implied-dual-g", kImpliedTol);
  CheckAccumulator dual_f("implied-dual-f", kImpliedTol);
  CheckAccumulator fpr("implied-fpr", kImpliedTol);
  CheckAccumulator resid("implied-residual", kImpliedTol);
  CheckAccumulator obj_up("implied-objective-upper", kImpliedTol);
  CheckAccumulator obj_lo("implied-objective-lower", kImpliedTol);

  double prod = 1.0;
  for (std::size_t k = 1; k < steps; ++k) {
    prod *= factors[k - 1];
    const double prod_sq = prod * prod;
    // gamma (B y^k - B y*) = (z^k - w_dg^k) - (z* - w*)
    Vec gby = sub(sub(trace.z[k], trace.w_dg[k]), zw);
    dual_g.observe(k, (dist_sq(trace.w_dg[k], w_star) + nrm2_sq(gby) -
                       d0_sq * prod_sq) /
                          scale);
    // gamma r^k = w_dg^k - w_df^k and
    // gamma (A x^k - A x*) = gamma r^k - (z^k - w_dg^k) + (z* - w*)
    Vec gr = sub(trace.w_dg[k], trace.w_df[k]);
    Vec gax = add(sub(gr, sub(trace.z[k], trace.w_dg[k])), zw);
    dual_f.observe(k, (dist_sq(trace.w_df[k], w_star) + nrm2_sq(gax) -
                       d0_sq * prod_sq) /
                          scale);
    // ||z^{k+1} - z^k|| against the relaxation-damped envelope.
    const double lam = trace.lambda[k];
    if (lam < 1.0) {
      fpr.observe(k, (std::sqrt(trace.step_sq[k]) -
                      std::sqrt(lam / (1.0 - lam)) * d0 * prod) /
                         norm_scale);
    }
    resid.observe(k, (nrm2_sq(gr) / (gamma * gamma) -
                      d0_sq * prod_sq / (gamma * gamma)) /
                         scale);
    if (obj_on) {
      const double gap = trace.objective[k] - *obj_star;
      const double drop = d0 * prod / gamma;
      obj_up.observe(k, (gap - (d0 + w_norm) * drop) / scale);
      obj_lo.observe(k, (-w_norm * drop - gap) / scale);
    }
  }

  InequalityReport report;
  report.scale = scale;
  report.checks.push_back(dual_g.take());
  report.checks.push_back(dual_f.take());
  report.checks.push_back(fpr.take());
  report.checks.push_back(resid.take());
  report.checks.push_back(obj_up.take());
  report.checks.push_back(obj_lo.take());
  return report;
}

AdmmGapTerms primal_dual_gap_terms(const AdmmProblem& problem,
                                   const AdmmTrace& trace, const Vec& w_star,
                                   const Vec& x_star, const Vec& y_star) {
  problem.validate();
  const std::size_t steps = trace.steps();
  if (steps == 0) throw InvalidArgumentError("trace has no recorded steps");
  if (trace.x.size() != steps || trace.y.size() != steps ||
      trace.w_dg.size() != steps || trace.w_df.size() != steps ||
      trace.erg_x.size() != steps || trace.erg_y.size() != steps ||
      trace.erg_w_dg.size() != steps || trace.erg_w_df.size() != steps) {
    throw InvalidArgumentError("trace must carry per-step vectors");
  }
  if (w_star.size() != problem.coupled_dim() ||
      x_star.size() != problem.f.dim() || y_star.size() != problem.g.dim()) {
    throw InvalidArgumentError("solution dimensions do not match the problem");
  }
  check_gamma(trace.gamma);

  const DualConstants dc = dual_constants(problem);
  const Vec ax_star = matvec(problem.amat, x_star);
  const Vec by_star = matvec(problem.bmat, y_star);
  // z* = w* + gamma (B y* - rhs)
  Vec z_star = w_star;
  axpy_inplace(trace.gamma, by_star, z_star);
  axpy_inplace(-trace.gamma, problem.rhs, z_star);
  const double d0_sq = dist_sq(trace.z[0], z_star);

  AdmmGapTerms out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < steps; ++k) {
    const double sdf = s_term(dc.mu_df, dc.beta_df, trace.w_df[k], w_star,
                              matvec(problem.amat, trace.x[k]), ax_star);
    const double sdg = s_term(dc.mu_dg, dc.beta_dg, trace.w_dg[k], w_star,
                              matvec(problem.bmat, trace.y[k]), by_star);
    out.s_df.push_back(sdf);
    out.s_dg.push_back(sdg);
    best = std::min(best, sdf + sdg);
    out.s_sum_best.push_back(best);
    // Averages are linear, so A xbar is the average of the A x^i.
    out.ergodic_f_term.push_back(
        2.0 * s_term(dc.mu_df, dc.beta_df, trace.erg_w_df[k], w_star,
                     matvec(problem.amat, trace.erg_x[k]), ax_star));
    out.ergodic_g_term.push_back(
        2.0 * s_term(dc.mu_dg, dc.beta_dg, trace.erg_w_dg[k], w_star,
                     matvec(problem.bmat, trace.erg_y[k]), by_star));
    out.ergodic_bound.push_back(d0_sq /
                                (4.0 * trace.gamma * trace.lambda_sum[k]));
  }
  return out;
}

}  // namespace splitkit
