// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT
//
// Relaxed alternating-direction method of multipliers for
//
//   minimize f(x) + g(y)  subject to  A x + B y = b,
//
// driven through the dual: the iteration is relaxed Peaceman-Rachford on the
// dual functions d_f(w) = f*(A^T w) and d_g(w) = g*(B^T w) + <b, w>, with the
// governing variable z^k = w_dg^k + gamma (B y^k - b).  Subproblems are solved
// in closed form for a small catalog of objectives (quadratic with any
// constraint matrix, l1 or box with +/- identity).  Runs can verify the
// per-iteration identities and bounds that the dual view implies.

#ifndef SPLITKIT_ADMM_HPP_
#define SPLITKIT_ADMM_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "splitkit/linalg.hpp"
#include "splitkit/prox.hpp"
#include "splitkit/splitting.hpp"
#include "splitkit/vec.hpp"

namespace splitkit {

// ---------------------------------------------------------------------------
// Problem description
// ---------------------------------------------------------------------------

// Objective kinds with closed-form subproblem updates.
enum class AdmmObjectiveKind {
  kQuadratic,  // (1/2) v^T P v + q^T v, P symmetric PSD; any constraint matrix
  kL1,         // weight * ||v||_1; constraint matrix must be +I or -I
  kBox,        // indicator of {lo <= v <= hi}; constraint matrix +I or -I
};

// One side of the separable objective.  Construct through the factories; they
// validate shapes and build the matching ProxFunction (source of mu/beta).
class AdmmObjective {
 public:
  static AdmmObjective quadratic(Matrix p, Vec q);
  static AdmmObjective l1(std::size_t dim, double weight = 1.0);
  static AdmmObjective box(Vec lo, Vec hi);

  AdmmObjectiveKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  double value(const Vec& v) const { return fn_->eval(v); }

  // Underlying catalog function; carries mu(), beta(), eval(), prox().
  const FnPtr& function() const { return fn_; }

  // Quadratic data; only valid when kind() == kQuadratic.
  const Matrix& quad_p() const { return p_; }
  const Vec& quad_q() const { return q_; }
  // L1 weight; only valid when kind() == kL1.
  double l1_weight() const { return weight_; }
  // Box bounds; only valid when kind() == kBox.
  const Vec& box_lo() const { return lo_; }
  const Vec& box_hi() const { return hi_; }

 private:
  AdmmObjective(AdmmObjectiveKind kind, std::size_t dim, FnPtr fn)
      : kind_(kind), dim_(dim), fn_(std::move(fn)) {}

  AdmmObjectiveKind kind_;
  std::size_t dim_;
  FnPtr fn_;
  Matrix p_{0, 0};
  Vec q_;
  double weight_ = 0.0;
  Vec lo_;
  Vec hi_;
};

// Coupled two-block problem.  Build with make_admm_problem, which fills in the
// spectral data (alpha_* = smallest eigenvalue of M M^T, norm_* = ||M||_2).
struct AdmmProblem {
  AdmmObjective f;
  AdmmObjective g;
  Matrix amat;  // d x n1, multiplies x
  Matrix bmat;  // d x n2, multiplies y
  Vec rhs;      // d, right-hand side of A x + B y = rhs

  double alpha_a = 0.0;
  double alpha_b = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;

  std::size_t coupled_dim() const { return rhs.size(); }
  double objective(const Vec& x, const Vec& y) const {
    return f.value(x) + g.value(y);
  }

  // Throws InvalidArgumentError on shape mismatches or when a constraint
  // matrix is identically zero.
  void validate() const;
};

AdmmProblem make_admm_problem(AdmmObjective f, AdmmObjective g, Matrix amat,
                              Matrix bmat, Vec rhs);

// Strong convexity / smoothness constants of the dual pair transferred from
// the primal data: a (1/beta)-Lipschitz gradient plus a rank condition on the
// constraint matrix makes the dual strongly convex, and strong convexity of a
// primal function makes its dual smooth.
struct DualConstants {
  double mu_df = 0.0;    // f.beta * alpha_a
  double mu_dg = 0.0;    // g.beta * alpha_b
  double beta_df = 0.0;  // f.mu / norm_a^2
  double beta_dg = 0.0;  // g.mu / norm_b^2
};

DualConstants dual_constants(const AdmmProblem& problem);

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

// State entering a step: primal blocks x^k, y^k and the multiplier estimate
// w_dg^k.  A fresh run starts from x = 0, y = 0, w_dg = w0 and a bootstrap
// half-relaxed step (lambda = 1/2), which run_admm performs internally.
struct AdmmState {
  Vec x;
  Vec y;
  Vec w_dg;
};

struct AdmmStepResult {
  Vec x;     // x^{k+1}
  Vec y;     // y^{k+1}
  Vec w_dg;  // w_dg^{k+1}
  Vec w_df;  // w_df^{k+1} = w_dg^{k+1} - gamma (A x^{k+1} + B y^{k+1} - rhs)
};

// One relaxed step: minimize over y with the relaxation-shifted penalty
// center, update the multiplier, then minimize over x against the fresh
// multiplier.  Throws UnsupportedSubproblemError when an objective lies
// outside the closed-form catalog for its constraint matrix, and
// SingularSystemError when a quadratic normal matrix P + gamma M^T M is not
// numerically SPD.
AdmmStepResult admm_step(const AdmmProblem& problem, double gamma,
                         double lambda, const AdmmState& state);

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

// A solution bundle used as the reference for gaps, distances and checks.
struct AdmmSolution {
  Vec x;
  Vec y;
  Vec w;  // multiplier w* (fixed point of the dual proximal map)
  Vec z;  // governing-variable fixed point z*
  double objective = 0.0;
};

// Estimate a solution by running `iters` plain steps (lambda = 1/2) from w0.
AdmmSolution estimate_admm_solution(const AdmmProblem& problem, double gamma,
                                    const Vec& w0, std::size_t iters);

struct AdmmConfig {
  double gamma = 1.0;
  RelaxationSchedule schedule = RelaxationSchedule::constant(0.5);
  std::size_t max_iters = 100;

  // When set, stop at the first k >= 1 with ||r^k||^2 <= residual_stop and
  // |obj^k - obj^{k-1}| <= residual_stop * max(1, |obj^{k-1}|); the value 0
  // stops only at exact fixed points.  When unset, run max_iters steps.
  std::optional<double> residual_stop;

  // Verify the per-iteration identities and bounds along the run.
  bool assert_inequalities = false;

  // Reference solution for gaps and checks.  When absent and needed, one is
  // estimated by a pre-run of 10 * max_iters steps at lambda = 1/2.
  std::optional<AdmmSolution> reference;

  void validate() const;
};

struct AdmmTrace {
  double gamma = 0.0;
  bool stopped_on_residual = false;

  // Per-iteration scalars, index k = 0, 1, ...
  std::vector<double> lambda;            // lambda_k
  std::vector<double> lambda_sum;        // sum of lambda_0..lambda_k
  std::vector<double> residual_norm_sq;  // ||A x^k + B y^k - rhs||^2
  std::vector<double> fpr;               // 4 ||w_df^k - w_dg^k||^2
  std::vector<double> step_sq;           // lambda_k^2 * fpr_k
  std::vector<double> objective;         // f(x^k) + g(y^k)
  // NaN when no reference is available:
  std::vector<double> obj_gap_nonergodic;
  std::vector<double> obj_gap_ergodic;
  std::vector<double> s_df;  // max-type dual term at (w_df^k, w*)
  std::vector<double> s_dg;  // max-type dual term at (w_dg^k, w*)
  std::vector<double> dist_to_zstar;
  std::vector<double> w_dg_dist;
  std::vector<double> w_df_dist;

  // Per-iteration vectors.
  std::vector<Vec> x;
  std::vector<Vec> y;
  std::vector<Vec> w_dg;
  std::vector<Vec> w_df;
  std::vector<Vec> z;
  // Running relaxation-weighted averages of the same iterates.
  std::vector<Vec> erg_x;
  std::vector<Vec> erg_y;
  std::vector<Vec> erg_w_dg;
  std::vector<Vec> erg_w_df;

  // State after the last step taken (one past the recorded iterates).
  Vec final_x;
  Vec final_y;
  Vec final_w_dg;
  Vec final_w_df;
  Vec final_z;
  double final_residual_sq = 0.0;

  std::optional<AdmmSolution> reference;
  std::optional<InequalityReport> inequalities;

  std::size_t steps() const { return residual_norm_sq.size(); }
};

// Run relaxed ADMM from multiplier seed w0.  Throws DivergenceError when an
// iterate stops being finite.
AdmmTrace run_admm(const AdmmProblem& problem, const AdmmConfig& config,
                   const Vec& w0);

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

// Per-step linear convergence factor for ||z^{k+1} - z*|| <= C ||z^k - z*||.
// The four cases need different positive products; a vanishing product raises
// ConditionNotMetError naming the missing ingredient.
//   case 1: mu_g, g.beta, alpha_b      case 2: mu_f, f.beta, alpha_a
//   case 3: mu_f, g.beta, alpha_b      case 4: mu_g, f.beta, alpha_a
double admm_rate_constant(int which_case, const AdmmProblem& problem,
                          double gamma, double lambda);

// Check the distance, residual and objective envelopes implied by per-step
// contraction factors.  `factors[i]` bounds the contraction of step i, so
// iterate k is measured against ||z^0 - z*||^2 * prod_{i<k} factors[i]^2;
// violations are reported, not thrown.  `obj_star` defaults to the trace
// reference objective when present; without it the objective envelopes are
// marked not applicable.
InequalityReport admm_implied_bounds(const AdmmTrace& trace,
                                     const std::vector<double>& factors,
                                     const Vec& w_star, const Vec& z_star,
                                     double gamma,
                                     std::optional<double> obj_star = {});

// Max-type dual gap terms along a trace, nonergodic and ergodic.
struct AdmmGapTerms {
  std::vector<double> s_df;        // at (w_df^k, w*)
  std::vector<double> s_dg;        // at (w_dg^k, w*)
  std::vector<double> s_sum_best;  // running min of s_df + s_dg
  // Factor-free max terms at the relaxation-weighted averages, and the
  // certified envelope ||z^0 - z*||^2 / (4 gamma Lambda_k) for their sum.
  std::vector<double> ergodic_f_term;
  std::vector<double> ergodic_g_term;
  std::vector<double> ergodic_bound;
};

AdmmGapTerms primal_dual_gap_terms(const AdmmProblem& problem,
                                   const AdmmTrace& trace, const Vec& w_star,
                                   const Vec& x_star, const Vec& y_star);

}  // namespace splitkit

#endif  // SPLITKIT_ADMM_HPP_
