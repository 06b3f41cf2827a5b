// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_FEASIBILITY_HPP_
#define SPLITKIT_FEASIBILITY_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/linalg.hpp"
#include "splitkit/prox.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/splitting.hpp"
#include "splitkit/vec.hpp"

// Set-feasibility solvers: the two-set relaxed splitting iteration on
// squared-distance penalties with per-iteration stepsizes, alternating
// projections (MAP) as its exact special case, a parallel multi-set
// variant, gap diagnostics for infeasible pairs, and linear-rate
// certificates driven by metric regularity of the set collection.

namespace splitkit {

// Declared regularity data: dist(x, C_1 ∩ ... ∩ C_m) <= mu_rho * max_i
// dist(x, C_i) for all x in B(0, rho). This is an input the caller
// vouches for, not something the solver can certify; see
// sample_mu_lower_bound for an empirical probe that only ever
// underestimates the true constant.
struct RegularityBound {
  double mu_rho = 1.0;  // must be >= 1
  double rho = 0.0;     // ball radius the bound holds on; 0 means everywhere
};

// A finite collection of closed convex sets in a common space whose
// intersection (possibly empty) is the target.
struct FeasibilityProblem {
  std::vector<SetPtr> sets;  // at least two entries
  std::optional<RegularityBound> regularity;

  std::size_t dim() const;
  // Throws InvalidArgumentError on fewer than two sets, a null entry,
  // mismatched dimensions, mu_rho < 1, or rho < 0.
  void validate() const;
};

// Per-iteration implicit stepsizes (gamma_{f,k}, gamma_{g,k}), both
// positive. Constant pairs expose their values so parameter-gated fast
// paths can recognize them.
class StepsizePair {
 public:
  static StepsizePair constant(double gamma_f, double gamma_g);
  static StepsizePair from_functions(std::function<double(std::size_t)> gamma_f,
                                     std::function<double(std::size_t)> gamma_g);

  // Throw InvalidArgumentError when the sequence emits a non-positive or
  // non-finite value.
  double gamma_f(std::size_t k) const;
  double gamma_g(std::size_t k) const;

  bool is_constant() const { return constant_; }

 private:
  StepsizePair(std::function<double(std::size_t)> f,
               std::function<double(std::size_t)> g, bool constant);

  std::function<double(std::size_t)> f_;
  std::function<double(std::size_t)> g_;
  bool constant_ = false;
};

struct FeasStepResult {
  Vec z_next;
  Vec x_g;
  Vec x_f;
};

// One relaxed step on the penalty pair (gamma_f dist^2 to cf,
// gamma_g dist^2 to cg):
//   x_g    = prox of gamma_g dist^2_cg at z
//   x_f    = prox of gamma_f dist^2_cf at 2 x_g - z
//   z_next = z + 2 lambda (x_f - x_g)
// At gamma_f = gamma_g = 1/2 and lambda = 1 the recursion collapses to
// plain alternating projections, and that branch is taken literally so
// z_next equals cf.project(cg.project(z)) to the last bit.
FeasStepResult feas_prs_step(const ConvexSet& cf, const ConvexSet& cg,
                             double gamma_f, double gamma_g, double lambda,
                             const Vec& z);

struct FeasibilityConfig {
  StepsizePair stepsizes = StepsizePair::constant(0.5, 0.5);
  RelaxationSchedule schedule = RelaxationSchedule::constant(1.0);
  std::size_t max_iters = 100;
  // Stop once fpr_k <= fpr_stop, checked from k >= 1 so at least one step
  // is always taken.
  double fpr_stop = 0.0;
  // A point of cf ∩ cg; enables the upper-inequality check.
  std::optional<Vec> intersection_point;
  // Projector onto cf ∩ cg; enables the intersection-distance column and,
  // together with regularity, the per-step linear-decrease check.
  SetPtr intersection;
  std::optional<RegularityBound> regularity;
  bool assert_inequalities = false;

  // Throws InvalidArgumentError on max_iters == 0, fpr_stop < 0, an
  // intersection_point that is not finite, mu_rho < 1, or rho < 0.
  void validate() const;
};

// Record of a two-set run. Scalar histories have one entry per completed
// step k; distances are measured at z^k before the step.
struct FeasibilityTrace {
  bool stopped_on_fpr = false;

  std::vector<double> lambda;
  std::vector<double> gamma_f;
  std::vector<double> gamma_g;
  std::vector<double> fpr;       // 4 ||x_f - x_g||^2
  std::vector<double> step_sq;   // lambda_k^2 * fpr_k
  std::vector<double> dist_f;    // dist(z^k, cf)
  std::vector<double> dist_g;    // dist(z^k, cg)
  // dist(z^k, cf ∩ cg); empty unless an intersection projector was given.
  std::vector<double> dist_intersection;

  std::vector<Vec> z;
  std::vector<Vec> x_g;
  std::vector<Vec> x_f;

  Vec final_z;
  double final_fpr = 0.0;
  std::optional<InequalityReport> inequalities;

  std::size_t steps() const { return fpr.size(); }
};

// Runs the two-set iteration from z0. With assert_inequalities, each step
// verifies (entries are recorded in the report in this order):
//   "feas-upper"       8 lambda (gamma_f dist^2(x_f, cf) +
//                      gamma_g dist^2(x_g, cg)) <= ||z - x*||^2 -
//                      ||z+ - x*||^2 + (1 - 1/lambda) ||z+ - z||^2,
//                      normalized by max(1, ||z0 - x*||^2)
//   "dist-identity-g"  dist(x_g, cg) = dist(z, cg) / (2 gamma_g + 1)
//   "dist-identity-f"  dist(x_f, cf) = dist(2 x_g - z, cf) / (2 gamma_f + 1)
//   "linear-decrease"  dist(z+, cf ∩ cg) <= C_k * dist(z, cf ∩ cg) with
//                      C_k = feas_contraction_constant(...); steps whose
//                      endpoints leave B(0, rho) are skipped when rho > 0
// The identity checks recompute distances through fresh projections, so
// they exercise the projector rather than the recursion's own algebra.
FeasibilityTrace run_two_set(const ConvexSet& cf, const ConvexSet& cg,
                             const FeasibilityConfig& config, const Vec& z0);

// Alternating projections z^{k+1} = cf.project(cg.project(z^k)), run
// through the (1/2, 1/2, 1) parameterization above. The config overload
// keeps the caller's diagnostics settings (projector, regularity,
// checks) and overrides the iteration parameters with the MAP ones.
FeasibilityTrace map_run(const ConvexSet& cf, const ConvexSet& cg,
                         const Vec& z0, std::size_t max_iters);
FeasibilityTrace map_run(const ConvexSet& cf, const ConvexSet& cg,
                         const Vec& z0, std::size_t max_iters,
                         FeasibilityConfig config);

// Gap diagnostics from a recorded run, aimed at infeasible pairs. The
// estimate at step k is cg_proj - cf.project(cg_proj) evaluated at z^k
// with cg_proj = cg.project(z^k); the reference is the same quantity at
// the final iterate. For a feasible pair the estimates collapse to zero.
struct GapDiagnostics {
  std::vector<Vec> gap_vectors;       // per-step estimates
  std::vector<double> gap_norms;      // their norms
  Vec gap_estimate;                   // estimate at the final iterate
  // Running min over i <= k of ||gap_i - gap_estimate||^2; nonincreasing.
  std::vector<double> best_error_sq;
  // Set when the norm history keeps climbing through the trailing half of
  // the run and at least doubles over it; the limiting displacement then
  // exists only as a direction, not as a realized pair of points.
  bool divergence_suspected = false;

  // "gap estimate stabilized" or "gap not attained (suspected)".
  std::string summary() const;
};

// Throws InvalidArgumentError when the trace carries no iterate history.
GapDiagnostics map_infeasible_diagnostics(const ConvexSet& cf,
                                          const ConvexSet& cg,
                                          const FeasibilityTrace& trace);

// One parallel step on m blocks stacked consecutively in R^{m n}. With
// zbar the mean block, each block i updates independently:
//   x_g_i    = z_i / (2 gamma_g + 1) + 2 gamma_g zbar / (2 gamma_g + 1)
//   x_f_i    = (2 x_g_i - z_i) / (2 gamma_f + 1)
//              + 2 gamma_f P_i(2 x_g_i - z_i) / (2 gamma_f + 1)
//   z_next_i = z_i + 2 lambda (x_f_i - x_g_i)
// which is the two-set recursion on (C_1 x ... x C_m, diagonal) in
// R^{m n}. Blocks only read z and the mean, so they are dispatched to
// worker threads when the hardware has more than one; the result does not
// depend on the dispatch. At (1/2, 1/2, 1) each block collapses to
// z_next_i = P_i(zbar) exactly, whose mean is one averaged-MAP step.
Vec multi_set_step(const FeasibilityProblem& problem, double gamma_f,
                   double gamma_g, double lambda, const Vec& zz);

// x_next = (1/m) sum_i P_i(x): the mean-block view of multi_set_step at
// (1/2, 1/2, 1).
Vec averaged_map_step(const FeasibilityProblem& problem, const Vec& x);

// Per-step decrease factor of dist(z^k, cf ∩ cg) for the two-set
// iteration under mu_rho-regularity, clamped to [0, 1]:
//   (1 - 4 lambda min{g/(2g+1)^2, f/(2f+1)^2}
//          / (mu^2 max{16 g^2 / (2g+1)^2, 1}))^(1/2)
// with f = gamma_f, g = gamma_g. Decreasing in lambda, increasing in
// mu_rho, minimized at gamma_f = gamma_g = 1/2, and tending to 1 as
// either stepsize grows. At (1/2, 1/2, 1) it equals
// sqrt(1 - 1/(2 mu_rho^2)).
double feas_contraction_constant(double gamma_f, double gamma_g,
                                 double lambda, double mu_rho);

// Strengthened MAP factor sqrt(1 - 1/mu_rho^2). Alternating projections
// start each step on cf, which removes one of the two distance terms the
// generic constant has to pay for.
double map_contraction_constant(double mu_rho);

// Regularity constant of the pair {C_1 x ... x C_m, diagonal} implied by
// a mu_rho-regular collection {C_1, ..., C_m}: sqrt(1 + 4 m mu_rho^2).
double product_space_mu(std::size_t m, double mu_rho);

// Regularity bound 2 / sqrt(1 - c) for two closed subspaces whose
// Friedrichs angle has cosine c. Throws InvalidArgumentError unless
// 0 <= c < 1.
double subspace_mu_bound(double friedrichs_cos);

// ---- Closed-form intersection projectors ----
//
// Built from the defining data of the operands, which is the only regime
// where the projector is certified; anything else needs a caller-supplied
// projector. All three throw InvalidArgumentError when the intersection
// is empty or the inputs are inconsistent.

// Intersection of {x : a1 x = b1} and {x : a2 x = b2}, by stacking.
SetPtr affine_intersection(const Matrix& a1, const Vec& b1, const Matrix& a2,
                           const Vec& b2);
// Intersection of two boxes: componentwise max of lows, min of highs.
SetPtr box_intersection(const Vec& lo1, const Vec& hi1, const Vec& lo2,
                        const Vec& hi2);
// Box cut by the axis-aligned halfspace {x : sign * x[axis] <= bound},
// sign in {+1, -1}: one bound of the box tightens.
SetPtr box_halfspace_intersection(Vec lo, Vec hi, std::size_t axis,
                                  double sign, double bound);

// 2 ||z0|| + 2 dist(z0, intersection): a ball radius that contains the
// whole trajectory, since every iterate stays within the starting
// distance of its limit in the intersection.
double default_regularity_radius(const Vec& z0, const ConvexSet& intersection);

// Largest observed ratio dist(x, intersection) / max_i dist(x, C_i) over
// uniform draws from B(0, rho). A lower bound on the true mu_rho, useful
// for sanity-checking a declared constant, never for certifying one.
// Draws landing in every set are skipped; returns 1 if all are.
double sample_mu_lower_bound(const FeasibilityProblem& problem,
                             const ConvexSet& intersection, double rho,
                             std::size_t samples, Rng& rng);

}  // namespace splitkit

#endif  // SPLITKIT_FEASIBILITY_HPP_
