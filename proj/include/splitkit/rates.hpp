// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_RATES_HPP_
#define SPLITKIT_RATES_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "splitkit/splitting.hpp"

// Theoretical rate constants and envelopes for the splitting solvers,
// empirical decay fitting, and pass/fail certification of rate claims
// against recorded scalar sequences. Everything here is a pure function
// over immutable data and safe to call concurrently.

namespace splitkit {

// Default relative tolerances: proven inequalities must hold to rounding,
// fitted diagnostics are compared loosely.
inline constexpr double kProvenRateTol = 1e-7;
inline constexpr double kFittedRateTol = 0.10;

// Stepsize-regime thresholds recomputed from their defining cubics by
// bisection (driven to the last representable interval, residual below
// 1e-14). The frozen literals in constants.hpp mirror these so the solver
// gates avoid the bisection; the tests cross-check the two.
struct RateConstants {
  double kappa = 0.0;       // positive root of x^3 + x^2 - 2x - 1
  double rho = 0.0;         // positive root of x^3 - 2x^2 - 1
  double theta_star = 0.0;  // 1 - 1/kappa^2
};

RateConstants rate_constants();

// Which regularity pattern guarantees a per-step linear contraction of
// ||z^k - z*|| for the relaxed splitting iteration.
enum class LinearRateCase {
  kGRegular,  // the first-proxed function is strongly convex and smooth
  kFRegular,  // the reflected-side function is strongly convex and smooth
  kMixed,     // strong convexity and smoothness split across the pair
};

// Contraction factor C with ||z^{k+1} - z*|| <= C ||z^k - z*||, clamped to
// [0, 1]. mu and beta are the strong-convexity modulus and the smoothness
// constant the case consumes; for the mixed case they come from different
// functions. Requires lambda in [0, 1] and a positive finite gamma
// (InvalidArgumentError); throws ConditionNotMetError when mu or beta
// vanishes.
double prs_linear_constant(LinearRateCase which, double mu, double beta,
                           double gamma, double lambda);

// Objective-error envelope at iteration k for the half-relaxed iteration
// when the first-proxed function has a (1/beta)-Lipschitz gradient.
// best_iterate bounds the smallest error seen through k. For stepsizes
// below kRho * beta it equals dist_xg0_sq / (2 gamma (k+1)); at and beyond
// that threshold a correction proportional to dist_z0_sq is added.
// every_iterate bounds the error at k itself and is present exactly when
// gamma < kKappa * beta.
struct SmoothObjectiveBound {
  double best_iterate = 0.0;
  std::optional<double> every_iterate;
};

// dist_xg0_sq = ||x_g^0 - x*||^2 and dist_z0_sq = ||z^0 - z*||^2.
SmoothObjectiveBound smooth_objective_bound(double beta, double gamma,
                                            std::size_t k, double dist_xg0_sq,
                                            double dist_z0_sq);

// Fixed-point-residual envelopes, evaluated at iteration k.
enum class FprEnvelopeKind {
  // ||T z^k - z^k||^2 <= initial_dist_sq / (tau_min (k+1)) for any
  // relaxation schedule with tau_min = inf lambda_i (1 - lambda_i) > 0.
  kGeneric,
  // ||z^k - z^{k+1}||^2 <= beta^2 initial_dist_sq
  //   / (k^2 (1 + gamma/beta)^2 (beta^2 - gamma^2/kKappa^2))
  // for the half-relaxed iteration with a smooth first-proxed function,
  // gated on gamma < kKappa * beta and k >= 1.
  kSmoothDrs,
};

struct FprEnvelopeParams {
  // ||z^0 - z*||^2 for kGeneric; ||x_g^0 - x*||^2 for kSmoothDrs.
  double initial_dist_sq = 0.0;
  double tau_min = 0.0;  // kGeneric only
  double beta = 0.0;     // kSmoothDrs only
  double gamma = 0.0;    // kSmoothDrs only
};

// Throws ConditionNotMetError when the selected envelope's hypothesis
// fails (tau_min, the stepsize gate, or k = 0 for kSmoothDrs) and
// InvalidArgumentError on malformed parameters.
double fpr_bound(FprEnvelopeKind kind, const FprEnvelopeParams& params,
                 std::size_t k);

// Outcome of checking a nonnegative sequence (a_k) against the summable-
// series facts under a relaxation schedule. Checks are normalized by
// max(1, weighted_sum) and thresholded at kProvenRateTol.
struct SummabilityReport {
  // sum of lambda_i a_i over the window.
  double weighted_sum = 0.0;
  // Window heuristic for convergence of the full series: the last-half
  // contribution must stay below a quarter of the total. When false, the
  // bound checks below are left not applicable.
  bool summable = false;
  // a_k nonincreasing over the window.
  bool monotone = false;
  // a_k <= weighted_sum / Lambda_k; applicable iff summable and monotone.
  InequalityCheck monotone_bound;
  // Running minima of a: always nonincreasing, so the same bound applies
  // to them even when a itself is not monotone.
  std::vector<double> best_values;
  InequalityCheck best_bound;
  // Telescoping-witness results, present when a witness was supplied.
  // witness_check validates lambda_k a_k <= b_k - b_{k+1} pointwise
  // (normalized by max(1, b_0)); the indexed sum then obeys
  // sum (i+1) lambda_i a_i <= sum b_i.
  std::optional<InequalityCheck> witness_check;
  double weighted_indexed_sum = 0.0;
  double witness_sum = 0.0;
  bool faster_rate_holds = false;
};

SummabilityReport check_summable_rates(const std::vector<double>& values,
                                       const RelaxationSchedule& schedule);
// The witness must have values.size() + 1 entries (one per iterate
// endpoint of the telescoping differences).
SummabilityReport check_summable_rates(const std::vector<double>& values,
                                       const RelaxationSchedule& schedule,
                                       const std::vector<double>& witness);

// Empirical decay diagnostics over a tail window: the trailing
// tail_fraction of the samples, widened to at least 100 points when the
// sequence has that many.
struct EmpiricalRate {
  double exponent = 0.0;       // least-squares slope of log a_k vs log(k+1)
  double linear_factor = 0.0;  // geometric mean of a_{k+1}/a_k on the window
  std::size_t window_begin = 0;
  std::size_t window_size = 0;
};

// Throws DegenerateSequenceError when the window has fewer than 10 points
// or is not strictly positive (an exact zero is reported as finite
// convergence); InvalidArgumentError on nonfinite values or a
// tail_fraction outside (0, 1].
EmpiricalRate fit_empirical_rate(const std::vector<double>& values,
                                 double tail_fraction = 0.5);

// Envelope shapes understood by the certifier. The little-o kinds certify
// the same pointwise bound as their big-O counterparts; the asymptotic
// strictness is judged separately by little_o_supported, on a run long
// enough for the tail fit to be meaningful.
enum class RateKind {
  kBigOInverseK,          // c / (k+1)
  kLittleOInverseK,       // same bound, fitted exponent must beat -1
  kBigOInverseKSquared,   // c / (k+1)^2
  kLittleOInverseKSquared,
  kBigOInverseSqrtK,      // c / sqrt(k+1)
  kLinear,                // c * prod of factors[i] for i < k
};

enum class SequenceTag { kFpr, kObjectiveGap, kSSum, kResidual, kDistance };

enum class Ergodicity { kErgodic, kNonergodic, kBestIterate };

struct RateEnvelope {
  RateKind kind = RateKind::kBigOInverseK;
  double constant = 0.0;
  // Per-step contraction factors in [0, 1], kLinear only; one entry per
  // step but the first.
  std::vector<double> factors;
  SequenceTag applies_to = SequenceTag::kFpr;
  Ergodicity ergodicity = Ergodicity::kNonergodic;
};

enum class RateVerdict { kCertified, kViolated, kNotApplicable };

struct RateCertificate {
  RateEnvelope envelope;
  // max over k of (a_k - bound_k) / bound_k; certified iff <= tolerance.
  double max_relative_violation = 0.0;
  std::optional<std::size_t> first_violation_k;
  // Tail-fit diagnostics; NaN when the sequence could not be fitted.
  double fitted_exponent = 0.0;
  double fitted_linear_factor = 0.0;
  RateVerdict verdict = RateVerdict::kNotApplicable;
};

// Pointwise check of a_k <= c * shape(k) at relative tolerance tol, with
// fitted diagnostics attached. A tag mismatch yields the not-applicable
// verdict without touching the values. Throws InvalidArgumentError on a
// malformed envelope (negative constant, linear factors outside [0, 1] or
// fewer than values.size() - 1 of them) or nonfinite values.
RateCertificate certify(const std::vector<double>& values, SequenceTag tag,
                        const RateEnvelope& envelope,
                        double tol = kProvenRateTol);

// True when the certificate carries a little-o envelope and its fitted
// exponent undercuts the envelope's shape exponent by at least 0.05.
bool little_o_supported(const RateCertificate& certificate);

// Certificate with the not-applicable verdict for an envelope whose gate
// (stepsize range, relaxation schedule) failed before any sequence check.
RateCertificate not_applicable_certificate(const RateEnvelope& envelope);

}  // namespace splitkit

#endif  // SPLITKIT_RATES_HPP_
