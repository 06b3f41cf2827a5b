// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_SPLITTING_HPP_
#define SPLITKIT_SPLITTING_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitkit/prox.hpp"
#include "splitkit/vec.hpp"

// Relaxed Peaceman-Rachford splitting: one step, full runs with trace
// recording, ergodic averaging, best-iterate tracking, and optional
// per-iteration verification of the convergence inequalities the method
// satisfies. Also provides the forward-backward step as a baseline.

namespace splitkit {

// Relaxation sequence (lambda_k) in (0,1]. Constant schedules additionally
// expose their value so gated checks can recognize them. Instances are
// cheap to copy; each run works from its own copy.
class RelaxationSchedule {
 public:
  static RelaxationSchedule constant(double lambda);
  static RelaxationSchedule from_function(
      std::function<double(std::size_t)> generator);

  // lambda_k; throws InvalidArgumentError when the generator leaves (0,1].
  double lambda(std::size_t k) const;
  // Lambda_k = sum of lambda_i for i <= k, by direct summation. Runs cache
  // the partial sums in the trace instead of calling this per iteration.
  double lambda_sum(std::size_t k) const;
  // inf of lambda_i over i <= k.
  double min_lambda(std::size_t k) const;
  // inf of lambda_i * (1 - lambda_i) over i <= k.
  double min_tau(std::size_t k) const;

  bool is_constant() const { return constant_; }
  // Only meaningful when is_constant().
  double constant_value() const { return value_; }

 private:
  RelaxationSchedule(std::function<double(std::size_t)> generator,
                     bool constant, double value);

  std::function<double(std::size_t)> generator_;
  bool constant_ = false;
  double value_ = 0.0;
};

enum class TraceMode {
  kFull,  // keep per-iteration vectors
  kThin,  // keep scalars only, plus the final state
};

struct SolverConfig {
  double gamma = 1.0;
  RelaxationSchedule schedule = RelaxationSchedule::constant(0.5);
  std::size_t max_iters = 100;
  // Stop once fpr_k <= fpr_stop, checked from k = 1 on so at least one step
  // is always taken. The default 0 stops only at exact fixed points.
  double fpr_stop = 0.0;
  // Verify the per-iteration inequalities against a fixed point. When no
  // known_fixed_point is given, one is estimated by a pre-run of
  // 10 * max_iters steps at lambda = 1/2.
  bool assert_inequalities = false;
  std::optional<Vec> known_fixed_point;
  TraceMode trace_mode = TraceMode::kFull;

  // Throws InvalidArgumentError on gamma <= 0, max_iters == 0 or
  // fpr_stop < 0.
  void validate() const;
};

// Which point the single-point objective f(x) + g(x) is evaluated at:
// the prox point of the nonsmooth function, so the smooth one is the
// function evaluated away from its own prox output.
enum class SmoothEvalPoint {
  kXf,  // g is the smooth one (or neither is smooth)
  kXg,  // f is the smooth one
};

// Outcome of one verified inequality across a run. Violations are measured
// after dividing the raw slack by the report scale, so max_violation
// compares directly against the 1e-9 pass threshold.
struct InequalityCheck {
  std::string name;
  bool applicable = false;
  std::size_t comparisons = 0;
  std::optional<std::size_t> first_violation_k;
  double max_violation = 0.0;

  bool passed() const { return !first_violation_k.has_value(); }
};

struct InequalityReport {
  // max(1, ||z0 - z*||^2); slack is normalized by this before thresholding.
  double scale = 1.0;
  std::vector<InequalityCheck> checks;

  bool all_passed() const;
  // nullptr when no check with that name exists.
  const InequalityCheck* find(std::string_view name) const;
};

// Collects one inequality's outcome over a run. Feed it the normalized
// slack at each comparison; take() yields the finished check record.
class CheckAccumulator {
 public:
  CheckAccumulator(std::string name, double threshold) : threshold_(threshold) {
    check_.name = std::move(name);
  }

  void observe(std::size_t k, double violation) {
    check_.applicable = true;
    ++check_.comparisons;
    check_.max_violation = std::max(check_.max_violation, violation);
    if (violation > threshold_ && !check_.first_violation_k.has_value()) {
      check_.first_violation_k = k;
    }
  }

  InequalityCheck take() { return std::move(check_); }

 private:
  InequalityCheck check_;
  double threshold_ = 0.0;
};

// Complete record of a run. Scalar histories have one entry per completed
// step k; vector histories are kept in kFull mode only. Entries that need a
// fixed point are NaN when none was available. Traces are immutable once
// returned and safe to share across threads.
struct IterationTrace {
  double gamma = 0.0;
  TraceMode mode = TraceMode::kFull;
  SmoothEvalPoint smooth_point = SmoothEvalPoint::kXf;
  bool stopped_on_fpr = false;

  // Scalars, indexed by step k.
  std::vector<double> lambda;       // lambda_k
  std::vector<double> lambda_sum;   // Lambda_k, cached partial sums
  std::vector<double> fpr;          // ||T z^k - z^k||^2 for the lambda=1 map
  std::vector<double> step_sq;      // ||z^{k+1} - z^k||^2 = lambda_k^2 * fpr_k
  std::vector<double> obj_split;    // f(x_f^k) + g(x_g^k)
  std::vector<double> obj_smooth;   // f + g at the designated point
  std::vector<double> obj_gap_nonergodic;  // obj_split - obj_star
  std::vector<double> obj_gap_ergodic;     // f(xbar_f) + g(xbar_g) - obj_star
  std::vector<double> s_f;          // S_f(x_f^k, x*)
  std::vector<double> s_g;          // S_g(x_g^k, x*)
  std::vector<double> dist_to_zstar;       // ||z^k - z*||
  std::vector<std::size_t> k_best_fpr;     // argmin of fpr over i <= k

  // Vectors, kFull mode only, indexed by step k.
  std::vector<Vec> z;
  std::vector<Vec> x_g;
  std::vector<Vec> x_f;
  std::vector<Vec> grad_g;    // (z^k - x_g^k) / gamma
  std::vector<Vec> grad_f;    // (2 x_g^k - z^k - x_f^k) / gamma
  std::vector<Vec> erg_x_f;   // running weighted average of x_f
  std::vector<Vec> erg_x_g;   // running weighted average of x_g

  // Final state, always populated. final_fpr is the residual at final_z,
  // so a run that stopped on the threshold exposes the value that
  // triggered the stop.
  Vec final_z;
  Vec final_x_g;
  Vec final_x_f;
  Vec final_erg_x_f;
  Vec final_erg_x_g;
  double final_fpr = 0.0;

  // Reference data when a fixed point was supplied or estimated.
  std::optional<Vec> z_star;
  Vec x_star;  // prox of g at z*
  double obj_star = std::numeric_limits<double>::quiet_NaN();

  std::optional<InequalityReport> inequalities;

  std::size_t steps() const { return fpr.size(); }
};

struct PrsStepResult {
  Vec z_next;
  Vec x_g;
  Vec x_f;
};

// One relaxed step: x_g = prox_g(z), x_f = prox_f(2 x_g - z),
// z_next = z + 2 lambda (x_f - x_g). Requires lambda in (0,1].
PrsStepResult prs_step(const ProxFunction& f, const ProxFunction& g,
                       double gamma, double lambda, const Vec& z);

struct FbsStepResult {
  Vec z_next;
  // Set when gamma >= 2 * beta(g), outside the guaranteed-convergence
  // range. The step is still taken.
  bool stepsize_flagged = false;
};

// Forward-backward step prox_f(z - gamma * grad g(z)); g must expose a
// gradient.
FbsStepResult fbs_step(const ProxFunction& f, const ProxFunction& g,
                       double gamma, const Vec& z);

// Plain iteration at lambda = 1/2 returning the final z, used to estimate a
// fixed point for assertion mode and objective references.
Vec estimate_fixed_point(const ProxFunction& f, const ProxFunction& g,
                         double gamma, const Vec& z0, std::size_t iters);

IterationTrace run_prs(const ProxFunction& f, const ProxFunction& g,
                       const SolverConfig& config, const Vec& z0);

struct ErgodicPair {
  Vec x_f_bar;
  Vec x_g_bar;
};

// Weighted averages (1/Lambda_k) * sum of lambda_i x^i for i <= k, by
// direct summation over the stored history. Needs a kFull trace.
ErgodicPair ergodic_average(const IterationTrace& trace, std::size_t k);

enum class BestMetric {
  kObjectiveGap,  // obj_gap_nonergodic; needs a fixed point
  kSSum,          // s_f + s_g; needs a fixed point
  kFpr,
};

// Running argmin of the chosen metric: k_best[k] minimizes the metric over
// i <= k and value[k] is that minimum, so value is nonincreasing.
struct BestIterateSeq {
  std::vector<std::size_t> k_best;
  std::vector<double> value;
};

BestIterateSeq best_iterate(const IterationTrace& trace, BestMetric metric);

}  // namespace splitkit

#endif  // SPLITKIT_SPLITTING_HPP_
