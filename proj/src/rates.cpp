// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "splitkit/constants.hpp"
#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Fraction of the weighted sum the trailing half may carry before the
// series is treated as divergent.
constexpr double kTailMassCutoff = 0.25;
// Fitted exponents must undercut the envelope's shape exponent by this
// margin before a little-o claim is reported as supported.
constexpr double kLittleOMargin = 0.05;
// Tail windows are widened to this many points when the sequence has them.
constexpr std::size_t kMinTailWindow = 100;
// Fewer tail points than this cannot support a fit at all.
constexpr std::size_t kMinFitPoints = 10;

// Root of an increasing sign change of poly on [lo, hi]: drives the
// bracket down to adjacent doubles and returns the final midpoint.
double bisect_root(double lo, double hi, double (*poly)(double)) {
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (poly(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
}

double kappa_poly(double x) { return x * x * x + x * x - 2.0 * x - 1.0; }

double rho_poly(double x) { return x * x * x - 2.0 * x * x - 1.0; }

void require_positive_finite(double value, const char* message) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgumentError(message);
  }
}

void require_nonneg_finite(double value, const char* message) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InvalidArgumentError(message);
  }
}

}  // namespace

RateConstants rate_constants() {
  RateConstants out;
  out.kappa = bisect_root(1.0, 2.0, kappa_poly);
  out.rho = bisect_root(2.0, 3.0, rho_poly);
  out.theta_star = 1.0 - 1.0 / (out.kappa * out.kappa);
  return out;
}

double prs_linear_constant(LinearRateCase which, double mu, double beta,
                           double gamma, double lambda) {
  require_positive_finite(gamma, "gamma must be positive and finite");
  if (!(lambda >= 0.0) || !(lambda <= 1.0)) {
    throw InvalidArgumentError("lambda must lie in [0, 1]");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw ConditionNotMetError("linear rate needs mu > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConditionNotMetError("linear rate needs beta > 0");
  }
  const double ratio = 1.0 + gamma / beta;
  const double regular_drop = 4.0 * gamma * mu / (ratio * ratio);
  double drop = 0.0;
  switch (which) {
    case LinearRateCase::kGRegular:
      drop = lambda * regular_drop;
      break;
    case LinearRateCase::kFRegular:
      drop = 0.5 * lambda * std::min(regular_drop, 1.0 - lambda);
      break;
    case LinearRateCase::kMixed:
      drop = (4.0 * lambda / 3.0) *
             std::min({gamma * mu, beta / gamma, 1.0 - lambda});
      break;
  }
  return std::sqrt(std::clamp(1.0 - drop, 0.0, 1.0));
}

SmoothObjectiveBound smooth_objective_bound(double beta, double gamma,
                                            std::size_t k, double dist_xg0_sq,
                                            double dist_z0_sq) {
  require_positive_finite(beta, "beta must be positive and finite");
  require_positive_finite(gamma, "gamma must be positive and finite");
  require_nonneg_finite(dist_xg0_sq,
                        "squared distances must be nonnegative and finite");
  require_nonneg_finite(dist_z0_sq,
                        "squared distances must be nonnegative and finite");
  const double base = 1.0 / (2.0 * gamma * (static_cast<double>(k) + 1.0));
  SmoothObjectiveBound out;
  if (gamma < kRho * beta) {
    out.best_iterate = base * dist_xg0_sq;
  } else {
    const double coef =
        (gamma * gamma * gamma / beta - 2.0 * gamma * beta - beta * beta) /
        (beta * beta + gamma * gamma);
    out.best_iterate = base * (dist_xg0_sq + coef * dist_z0_sq);
  }
  if (gamma < kKappa * beta) {
    out.every_iterate = base * dist_xg0_sq;
  }
  return out;
}

double fpr_bound(FprEnvelopeKind kind, const FprEnvelopeParams& params,
                 std::size_t k) {
  require_nonneg_finite(
      params.initial_dist_sq,
      "initial squared distance must be nonnegative and finite");
  if (kind == FprEnvelopeKind::kGeneric) {
    if (!(params.tau_min > 0.0) || !std::isfinite(params.tau_min)) {
      throw ConditionNotMetError(
          "generic fpr envelope needs inf lambda_k (1 - lambda_k) > 0");
    }
    return params.initial_dist_sq /
           (params.tau_min * (static_cast<double>(k) + 1.0));
  }
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) {
    throw ConditionNotMetError("smooth fpr envelope needs beta > 0");
  }
  if (!(params.gamma > 0.0) || !std::isfinite(params.gamma) ||
      params.gamma >= kKappa * params.beta) {
    throw ConditionNotMetError(
        "smooth fpr envelope needs 0 < gamma < kappa * beta");
  }
  if (k == 0) {
    throw ConditionNotMetError("smooth fpr envelope starts at k = 1");
  }
  const double ratio = 1.0 + params.gamma / params.beta;
  const double margin =
      params.beta * params.beta -
      params.gamma * params.gamma / (kKappa * kKappa);
  const double kd = static_cast<double>(k);
  return params.beta * params.beta * params.initial_dist_sq /
         (kd * kd * ratio * ratio * margin);
}

namespace {

SummabilityReport summability_core(const std::vector<double>& values,
                                   const RelaxationSchedule& schedule,
                                   const std::vector<double>* witness) {
  if (values.empty()) {
    throw InvalidArgumentError("summability check needs a nonempty sequence");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgumentError(
          "summability check needs nonnegative finite values");
    }
  }
  if (witness != nullptr) {
    if (witness->size() != values.size() + 1) {
      throw InvalidArgumentError(
          "witness needs one more entry than the sequence");
    }
    for (double b : *witness) {
      if (!(b >= 0.0) || !std::isfinite(b)) {
        throw InvalidArgumentError(
            "witness entries must be nonnegative and finite");
      }
    }
  }

  const std::size_t n = values.size();
  SummabilityReport report;

  std::vector<double> lambdas(n, 0.0);
  std::vector<double> lambda_sums(n, 0.0);
  double running_lambda = 0.0;
  double tail_mass = 0.0;
  const std::size_t tail_begin = n / 2;
  for (std::size_t k = 0; k < n; ++k) {
    lambdas[k] = schedule.lambda(k);
    running_lambda += lambdas[k];
    lambda_sums[k] = running_lambda;
    const double contribution = lambdas[k] * values[k];
    report.weighted_sum += contribution;
    if (k >= tail_begin) tail_mass += contribution;
  }

  report.monotone = true;
  for (std::size_t k = 1; k < n; ++k) {
    if (values[k] > values[k - 1]) {
      report.monotone = false;
      break;
    }
  }

  // A convergent weighted series sheds almost all of its mass before any
  // fixed fraction of the index range; a divergent one keeps carrying it.
  report.summable = std::isfinite(report.weighted_sum) &&
                    (report.weighted_sum == 0.0 ||
                     tail_mass <= kTailMassCutoff * report.weighted_sum);

  const double scale = std::max(1.0, report.weighted_sum);

  report.best_values.resize(n);
  double best = values[0];
  for (std::size_t k = 0; k < n; ++k) {
    best = std::min(best, values[k]);
    report.best_values[k] = best;
  }

  CheckAccumulator monotone_check("monotone-envelope", kProvenRateTol);
  CheckAccumulator best_check("best-envelope", kProvenRateTol);
  if (report.summable) {
    for (std::size_t k = 0; k < n; ++k) {
      const double bound = report.weighted_sum / lambda_sums[k];
      if (report.monotone) {
        monotone_check.observe(k, (values[k] - bound) / scale);
      }
      best_check.observe(k, (report.best_values[k] - bound) / scale);
    }
  }
  report.monotone_bound = monotone_check.take();
  report.best_bound = best_check.take();

  if (witness != nullptr) {
    CheckAccumulator witness_acc("telescoping-witness", kProvenRateTol);
    const double witness_scale = std::max(1.0, witness->front());
    for (std::size_t k = 0; k < n; ++k) {
      const double slack =
          lambdas[k] * values[k] - ((*witness)[k] - (*witness)[k + 1]);
      witness_acc.observe(k, slack / witness_scale);
      report.witness_sum += (*witness)[k];
      report.weighted_indexed_sum +=
          (static_cast<double>(k) + 1.0) * lambdas[k] * values[k];
    }
    report.witness_check = witness_acc.take();
    report.faster_rate_holds =
        report.weighted_indexed_sum <=
        report.witness_sum + kProvenRateTol * std::max(1.0, report.witness_sum);
  }

  return report;
}

}  // namespace

SummabilityReport check_summable_rates(const std::vector<double>& values,
                                       const RelaxationSchedule& schedule) {
  return summability_core(values, schedule, nullptr);
}

SummabilityReport check_summable_rates(const std::vector<double>& values,
                                       const RelaxationSchedule& schedule,
                                       const std::vector<double>& witness) {
  return summability_core(values, schedule, &witness);
}

EmpiricalRate fit_empirical_rate(const std::vector<double>& values,
                                 double tail_fraction) {
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
    throw InvalidArgumentError("tail fraction must lie in (0, 1]");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgumentError("rate fit needs finite values");
    }
  }
  const std::size_t n = values.size();
  std::size_t window = static_cast<std::size_t>(
      std::llround(tail_fraction * static_cast<double>(n)));
  window = std::min(std::max(window, kMinTailWindow), n);
  if (window < kMinFitPoints) {
    throw DegenerateSequenceError("rate fit needs at least 10 tail points");
  }
  const std::size_t begin = n - window;
  for (std::size_t k = begin; k < n; ++k) {
    if (values[k] == 0.0) {
      throw DegenerateSequenceError(
          "sequence reached zero on the tail: finite convergence");
    }
    if (values[k] < 0.0) {
      throw DegenerateSequenceError("rate fit needs a positive tail");
    }
  }

  double sum_x = 0.0;
  double sum_y = 0.0;
  double sum_xx = 0.0;
  double sum_xy = 0.0;
  for (std::size_t k = begin; k < n; ++k) {
    const double x = std::log(static_cast<double>(k) + 1.0);
    const double y = std::log(values[k]);
    sum_x += x;
    sum_y += y;
    sum_xx += x * x;
    sum_xy += x * y;
  }
  const double m = static_cast<double>(window);

  EmpiricalRate fit;
  fit.window_begin = begin;
  fit.window_size = window;
  fit.exponent = (sum_xy - sum_x * sum_y / m) / (sum_xx - sum_x * sum_x / m);
  // Geometric mean of consecutive ratios: interior log terms telescope.
  fit.linear_factor = std::exp((std::log(values[n - 1]) -
                                std::log(values[begin])) /
                               (m - 1.0));
  return fit;
}

RateCertificate certify(const std::vector<double>& values, SequenceTag tag,
                        const RateEnvelope& envelope, double tol) {
  if (values.empty()) {
    throw InvalidArgumentError("certification needs a nonempty sequence");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw InvalidArgumentError("certification needs finite values");
    }
  }
  if (!(envelope.constant >= 0.0) || !std::isfinite(envelope.constant)) {
    throw InvalidArgumentError(
        "envelope constant must be nonnegative and finite");
  }
  if (envelope.kind == RateKind::kLinear) {
    if (envelope.factors.size() + 1 < values.size()) {
      throw InvalidArgumentError("linear envelope needs a factor per step");
    }
    for (double f : envelope.factors) {
      if (!(f >= 0.0) || !(f <= 1.0)) {
        throw InvalidArgumentError(
            "linear envelope factors must lie in [0, 1]");
      }
    }
  }
  if (!(tol >= 0.0) || !std::isfinite(tol)) {
    throw InvalidArgumentError("tolerance must be nonnegative and finite");
  }

  RateCertificate cert;
  cert.envelope = envelope;
  cert.fitted_exponent = kNan;
  cert.fitted_linear_factor = kNan;

  if (tag != envelope.applies_to) {
    cert.verdict = RateVerdict::kNotApplicable;
    return cert;
  }

  double linear_bound = envelope.constant;
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<std::size_t> first_violation;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double kd = static_cast<double>(k) + 1.0;
    double bound = 0.0;
    switch (envelope.kind) {
      case RateKind::kBigOInverseK:
      case RateKind::kLittleOInverseK:
        bound = envelope.constant / kd;
        break;
      case RateKind::kBigOInverseKSquared:
      case RateKind::kLittleOInverseKSquared:
        bound = envelope.constant / (kd * kd);
        break;
      case RateKind::kBigOInverseSqrtK:
        bound = envelope.constant / std::sqrt(kd);
        break;
      case RateKind::kLinear:
        bound = linear_bound;
        if (k + 1 < values.size()) linear_bound *= envelope.factors[k];
        break;
    }
    const double violation =
        (values[k] - bound) /
        std::max(bound, std::numeric_limits<double>::min());
    worst = std::max(worst, violation);
    if (violation > tol && !first_violation.has_value()) first_violation = k;
  }

  cert.max_relative_violation = worst;
  cert.first_violation_k = first_violation;
  cert.verdict = first_violation.has_value() ? RateVerdict::kViolated
                                             : RateVerdict::kCertified;

  try {
    const EmpiricalRate fit = fit_empirical_rate(values);
    cert.fitted_exponent = fit.exponent;
    cert.fitted_linear_factor = fit.linear_factor;
  } catch (const DegenerateSequenceError&) {
    // Too short or finitely convergent: the diagnostics stay NaN.
  }
  return cert;
}

bool little_o_supported(const RateCertificate& certificate) {
  double shape_exponent = 0.0;
  switch (certificate.envelope.kind) {
    case RateKind::kLittleOInverseK:
      shape_exponent = -1.0;
      break;
    case RateKind::kLittleOInverseKSquared:
      shape_exponent = -2.0;
      break;
    default:
      return false;
  }
  return std::isfinite(certificate.fitted_exponent) &&
         certificate.fitted_exponent <= shape_exponent - kLittleOMargin;
}

RateCertificate not_applicable_certificate(const RateEnvelope& envelope) {
  RateCertificate cert;
  cert.envelope = envelope;
  cert.fitted_exponent = kNan;
  cert.fitted_linear_factor = kNan;
  cert.verdict = RateVerdict::kNotApplicable;
  return cert;
}

}  // namespace splitkit
