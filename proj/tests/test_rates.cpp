// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "doctest.h"
#include "splitkit/admm.hpp"
#include "splitkit/constants.hpp"
#include "splitkit/errors.hpp"
#include "splitkit/feasibility.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/prox.hpp"
#include "splitkit/rates.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/splitting.hpp"
#include "splitkit/vec.hpp"

namespace {

using namespace splitkit;

constexpr double kRoot3 = 1.7320508075688772;

RateEnvelope make_envelope(RateKind kind, double constant, SequenceTag tag) {
  RateEnvelope env;
  env.kind = kind;
  env.constant = constant;
  env.applies_to = tag;
  return env;
}

// Quadratic pair with mu = beta = 1 and distinct minimizers, the workhorse
// fixture for runs that need a known fixed point to machine precision.
struct QuadraticPair {
  FnPtr f;
  FnPtr g;
  Vec z0;
};

QuadraticPair quadratic_pair() {
  QuadraticPair out;
  out.f = make_scaled_norm_squared(1.0, Vec{1.0, -2.0, 0.5});
  out.g = make_scaled_norm_squared(1.0, Vec{-1.0, 1.0, 2.0});
  out.z0 = {4.0, 0.0, -3.0};
  return out;
}

// f = g = (1/2) v^2 coupled through x + y = 0; every dual constant is 1, so
// the ADMM factors must coincide with the primal ones.
AdmmProblem unit_scalar_problem() {
  return make_admm_problem(
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}), {0.0});
}

TEST_SUITE_BEGIN("rates");

TEST_CASE("cubic roots and the stepsize thresholds") {
  const RateConstants rc = rate_constants();

  CHECK(rc.kappa == doctest::Approx(kKappa).epsilon(1e-12));
  CHECK(rc.rho == doctest::Approx(kRho).epsilon(1e-12));
  CHECK(rc.theta_star == doctest::Approx(kThetaStar).epsilon(1e-12));

  const double k = rc.kappa;
  const double r = rc.rho;
  CHECK(std::abs(k * k * k + k * k - 2.0 * k - 1.0) <= 1e-12);
  CHECK(std::abs(r * r * r - 2.0 * r * r - 1.0) <= 1e-12);

  CHECK(std::abs(rc.kappa - 1.24698) <= 1e-4);
  CHECK(std::abs(rc.rho - 2.2056) <= 1e-3);
  CHECK(rc.theta_star > 0.0);
  CHECK(rc.theta_star < 1.0);
  CHECK(rc.theta_star ==
        doctest::Approx(1.0 - 1.0 / (rc.kappa * rc.kappa)).epsilon(1e-15));

  // The kappa cubic is the minimal polynomial of 2 cos(2 pi / 7).
  CHECK(std::abs(rc.kappa - 2.0 * std::cos(2.0 * std::numbers::pi / 7.0)) <=
        1e-12);

  // At gamma* = kappa * beta, theta* turns both stepsize constraints into
  // equalities: theta gamma^2 = 2 gamma beta - gamma^3 / beta and
  // (1 - theta) gamma^2 / beta^2 = 1.
  for (const double beta : {1.0, 0.7}) {
    const double gs = rc.kappa * beta;
    const double r1 =
        rc.theta_star * gs * gs - (2.0 * gs * beta - gs * gs * gs / beta);
    const double r2 = (1.0 - rc.theta_star) * gs * gs / (beta * beta) - 1.0;
    CHECK(std::abs(r1) <= 1e-10);
    CHECK(std::abs(r2) <= 1e-10);
  }
}

TEST_CASE("linear contraction factors follow the three regularity cases") {
  CHECK(prs_linear_constant(LinearRateCase::kGRegular, 1.0, 1.0, 1.0, 1.0) ==
        0.0);
  CHECK(prs_linear_constant(LinearRateCase::kGRegular, 0.5, 0.8, 0.8, 0.6) ==
        doctest::Approx(0.8717797887081347).epsilon(1e-12));
  CHECK(prs_linear_constant(LinearRateCase::kFRegular, 1.0, 1.0, 1.0, 1.0) ==
        1.0);
  CHECK(prs_linear_constant(LinearRateCase::kFRegular, 1.0, 1.0, 1.0, 0.5) ==
        doctest::Approx(0.9354143466934853).epsilon(1e-12));
  CHECK(prs_linear_constant(LinearRateCase::kMixed, 1.0, 1.0, 1.0, 0.5) ==
        doctest::Approx(0.816496580927726).epsilon(1e-12));
  CHECK(prs_linear_constant(LinearRateCase::kMixed, 1.0, 1.0, 1.0, 1.0) ==
        1.0);

  // More relaxation can only help in the g-regular case.
  CHECK(prs_linear_constant(LinearRateCase::kGRegular, 0.4, 1.0, 1.0, 0.3) >
        prs_linear_constant(LinearRateCase::kGRegular, 0.4, 1.0, 1.0, 0.7));
  // A huge modulus pushes the factor to the clamp, not below zero.
  CHECK(prs_linear_constant(LinearRateCase::kGRegular, 100.0, 1.0, 1.0, 1.0) ==
        0.0);

  CHECK_THROWS_WITH_AS(
      prs_linear_constant(LinearRateCase::kGRegular, 0.0, 1.0, 1.0, 0.5),
      "linear rate needs mu > 0", ConditionNotMetError);
  CHECK_THROWS_WITH_AS(
      prs_linear_constant(LinearRateCase::kMixed, 1.0, 0.0, 1.0, 0.5),
      "linear rate needs beta > 0", ConditionNotMetError);
  CHECK_THROWS_AS(
      prs_linear_constant(LinearRateCase::kFRegular, 1.0, 1.0, 0.0, 0.5),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      prs_linear_constant(LinearRateCase::kFRegular, 1.0, 1.0, 1.0, -0.1),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      prs_linear_constant(LinearRateCase::kFRegular, 1.0, 1.0, 1.0, 1.1),
      InvalidArgumentError);

  // On the unit scalar fixture every dual constant is 1, so the four dual
  // contraction cases collapse onto the three primal formulas.
  const AdmmProblem unit = unit_scalar_problem();
  CHECK(admm_rate_constant(1, unit, 0.8, 0.6) ==
        doctest::Approx(prs_linear_constant(LinearRateCase::kGRegular, 1.0,
                                            1.0, 0.8, 0.6))
            .epsilon(1e-12));
  CHECK(admm_rate_constant(2, unit, 1.3, 0.45) ==
        doctest::Approx(prs_linear_constant(LinearRateCase::kFRegular, 1.0,
                                            1.0, 1.3, 0.45))
            .epsilon(1e-12));
  CHECK(admm_rate_constant(3, unit, 0.7, 0.5) ==
        doctest::Approx(prs_linear_constant(LinearRateCase::kMixed, 1.0, 1.0,
                                            0.7, 0.5))
            .epsilon(1e-12));
  CHECK(admm_rate_constant(4, unit, 0.7, 0.5) ==
        doctest::Approx(prs_linear_constant(LinearRateCase::kMixed, 1.0, 1.0,
                                            0.7, 0.5))
            .epsilon(1e-12));
}

TEST_CASE("objective envelope switches branch at the stepsize threshold") {
  // Small stepsize: both bounds present and equal to the plain envelope.
  const SmoothObjectiveBound small = smooth_objective_bound(1.0, 0.5, 4, 2.0, 9.0);
  REQUIRE(small.every_iterate.has_value());
  CHECK(small.best_iterate == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(*small.every_iterate == small.best_iterate);
  CHECK(smooth_objective_bound(1.0, 0.5, 0, 2.0, 9.0).best_iterate ==
        doctest::Approx(2.0).epsilon(1e-15));

  // Between the two thresholds only the best-iterate envelope survives.
  const SmoothObjectiveBound mid = smooth_objective_bound(1.0, 1.3, 7, 2.0, 9.0);
  CHECK_FALSE(mid.every_iterate.has_value());
  CHECK(mid.best_iterate == doctest::Approx(2.0 / (2.0 * 1.3 * 8.0)).epsilon(1e-15));

  // Beyond the threshold the initial z distance enters with coefficient
  // (gamma^3/beta - 2 gamma beta - beta^2) / (beta^2 + gamma^2).
  const SmoothObjectiveBound wide = smooth_objective_bound(1.0, 3.0, 0, 1.0, 3.0);
  CHECK_FALSE(wide.every_iterate.has_value());
  CHECK(wide.best_iterate == doctest::Approx(1.1666666666666665).epsilon(1e-12));

  // The switch itself: just below, the correction is absent; at and above,
  // it enters at full size, a factor 1.9068 jump for unit distances.
  const double below =
      smooth_objective_bound(1.0, kRho * (1.0 - 1e-9), 0, 1.0, 1.0).best_iterate;
  const double above =
      smooth_objective_bound(1.0, kRho * (1.0 + 1e-9), 0, 1.0, 1.0).best_iterate;
  CHECK(above / below ==
        doctest::Approx(1.0 + 0.9067953030328076).epsilon(1e-6));
  CHECK(smooth_objective_bound(1.0, kRho, 0, 1.0, 1.0).best_iterate ==
        doctest::Approx((1.0 + 0.9067953030328076) / (2.0 * kRho))
            .epsilon(1e-12));

  CHECK_THROWS_AS(smooth_objective_bound(0.0, 1.0, 0, 1.0, 1.0),
                  InvalidArgumentError);
  CHECK_THROWS_AS(smooth_objective_bound(1.0, -1.0, 0, 1.0, 1.0),
                  InvalidArgumentError);
  CHECK_THROWS_AS(smooth_objective_bound(1.0, 1.0, 0, -1.0, 1.0),
                  InvalidArgumentError);
  CHECK_THROWS_AS(
      smooth_objective_bound(1.0, 1.0, 0, 1.0,
                             std::numeric_limits<double>::infinity()),
      InvalidArgumentError);
}

TEST_CASE("fixed point residual envelopes") {
  FprEnvelopeParams generic;
  generic.initial_dist_sq = 1.0;
  generic.tau_min = 0.25;
  CHECK(fpr_bound(FprEnvelopeKind::kGeneric, generic, 3) == 1.0);

  FprEnvelopeParams smooth;
  smooth.initial_dist_sq = 1.0;
  smooth.beta = 1.0;
  smooth.gamma = 1.0;
  CHECK(fpr_bound(FprEnvelopeKind::kSmoothDrs, smooth, 1) ==
        doctest::Approx(0.7004844339512092).epsilon(1e-12));
  CHECK(fpr_bound(FprEnvelopeKind::kSmoothDrs, smooth, 1) /
            fpr_bound(FprEnvelopeKind::kSmoothDrs, smooth, 4) ==
        doctest::Approx(16.0).epsilon(1e-12));

  // The envelope blows up as the stepsize approaches the admissible edge.
  FprEnvelopeParams near_edge = smooth;
  near_edge.gamma = 0.99999 * kKappa;
  FprEnvelopeParams mid = smooth;
  mid.gamma = 0.5 * kKappa;
  CHECK(fpr_bound(FprEnvelopeKind::kSmoothDrs, near_edge, 10) /
            fpr_bound(FprEnvelopeKind::kSmoothDrs, mid, 10) >
        1e4);

  FprEnvelopeParams no_tau;
  no_tau.initial_dist_sq = 1.0;
  CHECK_THROWS_AS(fpr_bound(FprEnvelopeKind::kGeneric, no_tau, 1),
                  ConditionNotMetError);
  FprEnvelopeParams too_wide = smooth;
  too_wide.gamma = kKappa;
  CHECK_THROWS_AS(fpr_bound(FprEnvelopeKind::kSmoothDrs, too_wide, 1),
                  ConditionNotMetError);
  CHECK_THROWS_AS(fpr_bound(FprEnvelopeKind::kSmoothDrs, smooth, 0),
                  ConditionNotMetError);
  FprEnvelopeParams no_beta;
  no_beta.initial_dist_sq = 1.0;
  no_beta.gamma = 1.0;
  CHECK_THROWS_AS(fpr_bound(FprEnvelopeKind::kSmoothDrs, no_beta, 1),
                  ConditionNotMetError);
  FprEnvelopeParams bad_dist = generic;
  bad_dist.initial_dist_sq = -1.0;
  CHECK_THROWS_AS(fpr_bound(FprEnvelopeKind::kGeneric, bad_dist, 1),
                  InvalidArgumentError);

  // A recorded run stays inside the generic envelope at every step.
  const QuadraticPair pair = quadratic_pair();
  const Vec zstar = estimate_fixed_point(*pair.f, *pair.g, 1.0, pair.z0, 4000);
  SolverConfig config;
  config.gamma = 1.0;
  config.schedule = RelaxationSchedule::constant(0.5);
  config.max_iters = 200;
  config.trace_mode = TraceMode::kThin;
  const IterationTrace trace = run_prs(*pair.f, *pair.g, config, pair.z0);
  FprEnvelopeParams run_params;
  run_params.initial_dist_sq = dist_sq(pair.z0, zstar);
  run_params.tau_min = 0.25;
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    const double bound = fpr_bound(FprEnvelopeKind::kGeneric, run_params, k);
    CHECK(trace.fpr[k] <= bound * (1.0 + 1e-7));
  }
}

TEST_CASE("summability reports") {
  const RelaxationSchedule unit = RelaxationSchedule::constant(1.0);
  const RelaxationSchedule half = RelaxationSchedule::constant(0.5);

  std::vector<double> geometric(40);
  for (std::size_t k = 0; k < geometric.size(); ++k) {
    geometric[k] = std::ldexp(1.0, -static_cast<int>(k));
  }
  const SummabilityReport geo = check_summable_rates(geometric, unit);
  CHECK(geo.summable);
  CHECK(geo.monotone);
  CHECK(geo.weighted_sum == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(geo.monotone_bound.applicable);
  CHECK(geo.monotone_bound.passed());
  CHECK(geo.monotone_bound.comparisons == 40);
  CHECK(geo.best_bound.passed());
  // Spot check the k = 2 bound: a_2 = 1/4 against (sum)/Lambda_2 = 2/3.
  CHECK(geometric[2] <= geo.weighted_sum / 3.0);
  CHECK(geo.weighted_sum / 3.0 == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK_FALSE(geo.witness_check.has_value());

  const std::vector<double> constant(50, 1.0);
  const SummabilityReport flat = check_summable_rates(constant, unit);
  CHECK_FALSE(flat.summable);
  CHECK(flat.monotone);
  CHECK_FALSE(flat.monotone_bound.applicable);
  CHECK_FALSE(flat.best_bound.applicable);

  std::vector<double> bumpy = {3.0, 1.0, 2.0};
  bumpy.resize(40, 0.0);
  const SummabilityReport bump = check_summable_rates(bumpy, unit);
  CHECK_FALSE(bump.monotone);
  CHECK(bump.summable);
  CHECK(bump.best_values[0] == 3.0);
  CHECK(bump.best_values[1] == 1.0);
  CHECK(bump.best_values[2] == 1.0);
  CHECK_FALSE(bump.monotone_bound.applicable);
  CHECK(bump.best_bound.applicable);
  CHECK(bump.best_bound.passed());

  // Telescoping witness with exact equality per step.
  std::vector<double> witness(geometric.size() + 1);
  for (std::size_t k = 0; k < witness.size(); ++k) {
    witness[k] = std::ldexp(1.0, -static_cast<int>(k));
  }
  const SummabilityReport tele = check_summable_rates(geometric, half, witness);
  REQUIRE(tele.witness_check.has_value());
  CHECK(tele.witness_check->passed());
  CHECK(tele.witness_check->comparisons == 40);
  CHECK(tele.faster_rate_holds);
  CHECK(tele.weighted_indexed_sum <= tele.witness_sum + 1e-9);

  const std::vector<double> zero_witness(geometric.size() + 1, 0.0);
  const SummabilityReport broken =
      check_summable_rates(geometric, half, zero_witness);
  REQUIRE(broken.witness_check.has_value());
  CHECK_FALSE(broken.witness_check->passed());
  CHECK(broken.witness_check->first_violation_k == 0);
  CHECK_FALSE(broken.faster_rate_holds);

  // Real run data: the weighted auxiliary terms telescope against the
  // squared distances to the fixed point.
  const QuadraticPair pair = quadratic_pair();
  const double gamma = 1.0;
  const Vec zstar = estimate_fixed_point(*pair.f, *pair.g, gamma, pair.z0, 4000);
  SolverConfig config;
  config.gamma = gamma;
  config.schedule = half;
  config.max_iters = 300;
  config.known_fixed_point = zstar;
  config.trace_mode = TraceMode::kThin;
  const IterationTrace trace = run_prs(*pair.f, *pair.g, config, pair.z0);
  std::vector<double> aux(trace.steps());
  std::vector<double> run_witness(trace.steps() + 1);
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    aux[k] = 8.0 * gamma * (trace.s_f[k] + trace.s_g[k]);
    run_witness[k] = trace.dist_to_zstar[k] * trace.dist_to_zstar[k];
  }
  run_witness[trace.steps()] = dist_sq(trace.final_z, zstar);
  const SummabilityReport run_report =
      check_summable_rates(aux, half, run_witness);
  CHECK(run_report.summable);
  REQUIRE(run_report.witness_check.has_value());
  CHECK(run_report.witness_check->passed());
  CHECK(run_report.faster_rate_holds);
  CHECK(run_report.best_bound.passed());

  CHECK_THROWS_AS(check_summable_rates({1.0, -1.0}, unit),
                  InvalidArgumentError);
  CHECK_THROWS_AS(check_summable_rates({}, unit), InvalidArgumentError);
  CHECK_THROWS_AS(check_summable_rates({1.0, 0.5}, unit, {1.0, 0.5}),
                  InvalidArgumentError);
}

TEST_CASE("empirical rate fitting") {
  std::vector<double> quadratic_decay(1000);
  for (std::size_t k = 0; k < quadratic_decay.size(); ++k) {
    const double kd = static_cast<double>(k) + 1.0;
    quadratic_decay[k] = 1.0 / (kd * kd);
  }
  const EmpiricalRate quad_fit = fit_empirical_rate(quadratic_decay);
  CHECK(quad_fit.exponent == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(quad_fit.window_begin == 500);
  CHECK(quad_fit.window_size == 500);

  std::vector<double> geometric(200);
  for (std::size_t k = 0; k < geometric.size(); ++k) {
    geometric[k] = std::ldexp(1.0, -static_cast<int>(k));
  }
  const EmpiricalRate geo_fit = fit_empirical_rate(geometric);
  CHECK(geo_fit.linear_factor == doctest::Approx(0.5).epsilon(1e-9));

  // Windows widen to 100 points when available, and never past the data.
  const std::vector<double> mid(150, 1.0);
  const EmpiricalRate mid_fit = fit_empirical_rate(mid);
  CHECK(mid_fit.window_begin == 50);
  CHECK(mid_fit.window_size == 100);
  const std::vector<double> small(40, 1.0);
  const EmpiricalRate small_fit = fit_empirical_rate(small);
  CHECK(small_fit.window_begin == 0);
  CHECK(small_fit.window_size == 40);

  CHECK_THROWS_AS(fit_empirical_rate(std::vector<double>(8, 1.0)),
                  DegenerateSequenceError);
  std::vector<double> truncated(40, 0.0);
  for (std::size_t k = 0; k < 30; ++k) {
    truncated[k] = 1.0 / (static_cast<double>(k) + 1.0);
  }
  CHECK_THROWS_WITH_AS(
      fit_empirical_rate(truncated),
      "sequence reached zero on the tail: finite convergence",
      DegenerateSequenceError);
  CHECK_THROWS_AS(fit_empirical_rate(quadratic_decay, 0.0),
                  InvalidArgumentError);
  CHECK_THROWS_AS(fit_empirical_rate(quadratic_decay, 1.5),
                  InvalidArgumentError);

  // Alternating projections between lines meeting at pi/3 contract the
  // distance by cos^2(pi/3) = 1/4 per sweep.
  // 150 sweeps keep the norms far from the denormal range, where the
  // projection arithmetic would smear the ratios.
  const SetPtr cf = make_line_through_origin({1.0, 0.0});
  const SetPtr cg = make_line_through_origin({0.5, 0.5 * kRoot3});
  const FeasibilityTrace trace = map_run(*cf, *cg, {1.0, 2.0}, 150);
  std::vector<double> norms;
  for (const Vec& zk : trace.z) norms.push_back(nrm2(zk));
  const EmpiricalRate map_fit = fit_empirical_rate(norms);
  CHECK(map_fit.linear_factor == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("certificates hold exactly on their envelopes") {
  std::vector<double> inverse(200);
  for (std::size_t k = 0; k < inverse.size(); ++k) {
    inverse[k] = 0.7 / (static_cast<double>(k) + 1.0);
  }
  const RateEnvelope env_k =
      make_envelope(RateKind::kBigOInverseK, 0.7, SequenceTag::kFpr);
  const RateCertificate exact = certify(inverse, SequenceTag::kFpr, env_k);
  CHECK(exact.verdict == RateVerdict::kCertified);
  CHECK(exact.max_relative_violation == 0.0);
  CHECK_FALSE(exact.first_violation_k.has_value());
  CHECK(exact.fitted_exponent == doctest::Approx(-1.0).epsilon(1e-6));

  std::vector<double> nudged = inverse;
  for (double& v : nudged) v *= 1.0 + 2e-7;
  const RateCertificate broken = certify(nudged, SequenceTag::kFpr, env_k);
  CHECK(broken.verdict == RateVerdict::kViolated);
  REQUIRE(broken.first_violation_k.has_value());
  CHECK(*broken.first_violation_k == 0);
  CHECK(broken.max_relative_violation == doctest::Approx(2e-7).epsilon(1e-3));

  // A certificate for one sequence kind says nothing about another.
  const RateCertificate mismatched =
      certify(inverse, SequenceTag::kObjectiveGap, env_k);
  CHECK(mismatched.verdict == RateVerdict::kNotApplicable);

  RateEnvelope linear =
      make_envelope(RateKind::kLinear, 3.0, SequenceTag::kDistance);
  linear.factors.assign(29, 0.5);
  std::vector<double> decaying(30);
  for (std::size_t k = 0; k < decaying.size(); ++k) {
    decaying[k] = 3.0 * std::ldexp(1.0, -static_cast<int>(k));
  }
  const RateCertificate lin_ok =
      certify(decaying, SequenceTag::kDistance, linear);
  CHECK(lin_ok.verdict == RateVerdict::kCertified);
  CHECK(lin_ok.max_relative_violation == 0.0);
  decaying[10] *= 1.01;
  const RateCertificate lin_bad =
      certify(decaying, SequenceTag::kDistance, linear);
  CHECK(lin_bad.verdict == RateVerdict::kViolated);
  REQUIRE(lin_bad.first_violation_k.has_value());
  CHECK(*lin_bad.first_violation_k == 10);

  std::vector<double> slow(64);
  for (std::size_t k = 0; k < slow.size(); ++k) {
    slow[k] = 2.0 / std::sqrt(static_cast<double>(k) + 1.0);
  }
  const RateEnvelope env_sqrt =
      make_envelope(RateKind::kBigOInverseSqrtK, 2.0, SequenceTag::kSSum);
  CHECK(certify(slow, SequenceTag::kSSum, env_sqrt).verdict ==
        RateVerdict::kCertified);
  slow[5] *= 1.01;
  const RateCertificate sqrt_bad = certify(slow, SequenceTag::kSSum, env_sqrt);
  CHECK(sqrt_bad.verdict == RateVerdict::kViolated);
  CHECK(*sqrt_bad.first_violation_k == 5);

  CHECK_THROWS_AS(certify(inverse, SequenceTag::kFpr,
                          make_envelope(RateKind::kBigOInverseK, -1.0,
                                        SequenceTag::kFpr)),
                  InvalidArgumentError);
  RateEnvelope bad_factor =
      make_envelope(RateKind::kLinear, 1.0, SequenceTag::kFpr);
  bad_factor.factors.assign(199, 1.2);
  CHECK_THROWS_AS(certify(inverse, SequenceTag::kFpr, bad_factor),
                  InvalidArgumentError);
  RateEnvelope short_factors =
      make_envelope(RateKind::kLinear, 1.0, SequenceTag::kFpr);
  short_factors.factors.assign(100, 0.5);
  CHECK_THROWS_AS(certify(inverse, SequenceTag::kFpr, short_factors),
                  InvalidArgumentError);
  CHECK_THROWS_AS(
      certify({std::numeric_limits<double>::quiet_NaN()}, SequenceTag::kFpr,
              env_k),
      InvalidArgumentError);
  CHECK_THROWS_AS(certify({}, SequenceTag::kFpr, env_k),
                  InvalidArgumentError);

  const RateCertificate gated = not_applicable_certificate(env_k);
  CHECK(gated.verdict == RateVerdict::kNotApplicable);
  CHECK(std::isnan(gated.fitted_exponent));
  CHECK(std::isnan(gated.fitted_linear_factor));
}

TEST_CASE("little-o support needs a strictly faster fitted tail") {
  std::vector<double> faster(400);
  std::vector<double> borderline(400);
  for (std::size_t k = 0; k < faster.size(); ++k) {
    const double kd = static_cast<double>(k) + 1.0;
    faster[k] = 1.0 / (kd * std::sqrt(kd));
    borderline[k] = 1.0 / kd;
  }
  const RateEnvelope little =
      make_envelope(RateKind::kLittleOInverseK, 1.0, SequenceTag::kFpr);
  const RateCertificate fast_cert = certify(faster, SequenceTag::kFpr, little);
  CHECK(fast_cert.verdict == RateVerdict::kCertified);
  CHECK(little_o_supported(fast_cert));
  const RateCertificate slow_cert =
      certify(borderline, SequenceTag::kFpr, little);
  CHECK(slow_cert.verdict == RateVerdict::kCertified);
  CHECK_FALSE(little_o_supported(slow_cert));

  // Big-O envelopes never claim the stricter statement.
  const RateCertificate big_cert =
      certify(faster, SequenceTag::kFpr,
              make_envelope(RateKind::kBigOInverseK, 1.0, SequenceTag::kFpr));
  CHECK(big_cert.verdict == RateVerdict::kCertified);
  CHECK_FALSE(little_o_supported(big_cert));

  std::vector<double> cubic(400);
  std::vector<double> quadratic(400);
  for (std::size_t k = 0; k < cubic.size(); ++k) {
    const double kd = static_cast<double>(k) + 1.0;
    cubic[k] = 1.0 / (kd * kd * std::sqrt(kd));
    quadratic[k] = 1.0 / (kd * kd);
  }
  const RateEnvelope little_sq = make_envelope(
      RateKind::kLittleOInverseKSquared, 1.0, SequenceTag::kFpr);
  CHECK(little_o_supported(certify(cubic, SequenceTag::kFpr, little_sq)));
  CHECK_FALSE(
      little_o_supported(certify(quadratic, SequenceTag::kFpr, little_sq)));

  // Gate helper is inert: no diagnostics, no support.
  CHECK_FALSE(little_o_supported(not_applicable_certificate(little)));
}

TEST_CASE("ergodic auxiliary terms stay inside the averaged envelope") {
  const QuadraticPair pair = quadratic_pair();
  const double gamma = 1.0;
  const Vec zstar = estimate_fixed_point(*pair.f, *pair.g, gamma, pair.z0, 2000);

  SolverConfig config;
  config.gamma = gamma;
  config.schedule = RelaxationSchedule::constant(0.5);
  config.max_iters = 400;
  config.known_fixed_point = zstar;
  config.trace_mode = TraceMode::kFull;
  const IterationTrace trace = run_prs(*pair.f, *pair.g, config, pair.z0);
  REQUIRE(trace.z_star.has_value());

  const Vec& xstar = trace.x_star;
  const Vec gf_star = scaled(1.0 / gamma, sub(xstar, *trace.z_star));
  const Vec gg_star = scaled(1.0 / gamma, sub(*trace.z_star, xstar));

  // Rebuild the weighted gradient averages alongside the recorded ergodic
  // iterates; both functions here have mu = beta = 1.
  std::vector<double> s_bar(trace.steps());
  Vec avg_gf = trace.grad_f[0];
  Vec avg_gg = trace.grad_g[0];
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    if (k > 0) {
      const double w = trace.lambda[k] / trace.lambda_sum[k];
      combine_into(1.0 - w, avg_gf, w, trace.grad_f[k], avg_gf);
      combine_into(1.0 - w, avg_gg, w, trace.grad_g[k], avg_gg);
    }
    const double sf = std::max(0.5 * dist_sq(trace.erg_x_f[k], xstar),
                               0.5 * dist_sq(avg_gf, gf_star));
    const double sg = std::max(0.5 * dist_sq(trace.erg_x_g[k], xstar),
                               0.5 * dist_sq(avg_gg, gg_star));
    s_bar[k] = sf + sg;
  }

  RateEnvelope envelope = make_envelope(
      RateKind::kBigOInverseK, dist_sq(pair.z0, zstar) / (4.0 * gamma),
      SequenceTag::kSSum);
  envelope.ergodicity = Ergodicity::kErgodic;
  const RateCertificate cert = certify(s_bar, SequenceTag::kSSum, envelope);
  CHECK(cert.verdict == RateVerdict::kCertified);
  CHECK(cert.max_relative_violation <= kProvenRateTol);
}

TEST_CASE("certifier verdicts agree with direct recomputation") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const RateKind kind = static_cast<RateKind>(t % 6);
    RateEnvelope env;
    env.kind = kind;
    env.constant = 0.5 + rng.uniform(0.0, 2.0);
    env.applies_to = SequenceTag::kResidual;
    const std::size_t n = 40;
    if (kind == RateKind::kLinear) {
      env.factors.resize(n - 1);
      for (double& f : env.factors) f = rng.uniform(0.3, 0.95);
    }

    std::vector<double> bounds(n);
    double running = env.constant;
    for (std::size_t k = 0; k < n; ++k) {
      const double kd = static_cast<double>(k) + 1.0;
      switch (kind) {
        case RateKind::kBigOInverseK:
        case RateKind::kLittleOInverseK:
          bounds[k] = env.constant / kd;
          break;
        case RateKind::kBigOInverseKSquared:
        case RateKind::kLittleOInverseKSquared:
          bounds[k] = env.constant / (kd * kd);
          break;
        case RateKind::kBigOInverseSqrtK:
          bounds[k] = env.constant / std::sqrt(kd);
          break;
        case RateKind::kLinear:
          bounds[k] = running;
          if (k + 1 < n) running *= env.factors[k];
          break;
      }
    }

    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k) {
      values[k] = bounds[k] * std::exp(0.3 * rng.gaussian());
    }

    double worst = -std::numeric_limits<double>::infinity();
    std::optional<std::size_t> first;
    for (std::size_t k = 0; k < n; ++k) {
      const double violation = (values[k] - bounds[k]) / bounds[k];
      worst = std::max(worst, violation);
      if (violation > kProvenRateTol && !first.has_value()) first = k;
    }

    const RateCertificate cert =
        certify(values, SequenceTag::kResidual, env);
    CHECK((cert.verdict == RateVerdict::kCertified) == !first.has_value());
    CHECK(cert.max_relative_violation == doctest::Approx(worst).epsilon(1e-12));
    CHECK(cert.first_violation_k == first);
  }
}

TEST_SUITE_END();

}  // namespace
