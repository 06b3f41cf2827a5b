// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "doctest.h"
#include "splitkit/admm.hpp"
#include "splitkit/errors.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/prox.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/splitting.hpp"
#include "splitkit/vec.hpp"

namespace {

using namespace splitkit;

constexpr double kRoot3 = 1.7320508075688772;

double rel_diff(const Vec& a, const Vec& b) {
  return dist(a, b) / std::max(1.0, nrm2(b));
}

Matrix gaussian_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data) v = rng.gaussian();
  return m;
}

Matrix spd_matrix(Rng& rng, std::size_t n, double shift) {
  return add_scaled_identity(gram(gaussian_matrix(rng, n, n)), shift);
}

Matrix scaled_identity(std::size_t n, double s) {
  Matrix m = Matrix::identity(n);
  for (double& v : m.data) v *= s;
  return m;
}

Matrix symmetrized(const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      out(i, j) = 0.5 * (m(i, j) + m(j, i));
  return out;
}

AdmmObjective random_quadratic(Rng& rng, std::size_t n, double shift) {
  return AdmmObjective::quadratic(spd_matrix(rng, n, shift),
                                  rng.gaussian_vec(n));
}

// f = g = (1/2) v^2 coupled through x + y = 0.
AdmmProblem unit_scalar_problem() {
  return make_admm_problem(
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}), {0.0});
}

RelaxationSchedule alternating_schedule() {
  return RelaxationSchedule::from_function(
      [](std::size_t k) { return k % 2 == 0 ? 0.85 : 0.45; });
}

// Dual pair of a both-quadratic problem: d_f(w) = f*(A^T w) and
// d_g(w) = g*(B^T w) + <rhs, w>, both quadratic again.
struct DualPair {
  FnPtr d_f;
  FnPtr d_g;
};

DualPair dual_functions(const AdmmProblem& p) {
  Matrix pf_inv = pseudo_inverse(p.f.quad_p());
  Matrix pg_inv = pseudo_inverse(p.g.quad_p());
  Matrix p_df = symmetrized(matmul(matmul(p.amat, pf_inv), transpose(p.amat)));
  Vec q_df = scaled(-1.0, matvec(p.amat, matvec(pf_inv, p.f.quad_q())));
  Matrix p_dg = symmetrized(matmul(matmul(p.bmat, pg_inv), transpose(p.bmat)));
  Vec q_dg = scaled(
      -1.0, add(matvec(p.bmat, matvec(pg_inv, p.g.quad_q())), p.rhs));
  return {make_quadratic(std::move(p_df), std::move(q_df)),
          make_quadratic(std::move(p_dg), std::move(q_dg))};
}

TEST_SUITE_BEGIN("admm");

TEST_CASE("objective descriptors and problem assembly") {
  const AdmmObjective f = AdmmObjective::quadratic(
      Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}}), {1.0, -1.0});
  CHECK(f.kind() == AdmmObjectiveKind::kQuadratic);
  CHECK(f.dim() == 2);
  CHECK(f.value({1.0, 2.0}) == doctest::Approx(8.0));
  CHECK(f.quad_p()(0, 1) == 1.0);
  CHECK(f.quad_q()[1] == -1.0);
  CHECK(f.function()->mu() == doctest::Approx(0.5 * (5.0 - std::sqrt(5.0))));

  const AdmmObjective l = AdmmObjective::l1(3, 0.5);
  CHECK(l.kind() == AdmmObjectiveKind::kL1);
  CHECK(l.dim() == 3);
  CHECK(l.l1_weight() == 0.5);
  CHECK(l.value({1.0, -2.0, 3.0}) == doctest::Approx(3.0));
  CHECK(l.function()->mu() == 0.0);

  const AdmmObjective b = AdmmObjective::box({0.0, 0.0}, {1.0, 2.0});
  CHECK(b.kind() == AdmmObjectiveKind::kBox);
  CHECK(b.value({0.5, 1.0}) == 0.0);
  CHECK(b.value({2.0, 0.0}) == kPlusInfinity);

  const AdmmProblem problem = make_admm_problem(
      f, AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{2.0, 0.0}, {0.0, 1.0}}),
      Matrix::from_rows({{1.0}, {1.0}}), {0.0, 0.0});
  CHECK(problem.norm_a == doctest::Approx(2.0));
  CHECK(problem.alpha_a == doctest::Approx(1.0));
  CHECK(problem.norm_b == doctest::Approx(std::sqrt(2.0)));
  CHECK(problem.alpha_b == doctest::Approx(0.0));
  CHECK(problem.coupled_dim() == 2);
  CHECK(problem.objective({1.0, 2.0}, {0.5}) == doctest::Approx(8.125));
}

TEST_CASE("dual constants follow the conjugate transfer rules") {
  const Vec zero2 = zeros(2);
  // beta_f = 2 with alpha_A = 3 transfers to a dual modulus of 6; mu_g = 4
  // with ||B|| = 2 transfers to a dual Lipschitz constant of 1.
  const AdmmProblem problem = make_admm_problem(
      AdmmObjective::quadratic(scaled_identity(2, 0.5), zero2),
      AdmmObjective::quadratic(Matrix::from_rows({{4.0, 0.0}, {0.0, 5.0}}),
                               zero2),
      scaled_identity(2, kRoot3), scaled_identity(2, 2.0), zero2);
  const DualConstants dc = dual_constants(problem);
  CHECK(dc.mu_df == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(dc.beta_dg == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dc.mu_dg == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(dc.beta_df == doctest::Approx(0.5 / 3.0).epsilon(1e-12));

  // A column that spans no row space contributes nothing.
  const AdmmProblem tall = make_admm_problem(
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      AdmmObjective::quadratic(Matrix::identity(2), zero2),
      Matrix::from_rows({{1.0}, {1.0}}), Matrix::identity(2), zero2);
  CHECK(tall.alpha_a == 0.0);
  CHECK(dual_constants(tall).mu_df == 0.0);

  // Inverting the quadratic swaps the modulus and the Lipschitz constant.
  const Matrix p = Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}});
  const AdmmObjective fq = AdmmObjective::quadratic(p, zero2);
  const AdmmObjective conj =
      AdmmObjective::quadratic(symmetrized(pseudo_inverse(p)), zero2);
  CHECK(std::abs(conj.function()->beta() - fq.function()->mu()) <= 1e-12);
  CHECK(std::abs(conj.function()->mu() - fq.function()->beta()) <= 1e-12);
}

TEST_CASE("scalar fixture halves every iterate") {
  const AdmmProblem problem = unit_scalar_problem();
  AdmmConfig cfg;
  cfg.max_iters = 20;
  const AdmmTrace trace = run_admm(problem, cfg, {1.0});
  REQUIRE(trace.steps() == 20);
  for (std::size_t k = 0; k < 20; ++k) {
    const double half_next = std::ldexp(1.0, -static_cast<int>(k) - 1);
    CHECK(trace.y[k][0] == doctest::Approx(half_next).epsilon(1e-13));
    CHECK(trace.w_dg[k][0] == doctest::Approx(half_next).epsilon(1e-13));
    CHECK(trace.z[k][0] ==
          doctest::Approx(std::ldexp(1.0, -static_cast<int>(k))).epsilon(1e-13));
    CHECK(std::abs(trace.x[k][0]) <= 1e-15);
    CHECK(std::abs(trace.w_df[k][0]) <= 1e-14);
    CHECK(trace.lambda[k] == 0.5);
    CHECK(trace.lambda_sum[k] == doctest::Approx(0.5 * (k + 1.0)));
  }
  CHECK(trace.fpr[2] == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(trace.step_sq[2] == doctest::Approx(0.015625).epsilon(1e-12));
  // Constant relaxation makes the weighted average the plain mean.
  CHECK(trace.erg_y[3][0] == doctest::Approx(0.234375).epsilon(1e-12));

  // One step moves the governing variable by -2 gamma lambda times the
  // residual: residual (2, 0) at gamma = 1, lambda = 1/2 moves it by (-2, 0).
  const Vec zero2 = zeros(2);
  const AdmmProblem plane = make_admm_problem(
      AdmmObjective::quadratic(Matrix::identity(2), zero2),
      AdmmObjective::quadratic(Matrix::identity(2), zero2),
      Matrix::identity(2), Matrix::identity(2), zero2);
  const AdmmState state{{2.0, -1.0}, {0.0, 1.0}, {0.4, -1.3}};
  const Vec z_before = add(state.w_dg, state.y);
  const AdmmStepResult res = admm_step(plane, 1.0, 0.5, state);
  const Vec z_after = add(res.w_dg, res.y);
  CHECK(dist(sub(z_after, z_before), Vec{-2.0, 0.0}) <= 1e-12);
}

TEST_CASE("steps match the dual splitting on quadratic fixtures") {
  Rng rng(11);
  const AdmmObjective f = random_quadratic(rng, 2, 0.5);
  const AdmmObjective g = random_quadratic(rng, 4, 0.5);
  const Matrix a = gaussian_matrix(rng, 3, 2);
  const Matrix b = gaussian_matrix(rng, 3, 4);
  const Vec rhs = rng.gaussian_vec(3);
  const Vec w0 = rng.gaussian_vec(3);
  const AdmmProblem problem = make_admm_problem(f, g, a, b, rhs);
  const DualPair dual = dual_functions(problem);

  const RelaxationSchedule schedules[] = {RelaxationSchedule::constant(0.5),
                                          alternating_schedule()};
  for (const RelaxationSchedule& schedule : schedules) {
    AdmmConfig acfg;
    acfg.gamma = 0.7;
    acfg.schedule = schedule;
    acfg.max_iters = 25;
    const AdmmTrace at = run_admm(problem, acfg, w0);

    SolverConfig scfg;
    scfg.gamma = 0.7;
    scfg.schedule = schedule;
    scfg.max_iters = 25;
    const IterationTrace pt = run_prs(*dual.d_f, *dual.d_g, scfg, w0);

    REQUIRE(at.steps() == pt.steps());
    for (std::size_t k = 0; k < at.steps(); ++k) {
      CHECK(rel_diff(at.w_dg[k], pt.x_g[k]) <= 1e-9);
      CHECK(rel_diff(at.w_df[k], pt.x_f[k]) <= 1e-9);
      CHECK(rel_diff(at.z[k], pt.z[k]) <= 1e-9);
    }
  }
}

TEST_CASE("run checks hold on a general quadratic pair") {
  Rng rng(21);
  const AdmmObjective f = random_quadratic(rng, 2, 0.6);
  const AdmmObjective g = random_quadratic(rng, 3, 1.0);
  const Matrix a = gaussian_matrix(rng, 3, 2);
  const Matrix b = scaled_identity(3, 1.2);
  const Vec rhs = rng.gaussian_vec(3);
  const Vec w0 = rng.gaussian_vec(3);
  const AdmmProblem problem = make_admm_problem(f, g, a, b, rhs);

  AdmmConfig cfg;
  cfg.gamma = 0.9;
  cfg.schedule = alternating_schedule();
  cfg.max_iters = 80;
  cfg.assert_inequalities = true;
  cfg.reference = estimate_admm_solution(problem, cfg.gamma, w0, 4000);
  const AdmmTrace trace = run_admm(problem, cfg, w0);

  REQUIRE(trace.inequalities.has_value());
  const InequalityReport& report = *trace.inequalities;
  CHECK(report.all_passed());
  REQUIRE(report.find("residual-identity") != nullptr);
  CHECK(report.find("residual-identity")->applicable);
  CHECK(report.find("residual-identity")->comparisons == trace.steps());
  CHECK(report.find("upper-fundamental")->applicable);
  CHECK(report.find("lower-fundamental")->applicable);
  CHECK(!report.find("residual-envelope")->applicable);
  CHECK(report.find("linear-contraction")->applicable);
  CHECK(report.find("primal-gradient-g")->applicable);
  CHECK(report.find("primal-gradient-f")->applicable);
  CHECK(trace.steps() == 80);
  // The recorded distances follow the reference.
  CHECK(trace.dist_to_zstar.back() < trace.dist_to_zstar.front());
}

TEST_CASE("run checks hold with an l1 block and the residual envelope") {
  Rng rng(22);
  const AdmmObjective f = AdmmObjective::l1(3, 0.3);
  const AdmmObjective g = random_quadratic(rng, 3, 1.0);
  const Vec rhs = rng.gaussian_vec(3);
  const Vec w0 = rng.gaussian_vec(3);
  const AdmmProblem problem = make_admm_problem(
      f, g, Matrix::identity(3), Matrix::identity(3), rhs);

  AdmmConfig cfg;
  cfg.gamma = 1.0;
  cfg.max_iters = 300;
  cfg.assert_inequalities = true;
  const AdmmTrace trace = run_admm(problem, cfg, w0);

  REQUIRE(trace.inequalities.has_value());
  const InequalityReport& report = *trace.inequalities;
  CHECK(report.all_passed());
  CHECK(report.find("residual-envelope")->applicable);
  CHECK(report.find("residual-envelope")->comparisons == trace.steps() - 1);
  CHECK(report.find("linear-contraction")->applicable);
  CHECK(report.find("primal-gradient-g")->applicable);
  CHECK(!report.find("primal-gradient-f")->applicable);
}

TEST_CASE("run checks hold with a box block entering negated") {
  Rng rng(23);
  const AdmmObjective f = AdmmObjective::box(Vec(2, -1.0), Vec(2, 1.0));
  const AdmmObjective g = random_quadratic(rng, 2, 0.5);
  const Matrix b = Matrix::from_rows({{1.1, 0.2}, {0.2, 0.9}});
  const Vec rhs = rng.gaussian_vec(2);
  const Vec w0 = rng.gaussian_vec(2);
  const AdmmProblem problem =
      make_admm_problem(f, g, scaled_identity(2, -1.0), b, rhs);

  AdmmConfig cfg;
  cfg.gamma = 0.8;
  cfg.schedule = RelaxationSchedule::constant(0.7);
  cfg.max_iters = 120;
  cfg.assert_inequalities = true;
  cfg.reference = estimate_admm_solution(problem, cfg.gamma, w0, 12000);
  const AdmmTrace trace = run_admm(problem, cfg, w0);

  REQUIRE(trace.inequalities.has_value());
  CHECK(trace.inequalities->all_passed());
  CHECK(!trace.inequalities->find("residual-envelope")->applicable);
  CHECK(trace.inequalities->find("linear-contraction")->applicable);
  CHECK(trace.inequalities->find("primal-gradient-g")->applicable);
  CHECK(!trace.inequalities->find("primal-gradient-f")->applicable);
}

TEST_CASE("feasible start keeps the residual at zero") {
  // Optimum x* = y* = (1, 2) with multiplier w* = (1, 2); gamma = 3 makes
  // every subproblem solve exact in floating point, so starting the governing
  // variable at its fixed point reproduces the solution without any error.
  const Vec zero2 = zeros(2);
  const AdmmProblem problem = make_admm_problem(
      AdmmObjective::quadratic(Matrix::identity(2), zero2),
      AdmmObjective::quadratic(Matrix::identity(2), zero2),
      Matrix::identity(2), Matrix::identity(2), {2.0, 4.0});
  const double gamma = 3.0;
  const Vec x_star{1.0, 2.0};
  const Vec w_star{1.0, 2.0};
  const Vec z_star{-2.0, -4.0};

  AdmmConfig cfg;
  cfg.gamma = gamma;
  cfg.max_iters = 25;
  cfg.assert_inequalities = true;
  cfg.reference = AdmmSolution{x_star, x_star, w_star, z_star, 5.0};
  const AdmmTrace trace = run_admm(problem, cfg, z_star);

  REQUIRE(trace.steps() == 25);
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    CHECK(trace.residual_norm_sq[k] == 0.0);
    CHECK(trace.x[k] == x_star);
    CHECK(trace.y[k] == x_star);
    CHECK(trace.w_dg[k] == w_star);
    CHECK(trace.s_df[k] == 0.0);
    CHECK(trace.s_dg[k] == 0.0);
  }
  REQUIRE(trace.inequalities.has_value());
  CHECK(trace.inequalities->all_passed());

  // At the fixed point the gap terms vanish identically.
  const AdmmGapTerms terms =
      primal_dual_gap_terms(problem, trace, w_star, x_star, x_star);
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    CHECK(terms.s_df[k] == 0.0);
    CHECK(terms.s_dg[k] == 0.0);
    CHECK(terms.ergodic_f_term[k] == 0.0);
    CHECK(terms.ergodic_g_term[k] == 0.0);
  }

  // The same fixed start with the stop rule armed halts after one record.
  AdmmConfig scfg = cfg;
  scfg.residual_stop = 0.0;
  const AdmmTrace stopped = run_admm(problem, scfg, z_star);
  CHECK(stopped.stopped_on_residual);
  CHECK(stopped.steps() == 1);
  CHECK(stopped.final_residual_sq == 0.0);
}

TEST_CASE("rate constants match their closed forms") {
  const AdmmProblem unit = unit_scalar_problem();
  // All moduli and norms equal one.
  CHECK(admm_rate_constant(1, unit, 1.0, 1.0) == 0.0);
  CHECK(admm_rate_constant(3, unit, 1.0, 0.5) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(admm_rate_constant(2, unit, 1.0, 1.0) == 1.0);
  CHECK(admm_rate_constant(4, unit, 1.0, 0.25) ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  // More relaxation contracts case 1 harder.
  CHECK(admm_rate_constant(1, unit, 1.0, 0.3) >
        admm_rate_constant(1, unit, 1.0, 0.7));

  const AdmmProblem nonsmooth = make_admm_problem(
      AdmmObjective::l1(1, 1.0),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}), {0.0});
  CHECK_THROWS_WITH_AS(admm_rate_constant(2, nonsmooth, 1.0, 0.5),
                       "rate constant needs mu(f) > 0", ConditionNotMetError);
  CHECK_THROWS_WITH_AS(admm_rate_constant(3, nonsmooth, 1.0, 0.5),
                       "rate constant needs mu(f) > 0", ConditionNotMetError);
  CHECK(admm_rate_constant(1, nonsmooth, 1.0, 0.5) < 1.0);

  const AdmmProblem flat_b = make_admm_problem(
      AdmmObjective::quadratic(Matrix::identity(2), zeros(2)),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::identity(2), Matrix::from_rows({{1.0}, {1.0}}), zeros(2));
  CHECK_THROWS_WITH_AS(admm_rate_constant(1, flat_b, 1.0, 0.5),
                       "rate constant needs alpha_B > 0", ConditionNotMetError);

  CHECK_THROWS_AS(admm_rate_constant(5, unit, 1.0, 0.5), InvalidArgumentError);
  CHECK_THROWS_AS(admm_rate_constant(0, unit, 1.0, 0.5), InvalidArgumentError);
  CHECK_THROWS_AS(admm_rate_constant(1, unit, 0.0, 0.5), InvalidArgumentError);
  CHECK_THROWS_AS(admm_rate_constant(1, unit, 1.0, 0.0), InvalidArgumentError);
}

TEST_CASE("implied bounds from contraction factors") {
  Rng rng(31);
  const AdmmObjective f = random_quadratic(rng, 3, 0.7);
  const AdmmObjective g = random_quadratic(rng, 3, 0.9);
  const Vec rhs = rng.gaussian_vec(3);
  const Vec w0 = rng.gaussian_vec(3);
  const AdmmProblem problem = make_admm_problem(
      f, g, Matrix::identity(3), Matrix::identity(3), rhs);
  const double gamma = 0.9;

  const AdmmSolution ref = estimate_admm_solution(problem, gamma, w0, 5000);
  AdmmConfig cfg;
  cfg.gamma = gamma;
  cfg.max_iters = 500;
  cfg.reference = ref;
  const AdmmTrace trace = run_admm(problem, cfg, w0);
  REQUIRE(trace.steps() == 500);

  double factor = 1.0;
  for (int which : {1, 2, 3, 4}) {
    factor = std::min(factor, admm_rate_constant(which, problem, gamma, 0.5));
  }
  CHECK(factor < 1.0);

  const std::vector<double> factors(499, factor);
  const InequalityReport report =
      admm_implied_bounds(trace, factors, ref.w, ref.z, gamma);
  CHECK(report.all_passed());
  for (const char* name : {"implied-dual-g", "implied-dual-f", "implied-fpr",
                           "implied-residual", "implied-objective-upper",
                           "implied-objective-lower"}) {
    REQUIRE(report.find(name) != nullptr);
    CHECK(report.find(name)->applicable);
    CHECK(report.find(name)->comparisons == 499);
    CHECK(report.find(name)->passed());
  }

  // Factors of one reduce every envelope to the plain distance bound.
  const std::vector<double> ones(499, 1.0);
  CHECK(admm_implied_bounds(trace, ones, ref.w, ref.z, gamma).all_passed());

  // A factor of zero at step zero collapses all later iterates onto the
  // solution: lambda = 1 on a balanced pair converges in one step, up to the
  // roundoff left behind by the factorized subproblem solves.
  const AdmmProblem unit = unit_scalar_problem();
  AdmmConfig ucfg;
  ucfg.schedule = RelaxationSchedule::constant(1.0);
  ucfg.max_iters = 8;
  ucfg.reference = AdmmSolution{{0.0}, {0.0}, {0.0}, {0.0}, 0.0};
  const AdmmTrace utrace = run_admm(unit, ucfg, {1.0});
  REQUIRE(utrace.steps() == 8);
  for (std::size_t k = 1; k < 8; ++k) {
    CHECK(std::abs(utrace.z[k][0]) <= 1e-15);
    CHECK(utrace.w_dg_dist[k] <= 1e-15);
  }
  const InequalityReport ureport = admm_implied_bounds(
      utrace, std::vector<double>(7, 0.0), {0.0}, {0.0}, 1.0);
  CHECK(ureport.all_passed());
  // lambda = 1 throughout leaves the damped step envelope unused.
  CHECK(!ureport.find("implied-fpr")->applicable);

  CHECK_THROWS_AS(
      admm_implied_bounds(trace, std::vector<double>(499, 1.2), ref.w, ref.z,
                          gamma),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      admm_implied_bounds(trace, std::vector<double>(100, 0.9), ref.w, ref.z,
                          gamma),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      admm_implied_bounds(trace, factors, zeros(2), ref.z, gamma),
      InvalidArgumentError);
}

TEST_CASE("gap terms certify the dual envelopes") {
  Rng rng(32);
  const AdmmObjective f = random_quadratic(rng, 2, 0.8);
  const AdmmObjective g = random_quadratic(rng, 2, 0.6);
  const Vec rhs = rng.gaussian_vec(2);
  const Vec w0 = rng.gaussian_vec(2);
  const AdmmProblem problem = make_admm_problem(
      f, g, Matrix::identity(2), Matrix::identity(2), rhs);

  const AdmmSolution ref = estimate_admm_solution(problem, 1.0, w0, 5000);
  AdmmConfig cfg;
  cfg.max_iters = 300;
  cfg.reference = ref;
  const AdmmTrace trace = run_admm(problem, cfg, w0);
  const AdmmGapTerms terms =
      primal_dual_gap_terms(problem, trace, ref.w, ref.x, ref.y);

  REQUIRE(terms.s_df.size() == trace.steps());
  const double scale = std::max(1.0, dist_sq(trace.z[0], ref.z));
  for (std::size_t k = 0; k < trace.steps(); ++k) {
    // Ergodic max terms stay below the certified envelope.
    CHECK(terms.ergodic_f_term[k] + terms.ergodic_g_term[k] <=
          terms.ergodic_bound[k] + 1e-9 * scale);
    // The running best is what the trace recorded.
    CHECK(terms.s_df[k] == trace.s_df[k]);
    CHECK(terms.s_dg[k] == trace.s_dg[k]);
    if (k > 0) CHECK(terms.s_sum_best[k] <= terms.s_sum_best[k - 1]);
  }
  // Faster than 1/(k+1): the scaled best sum keeps dropping.
  CHECK(terms.s_sum_best[299] * 300.0 < terms.s_sum_best[49] * 50.0);

  // Strong convexity drives the ergodic primal block at the squared rate:
  // fit the tail slope of log ||ybar - y*||^2 against log (k + 1).
  AdmmConfig lcfg;
  lcfg.max_iters = 10000;
  const AdmmTrace long_trace = run_admm(problem, lcfg, w0);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double n = 0.0;
  for (std::size_t k = 5000; k < 10000; k += 10) {
    const double d2 = dist_sq(long_trace.erg_y[k], ref.y);
    REQUIRE(d2 > 0.0);
    const double lx = std::log(static_cast<double>(k + 1));
    const double ly = std::log(d2);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    n += 1.0;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope <= -1.9);

  CHECK_THROWS_AS(primal_dual_gap_terms(problem, trace, zeros(3), ref.x, ref.y),
                  InvalidArgumentError);
}

TEST_CASE("cross-order runs coincide on quadratic fixtures") {
  Rng rng(41);
  const double gamma = 0.7;

  // Both blocks quadratic: swapping the update order corresponds to a
  // reflected start 2 w_dg^0 - w^0 - gamma rhs of the governing variable.
  const AdmmObjective f = random_quadratic(rng, 2, 0.5);
  const AdmmObjective g = random_quadratic(rng, 2, 0.4);
  const Matrix a = gaussian_matrix(rng, 3, 2);
  const Matrix b = gaussian_matrix(rng, 3, 2);
  const Vec rhs = rng.gaussian_vec(3);
  const Vec w0 = rng.gaussian_vec(3);
  const AdmmProblem base_problem = make_admm_problem(f, g, a, b, rhs);
  const AdmmProblem swap_problem = make_admm_problem(g, f, b, a, rhs);

  for (double lam : {0.5, 0.8}) {
    AdmmConfig cfg;
    cfg.gamma = gamma;
    cfg.schedule = RelaxationSchedule::constant(lam);
    cfg.max_iters = 25;
    const AdmmTrace base = run_admm(base_problem, cfg, w0);
    Vec zhat0 = combine(2.0, base.w_dg[0], -1.0, w0);
    axpy_inplace(-gamma, rhs, zhat0);
    const AdmmTrace swapped = run_admm(swap_problem, cfg, zhat0);
    REQUIRE(swapped.steps() == base.steps());
    for (std::size_t k = 0; k < base.steps(); ++k) {
      CHECK(rel_diff(swapped.w_dg[k], base.w_df[k]) <= 1e-12);
      CHECK(rel_diff(swapped.y[k], base.x[k]) <= 1e-12);
    }
  }

  // One quadratic block suffices when it sits on the side updated first.
  const AdmmObjective l1f = AdmmObjective::l1(3, 0.3);
  const AdmmObjective gq = random_quadratic(rng, 2, 0.5);
  const Matrix bq = gaussian_matrix(rng, 3, 2);
  const Vec rhs2 = rng.gaussian_vec(3);
  const Vec w02 = rng.gaussian_vec(3);
  const AdmmProblem mixed =
      make_admm_problem(l1f, gq, Matrix::identity(3), bq, rhs2);
  const AdmmProblem mixed_swap =
      make_admm_problem(gq, l1f, bq, Matrix::identity(3), rhs2);
  AdmmConfig mcfg;
  mcfg.gamma = gamma;
  mcfg.schedule = RelaxationSchedule::constant(0.8);
  mcfg.max_iters = 25;
  const AdmmTrace mbase = run_admm(mixed, mcfg, w02);
  Vec mzhat0 = combine(2.0, mbase.w_dg[0], -1.0, w02);
  axpy_inplace(-gamma, rhs2, mzhat0);
  const AdmmTrace mswapped = run_admm(mixed_swap, mcfg, mzhat0);
  for (std::size_t k = 0; k < mbase.steps(); ++k) {
    CHECK(rel_diff(mswapped.w_dg[k], mbase.w_df[k]) <= 1e-12);
    CHECK(rel_diff(mswapped.y[k], mbase.x[k]) <= 1e-12);
  }
}

TEST_CASE("solver guards reject unusable inputs") {
  const AdmmObjective quad2 =
      AdmmObjective::quadratic(Matrix::identity(2), zeros(2));
  const AdmmState state2{zeros(2), zeros(2), zeros(2)};

  // Nonquadratic blocks demand +/- identity coupling.
  const AdmmProblem bad = make_admm_problem(
      AdmmObjective::l1(2, 1.0), quad2,
      Matrix::from_rows({{1.0, 0.0}, {0.0, 2.0}}), Matrix::identity(2),
      zeros(2));
  CHECK_THROWS_AS(admm_step(bad, 1.0, 0.5, state2), UnsupportedSubproblemError);
  AdmmConfig cfg;
  CHECK_THROWS_AS(run_admm(bad, cfg, zeros(2)), UnsupportedSubproblemError);

  const AdmmProblem negated = make_admm_problem(
      AdmmObjective::box(Vec(2, -1.0), Vec(2, 1.0)), quad2,
      scaled_identity(2, -1.0), Matrix::identity(2), zeros(2));
  CHECK_NOTHROW(admm_step(negated, 1.0, 0.5, state2));
  const AdmmProblem stretched = make_admm_problem(
      AdmmObjective::box(Vec(2, -1.0), Vec(2, 1.0)), quad2,
      scaled_identity(2, 2.0), Matrix::identity(2), zeros(2));
  CHECK_THROWS_AS(admm_step(stretched, 1.0, 0.5, state2),
                  UnsupportedSubproblemError);

  // Singular normal matrix: a flat objective along the null space of A.
  const AdmmProblem singular = make_admm_problem(
      AdmmObjective::quadratic(Matrix(2, 2), zeros(2)),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{1.0, -1.0}}), Matrix::from_rows({{1.0}}), {0.0});
  CHECK_THROWS_AS(admm_step(singular, 1.0, 0.5, {zeros(2), zeros(1), zeros(1)}),
                  SingularSystemError);

  const AdmmProblem unit = unit_scalar_problem();
  const AdmmState state1{zeros(1), zeros(1), zeros(1)};
  CHECK_THROWS_AS(admm_step(unit, 0.0, 0.5, state1), InvalidArgumentError);
  CHECK_THROWS_AS(admm_step(unit, 1.0, 0.0, state1), InvalidArgumentError);
  CHECK_THROWS_AS(admm_step(unit, 1.0, 1.5, state1), InvalidArgumentError);
  CHECK_THROWS_AS(admm_step(unit, 1.0, 0.5, {zeros(2), zeros(1), zeros(1)}),
                  InvalidArgumentError);

  AdmmConfig bad_iters;
  bad_iters.max_iters = 0;
  CHECK_THROWS_AS(run_admm(unit, bad_iters, {1.0}), InvalidArgumentError);
  AdmmConfig bad_stop;
  bad_stop.residual_stop = -1.0;
  CHECK_THROWS_AS(run_admm(unit, bad_stop, {1.0}), InvalidArgumentError);
  AdmmConfig ok_cfg;
  CHECK_THROWS_AS(run_admm(unit, ok_cfg, zeros(2)), InvalidArgumentError);
  CHECK_THROWS_AS(
      run_admm(unit, ok_cfg, {std::numeric_limits<double>::quiet_NaN()}),
      InvalidArgumentError);

  CHECK_THROWS_AS(AdmmObjective::l1(0, 1.0), InvalidArgumentError);
  CHECK_THROWS_AS(AdmmObjective::box({1.0}, {0.0}), InvalidArgumentError);
  CHECK_THROWS_AS(
      make_admm_problem(quad2, quad2, Matrix(2, 2), Matrix::identity(2),
                        zeros(2)),
      InvalidArgumentError);
  CHECK_THROWS_AS(
      make_admm_problem(quad2, quad2, Matrix::identity(2), Matrix::identity(2),
                        zeros(3)),
      InvalidArgumentError);

  // Overflowing data surfaces as divergence, not as silent NaNs.
  const AdmmProblem huge = make_admm_problem(
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {-1e308}),
      AdmmObjective::quadratic(Matrix::from_rows({{1.0}}), {0.0}),
      Matrix::from_rows({{1.0}}), Matrix::from_rows({{1.0}}), {1e308});
  AdmmConfig hcfg;
  hcfg.max_iters = 5;
  CHECK_THROWS_AS(run_admm(huge, hcfg, {0.0}), DivergenceError);
}

TEST_CASE("solution estimation agrees with a long run") {
  Rng rng(51);
  const AdmmObjective f = random_quadratic(rng, 2, 0.8);
  const AdmmObjective g = random_quadratic(rng, 2, 0.6);
  const Vec rhs = rng.gaussian_vec(2);
  const Vec w0 = rng.gaussian_vec(2);
  const AdmmProblem problem = make_admm_problem(
      f, g, Matrix::identity(2), Matrix::identity(2), rhs);

  const AdmmSolution sol = estimate_admm_solution(problem, 1.0, w0, 4000);
  const Vec residual = sub(
      add(matvec(problem.amat, sol.x), matvec(problem.bmat, sol.y)), rhs);
  CHECK(nrm2(residual) <= 1e-8);
  CHECK(std::isfinite(sol.objective));

  AdmmConfig cfg;
  cfg.max_iters = 4000;
  const AdmmTrace trace = run_admm(problem, cfg, w0);
  CHECK(rel_diff(trace.final_z, sol.z) <= 1e-10);
  CHECK(rel_diff(trace.final_w_dg, sol.w) <= 1e-10);
  CHECK(!trace.stopped_on_residual);

  // The stop rule needs both a small residual and a stalled objective.
  AdmmConfig scfg;
  scfg.max_iters = 50;
  scfg.residual_stop = 1e-8;
  const AdmmTrace stopped = run_admm(unit_scalar_problem(), scfg, {1.0});
  CHECK(stopped.stopped_on_residual);
  CHECK(stopped.steps() < 50);
  CHECK(stopped.final_residual_sq <= 1e-8);

  CHECK_THROWS_AS(estimate_admm_solution(problem, 1.0, w0, 0),
                  InvalidArgumentError);
}

TEST_SUITE_END();

}  // namespace
