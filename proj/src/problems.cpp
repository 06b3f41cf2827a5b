// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "splitkit/errors.hpp"
#include "splitkit/rng.hpp"

namespace splitkit {

namespace {

std::size_t dim_at(const ProblemRequest& request, std::size_t index,
                   std::size_t fallback) {
  if (index < request.dims.size()) {
    if (request.dims[index] == 0) {
      throw InvalidArgumentError("dimension entries must be positive");
    }
    return request.dims[index];
  }
  return fallback;
}

void check_dim_count(const ProblemRequest& request, std::size_t expected) {
  if (request.dims.size() > expected) {
    throw InvalidArgumentError("kind '" + request.kind + "' takes at most " +
                               std::to_string(expected) +
                               " dimension entries, got " +
                               std::to_string(request.dims.size()));
  }
}

void check_params(const ProblemRequest& request,
                  std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : request.params) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvalidArgumentError("kind '" + request.kind +
                                 "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) {
      throw InvalidArgumentError("parameter '" + key + "' must be finite");
    }
  }
}

double param_or(const ProblemRequest& request, const char* key,
                double fallback) {
  auto it = request.params.find(key);
  return it == request.params.end() ? fallback : it->second;
}

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix out(rows, cols);
  out.data = rng.gaussian_vec(rows * cols);
  return out;
}

// Gram-based SPD matrix with spectrum bounded away from zero.
Matrix random_spd(Rng& rng, std::size_t n) {
  Matrix g = gaussian_matrix(rng, n, n);
  Matrix p = gram(g);
  double inv_n = 1.0 / static_cast<double>(n);
  for (double& entry : p.data) {
    entry *= inv_n;
  }
  return add_scaled_identity(p, 0.5);
}

Vec unit_gaussian(Rng& rng, std::size_t n) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vec v = rng.gaussian_vec(n);
    double norm = nrm2(v);
    if (norm > 1e-8) {
      scale_inplace(1.0 / norm, v);
      return v;
    }
  }
  throw InvalidArgumentError("failed to draw a usable direction");
}

GeneratedProblem quadratic_pair(const ProblemRequest& request) {
  check_dim_count(request, 1);
  check_params(request, {});
  std::size_t n = dim_at(request, 0, 8);
  Rng rng(request.seed);
  GeneratedProblem out;
  out.category = ProblemCategory::kSplitting;
  out.kind = request.kind;
  out.dim = n;
  out.f = make_quadratic(random_spd(rng, n), rng.gaussian_vec(n));
  out.g = make_quadratic(random_spd(rng, n), rng.gaussian_vec(n));
  out.z0 = rng.gaussian_vec(n);
  return out;
}

// Auxiliary-variable split of an l1 loss with a quadratic regularizer:
//   min (1/2)||x||^2 + weight ||y||_1  s.t.  M x - y = b,
// so the x-update is a regularized least-squares solve and the y-update a
// soft threshold. The strongly convex side is assigned to the first block.
GeneratedProblem lasso_like(const ProblemRequest& request) {
  check_dim_count(request, 2);
  check_params(request, {"l1_weight"});
  std::size_t m = dim_at(request, 0, 20);
  std::size_t n = dim_at(request, 1, 8);
  double weight = param_or(request, "l1_weight", 1.0);
  if (weight <= 0.0) {
    throw InvalidArgumentError("l1_weight must be positive");
  }
  Rng rng(request.seed);
  Matrix design = gaussian_matrix(rng, m, n);
  double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  for (double& entry : design.data) {
    entry *= inv_sqrt_m;
  }
  Vec x_true = zeros(n);
  std::size_t support = std::max<std::size_t>(1, n / 4);
  for (std::size_t i = 0; i < support; ++i) {
    x_true[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  Vec rhs = matvec(design, x_true);
  axpy_inplace(0.1, rng.gaussian_vec(m), rhs);

  Matrix neg_identity = Matrix::identity(m);
  for (double& entry : neg_identity.data) {
    entry = -entry;
  }
  GeneratedProblem out;
  out.category = ProblemCategory::kAdmm;
  out.kind = request.kind;
  out.dim = m;
  out.admm = make_admm_problem(
      AdmmObjective::quadratic(Matrix::identity(n), zeros(n)),
      AdmmObjective::l1(m, weight), std::move(design),
      std::move(neg_identity), rhs);
  out.w0 = zeros(m);
  out.z0 = out.w0;
  return out;
}

GeneratedProblem two_subspaces(const ProblemRequest& request) {
  check_dim_count(request, 1);
  check_params(request, {"friedrichs_cos"});
  std::size_t d = dim_at(request, 0, 2);
  if (d < 2) {
    throw InvalidArgumentError("two-subspaces needs dimension >= 2");
  }
  double cosine = param_or(request, "friedrichs_cos", 0.5);
  if (cosine < 0.0 || cosine >= 1.0) {
    throw InvalidArgumentError("friedrichs_cos must lie in [0, 1)");
  }
  Rng rng(request.seed);
  Vec q1 = unit_gaussian(rng, d);
  Vec q2;
  for (int attempt = 0;; ++attempt) {
    Vec v = rng.gaussian_vec(d);
    axpy_inplace(-dot(q1, v), q1, v);
    double norm = nrm2(v);
    if (norm > 1e-8) {
      scale_inplace(1.0 / norm, v);
      q2 = std::move(v);
      break;
    }
    if (attempt >= 16) {
      throw InvalidArgumentError("failed to draw an orthogonal direction");
    }
  }
  Vec d2 = combine(cosine, q1, std::sqrt(1.0 - cosine * cosine), q2);

  GeneratedProblem out;
  out.category = ProblemCategory::kFeasibility;
  out.kind = request.kind;
  out.dim = d;
  out.sets = {make_line_through_origin(q1), make_line_through_origin(d2)};
  out.f = make_indicator(out.sets[0]);
  out.g = make_indicator(out.sets[1]);
  out.intersection = make_box(zeros(d), zeros(d));
  out.regularity = RegularityBound{subspace_mu_bound(cosine), 0.0};
  out.friedrichs_cos = cosine;
  out.z0 = rng.gaussian_vec(d);
  return out;
}

GeneratedProblem halfspace_pair(const ProblemRequest& request) {
  check_dim_count(request, 1);
  check_params(request, {});
  std::size_t d = dim_at(request, 0, 10);
  Rng rng(request.seed);
  Vec interior = rng.gaussian_vec(d);
  GeneratedProblem out;
  out.category = ProblemCategory::kFeasibility;
  out.kind = request.kind;
  out.dim = d;
  for (int i = 0; i < 2; ++i) {
    Vec normal = unit_gaussian(rng, d);
    double offset = dot(normal, interior) + 1.0;
    out.sets.push_back(make_halfspace(std::move(normal), offset));
  }
  out.f = make_indicator(out.sets[0]);
  out.g = make_indicator(out.sets[1]);
  out.z0 = rng.gaussian_vec(d);
  return out;
}

GeneratedProblem parallel_lines(const ProblemRequest& request) {
  check_dim_count(request, 0);
  check_params(request, {"offset"});
  double offset = param_or(request, "offset", 1.0);
  if (offset == 0.0) {
    throw InvalidArgumentError("offset must be nonzero");
  }
  Rng rng(request.seed);
  GeneratedProblem out;
  out.category = ProblemCategory::kFeasibility;
  out.kind = request.kind;
  out.dim = 2;
  out.sets = {make_hyperplane({0.0, 1.0}, 0.0),
              make_hyperplane({0.0, 1.0}, offset)};
  out.f = make_indicator(out.sets[0]);
  out.g = make_indicator(out.sets[1]);
  out.gap_reference = Vec{0.0, offset};
  out.z0 = rng.gaussian_vec(2);
  return out;
}

GeneratedProblem random_halfspaces(const ProblemRequest& request) {
  check_dim_count(request, 2);
  check_params(request, {});
  std::size_t d = dim_at(request, 0, 4);
  std::size_t count = dim_at(request, 1, 3);
  if (count < 2) {
    throw InvalidArgumentError("m-random-halfspaces needs at least 2 sets");
  }
  Rng rng(request.seed);
  Vec interior = rng.gaussian_vec(d);
  GeneratedProblem out;
  out.category = ProblemCategory::kFeasibility;
  out.kind = request.kind;
  out.dim = d;
  for (std::size_t i = 0; i < count; ++i) {
    Vec normal = unit_gaussian(rng, d);
    double offset = dot(normal, interior) + 0.5;
    out.sets.push_back(make_halfspace(std::move(normal), offset));
  }
  out.z0 = rng.gaussian_vec(d);
  return out;
}

// Feasible instance: plant a strictly complementary primal-dual pair and
// read b, c off it, so the embedding contains a ray with tau > 0.
// Infeasible instance: plant a nonnegative ray in the null space of A^T
// with <b, ray> < 0, so the embedding contains a ray with kappa > 0.
GeneratedProblem lp_hsde(const ProblemRequest& request) {
  check_dim_count(request, 2);
  check_params(request, {"feasible"});
  std::size_t m = dim_at(request, 0, 10);
  std::size_t n = dim_at(request, 1, 20);
  if (m < 2) {
    throw InvalidArgumentError("lp-hsde needs at least 2 constraints");
  }
  bool feasible = param_or(request, "feasible", 1.0) != 0.0;
  Rng rng(request.seed);
  Matrix a = gaussian_matrix(rng, m, n);
  Vec b;
  Vec c;
  if (feasible) {
    Vec x_star = rng.gaussian_vec(n);
    std::size_t active = m / 2;
    Vec s_star = zeros(m);
    Vec y_star = zeros(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (i < active) {
        y_star[i] = rng.uniform(0.5, 1.5);
      } else {
        s_star[i] = rng.uniform(0.5, 1.5);
      }
    }
    b = add(matvec(a, x_star), s_star);
    c = scaled(-1.0, matvec_transpose(a, y_star));
  } else {
    Vec ray = rng.uniform_vec(m, 0.5, 1.5);
    double ray_sq = nrm2_sq(ray);
    Vec ray_t_a = matvec_transpose(a, ray);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= ray[i] * ray_t_a[j] / ray_sq;
      }
    }
    Vec b0 = rng.gaussian_vec(m);
    b = sub(b0, scaled((dot(b0, ray) + 1.0) / ray_sq, ray));
    Vec y_dual = rng.uniform_vec(m, 0.5, 1.5);
    c = scaled(-1.0, matvec_transpose(a, y_dual));
  }
  HsdeInstance instance = make_hsde_instance(std::move(a), std::move(b),
                                             std::move(c));
  std::size_t embed = instance.embedding_dim();

  GeneratedProblem out;
  out.category = ProblemCategory::kFeasibility;
  out.kind = request.kind;
  out.dim = 2 * embed;
  out.sets = {hsde_cone_set(instance), hsde_graph_set(instance)};
  out.f = make_squared_distance(out.sets[0]);
  out.g = make_squared_distance(out.sets[1]);
  out.z0 = zeros(2 * embed);
  out.z0[n + m] = 1.0;          // tau slot of u
  out.z0[2 * embed - 1] = 1.0;  // kappa slot of v
  out.hsde = std::move(instance);
  return out;
}

}  // namespace

HsdeInstance make_hsde_instance(Matrix a, Vec b, Vec c) {
  if (a.rows == 0 || a.cols == 0) {
    throw InvalidArgumentError("constraint matrix must be nonempty");
  }
  if (b.size() != a.rows || c.size() != a.cols) {
    throw InvalidArgumentError("b, c sizes must match the constraint matrix");
  }
  HsdeInstance instance;
  instance.n = a.cols;
  instance.m = a.rows;
  std::size_t embed = instance.n + instance.m + 1;
  instance.q = Matrix(embed, embed);
  for (std::size_t i = 0; i < instance.m; ++i) {
    for (std::size_t j = 0; j < instance.n; ++j) {
      instance.q(j, instance.n + i) = a(i, j);
      instance.q(instance.n + i, j) = -a(i, j);
    }
  }
  for (std::size_t j = 0; j < instance.n; ++j) {
    instance.q(j, embed - 1) = c[j];
    instance.q(embed - 1, j) = -c[j];
  }
  for (std::size_t i = 0; i < instance.m; ++i) {
    instance.q(instance.n + i, embed - 1) = b[i];
    instance.q(embed - 1, instance.n + i) = -b[i];
  }
  instance.a = std::move(a);
  instance.b = std::move(b);
  instance.c = std::move(c);
  return instance;
}

SetPtr hsde_cone_set(const HsdeInstance& instance) {
  std::size_t n = instance.n;
  std::size_t m = instance.m;
  std::vector<SetPtr> blocks;
  blocks.push_back(make_box(Vec(n, -kPlusInfinity), Vec(n, kPlusInfinity)));
  blocks.push_back(make_nonneg_orthant(m));
  blocks.push_back(make_nonneg_orthant(1));
  blocks.push_back(make_box(zeros(n), zeros(n)));
  blocks.push_back(make_nonneg_orthant(m));
  blocks.push_back(make_nonneg_orthant(1));
  return make_product_set(std::move(blocks));
}

SetPtr hsde_graph_set(const HsdeInstance& instance) {
  std::size_t embed = instance.embedding_dim();
  Matrix stacked(embed, 2 * embed);
  for (std::size_t i = 0; i < embed; ++i) {
    for (std::size_t j = 0; j < embed; ++j) {
      stacked(i, j) = instance.q(i, j);
    }
    stacked(i, embed + i) = -1.0;
  }
  return make_affine_subspace(std::move(stacked), zeros(embed));
}

HsdeVerdict hsde_extract(const HsdeInstance& instance, const Vec& u,
                         const Vec& v, double tol) {
  std::size_t embed = instance.embedding_dim();
  if (u.size() != embed || v.size() != embed) {
    throw InvalidArgumentError("embedded point has the wrong dimension");
  }
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw InvalidArgumentError("tol must be positive and finite");
  }
  std::size_t n = instance.n;
  std::size_t m = instance.m;
  HsdeVerdict verdict;

  Vec stacked = concat(u, v);
  double norm = nrm2(stacked);
  if (norm == 0.0) {
    verdict.x = zeros(n);
    verdict.y = zeros(m);
    verdict.s = zeros(m);
    return verdict;
  }
  scale_inplace(1.0 / norm, stacked);

  double cone_dist = hsde_cone_set(instance)->distance(stacked);
  double graph_dist = hsde_graph_set(instance)->distance(stacked);
  double residual = std::max(cone_dist, graph_dist);
  if (residual > tol) {
    throw NotInIntersectionError(
        "embedded point is not in the intersection: residual " +
        std::to_string(residual) + " exceeds tol " + std::to_string(tol));
  }

  verdict.tau = stacked[n + m];
  verdict.kappa = stacked[2 * embed - 1];
  verdict.x = slice(stacked, 0, n);
  verdict.y = slice(stacked, n, m);
  verdict.s = slice(stacked, embed + n, m);
  if (verdict.tau > tol && verdict.kappa <= tol) {
    verdict.outcome = HsdeOutcome::kPrimalDualSolution;
    scale_inplace(1.0 / verdict.tau, verdict.x);
    scale_inplace(1.0 / verdict.tau, verdict.y);
    scale_inplace(1.0 / verdict.tau, verdict.s);
  } else if (verdict.tau <= tol && verdict.kappa > tol) {
    verdict.outcome = HsdeOutcome::kInfeasibilityCertificate;
  } else {
    verdict.outcome = HsdeOutcome::kInconclusive;
  }
  verdict.b_dot_y = dot(instance.b, verdict.y);
  verdict.c_dot_x = dot(instance.c, verdict.x);
  if (verdict.outcome == HsdeOutcome::kInfeasibilityCertificate) {
    verdict.primal_infeasible = verdict.b_dot_y < 0.0;
    verdict.dual_infeasible = verdict.c_dot_x < 0.0;
  }
  return verdict;
}

double LpKktResiduals::max_residual() const {
  return std::max(std::max(primal, dual), std::max(gap, cone));
}

LpKktResiduals lp_kkt_residuals(const HsdeInstance& instance, const Vec& x,
                                const Vec& y, const Vec& s) {
  if (x.size() != instance.n || y.size() != instance.m ||
      s.size() != instance.m) {
    throw InvalidArgumentError("candidate sizes must match the instance");
  }
  LpKktResiduals residuals;
  Vec primal = add(matvec(instance.a, x), s);
  residuals.primal = dist(primal, instance.b);
  residuals.dual = nrm2(add(matvec_transpose(instance.a, y), instance.c));
  residuals.gap = std::abs(dot(instance.c, x) + dot(instance.b, y));
  double worst = 0.0;
  for (double value : s) {
    worst = std::max(worst, -value);
  }
  for (double value : y) {
    worst = std::max(worst, -value);
  }
  residuals.cone = worst;
  return residuals;
}

const std::vector<std::string>& problem_kinds() {
  static const std::vector<std::string> kinds = {
      "random-strongly-convex-quadratic-pair",
      "lasso-like",
      "two-subspaces",
      "halfspace-pair",
      "parallel-lines-infeasible",
      "m-random-halfspaces",
      "lp-hsde",
  };
  return kinds;
}

GeneratedProblem generate_problem(const ProblemRequest& request) {
  if (request.kind == "random-strongly-convex-quadratic-pair") {
    return quadratic_pair(request);
  }
  if (request.kind == "lasso-like") {
    return lasso_like(request);
  }
  if (request.kind == "two-subspaces") {
    return two_subspaces(request);
  }
  if (request.kind == "halfspace-pair") {
    return halfspace_pair(request);
  }
  if (request.kind == "parallel-lines-infeasible") {
    return parallel_lines(request);
  }
  if (request.kind == "m-random-halfspaces") {
    return random_halfspaces(request);
  }
  if (request.kind == "lp-hsde") {
    return lp_hsde(request);
  }
  std::string names;
  for (const std::string& kind : problem_kinds()) {
    if (!names.empty()) {
      names += ", ";
    }
    names += kind;
  }
  throw InvalidArgumentError("unknown problem kind '" + request.kind +
                             "' (known: " + names + ")");
}

}  // namespace splitkit
