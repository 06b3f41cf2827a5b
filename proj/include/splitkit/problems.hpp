// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_PROBLEMS_HPP_
#define SPLITKIT_PROBLEMS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/admm.hpp"
#include "splitkit/feasibility.hpp"
#include "splitkit/linalg.hpp"
#include "splitkit/prox.hpp"
#include "splitkit/vec.hpp"

// Seeded benchmark-instance generators and the self-dual embedding of a
// linear program as a two-set feasibility problem. Every generator is a
// pure function of (kind, seed, dims, params), so a fixed request yields
// bit-identical instances across runs and platforms using the same
// standard-library Mersenne Twister stream.

namespace splitkit {

// Which solver family an instance is primarily built for. Generators fill
// every representation that makes sense for the kind (a two-set
// feasibility instance also carries indicator functions, for example), so
// the category is a default rather than a restriction.
enum class ProblemCategory {
  kSplitting,
  kAdmm,
  kFeasibility,
};

struct ProblemRequest {
  std::string kind;
  std::uint64_t seed = 1;
  // Kind-specific sizes; missing entries fall back to per-kind defaults.
  std::vector<std::size_t> dims;
  // Kind-specific scalar knobs; unknown keys are rejected.
  std::map<std::string, double> params;
};

// Linear program min <c,x> s.t. Ax + s = b, s >= 0 together with its
// homogeneous self-dual embedding. The embedded variable is
// u = (x, y, tau) and v = (r, s, kappa), both of dimension n + m + 1,
// coupled through the skew matrix
//   q = [[0, A^T, c], [-A, 0, b], [-c^T, -b^T, 0]],
// and the feasibility problem asks for (u, v) with v = q u, u in
// R^n x R_+^m x R_+ and v in {0}^n x R_+^m x R_+.
struct HsdeInstance {
  std::size_t n = 0;  // primal variables
  std::size_t m = 0;  // inequality constraints
  Matrix a;           // m x n
  Vec b;              // length m
  Vec c;              // length n
  Matrix q;           // (n + m + 1) x (n + m + 1), skew-symmetric

  std::size_t embedding_dim() const { return n + m + 1; }
};

// Assembles q from (a, b, c) and validates shapes. Throws
// InvalidArgumentError on mismatched or empty dimensions.
HsdeInstance make_hsde_instance(Matrix a, Vec b, Vec c);

// Product cone for the stacked point (u, v) in R^{2(n+m+1)}: free block,
// two orthant blocks for u, then zero block and two orthant blocks for v.
SetPtr hsde_cone_set(const HsdeInstance& instance);

// Subspace {(u, v) : q u = v} of R^{2(n+m+1)}.
SetPtr hsde_graph_set(const HsdeInstance& instance);

enum class HsdeOutcome {
  kPrimalDualSolution,
  kInfeasibilityCertificate,
  kInconclusive,
};

struct HsdeVerdict {
  HsdeOutcome outcome = HsdeOutcome::kInconclusive;
  // tau and kappa of the solution after normalization to ||(u, v)|| = 1.
  double tau = 0.0;
  double kappa = 0.0;
  // For a solution: the recovered primal-dual triple (x, y, s) / tau.
  // For a certificate: the normalized improving ray components.
  Vec x;
  Vec y;
  Vec s;
  double b_dot_y = 0.0;
  double c_dot_x = 0.0;
  // Certificate sign checks: b_dot_y < 0 witnesses an infeasible primal,
  // c_dot_x < 0 an infeasible dual. Both false for the solution branch.
  bool primal_infeasible = false;
  bool dual_infeasible = false;
};

// Absolute tau/kappa classification threshold on the normalized solution.
inline constexpr double kHsdeTol = 1e-6;

// Classifies an approximate intersection point of the embedding. The
// stacked point is normalized to unit norm first; a zero input is
// inconclusive. Throws NotInIntersectionError when the normalized point
// sits further than tol from either set (max of the two distances).
HsdeVerdict hsde_extract(const HsdeInstance& instance, const Vec& u,
                         const Vec& v, double tol = kHsdeTol);

// Unscaled optimality residuals of a candidate (x, y, s) for the original
// linear program.
struct LpKktResiduals {
  double primal = 0.0;  // ||A x + s - b||
  double dual = 0.0;    // ||A^T y + c||
  double gap = 0.0;     // |<c, x> + <b, y>|
  double cone = 0.0;    // max violation of s >= 0, y >= 0

  double max_residual() const;
};

LpKktResiduals lp_kkt_residuals(const HsdeInstance& instance, const Vec& x,
                                const Vec& y, const Vec& s);

// A generated instance with every representation the kind supports
// populated: composite functions for the splitting engine, constrained
// pairs for the consensus engine, set lists for the feasibility engine.
struct GeneratedProblem {
  ProblemCategory category = ProblemCategory::kSplitting;
  std::string kind;
  std::size_t dim = 0;  // ambient dimension of the iterate
  Vec z0;               // splitting / feasibility start

  // Splitting representation (empty FnPtrs when not supported).
  FnPtr f;
  FnPtr g;

  // Consensus representation.
  std::optional<AdmmProblem> admm;
  Vec w0;

  // Feasibility representation.
  std::vector<SetPtr> sets;
  SetPtr intersection;  // projector onto the intersection when closed-form
  std::optional<RegularityBound> regularity;

  // Kind-specific references recorded for diagnostics and tests.
  std::optional<double> friedrichs_cos;
  std::optional<Vec> gap_reference;
  std::optional<HsdeInstance> hsde;
};

// Catalog kinds:
//   random-strongly-convex-quadratic-pair [n]        (splitting)
//   lasso-like [m, n]            params: l1_weight   (admm)
//   two-subspaces [d]            params: friedrichs_cos
//   halfspace-pair [d]                               (feasibility)
//   parallel-lines-infeasible [] params: offset
//   m-random-halfspaces [d, m]                       (feasibility)
//   lp-hsde [m, n]               params: feasible    (feasibility)
// Throws InvalidArgumentError on unknown kinds, bad dimensions, or
// unknown parameter names.
GeneratedProblem generate_problem(const ProblemRequest& request);

// Names accepted by generate_problem, for CLI help and validation.
const std::vector<std::string>& problem_kinds();

}  // namespace splitkit

#endif  // SPLITKIT_PROBLEMS_HPP_
