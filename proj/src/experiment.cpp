// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>
#include <utility>

#include "splitkit/admm.hpp"
#include "splitkit/constants.hpp"
#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = {"prs", "drs",       "fbs",
                                                 "map", "multi-set", "admm"};
  return names;
}

const std::vector<std::string>& auto_certificate_names() {
  static const std::vector<std::string> names = {
      "generic-fpr", "smooth-fpr", "objective-best", "objective-every",
      "feasibility-linear"};
  return names;
}

bool name_in(const std::string& name, const std::vector<std::string>& list) {
  return std::find(list.begin(), list.end(), name) != list.end();
}

std::string joined(const std::vector<std::string>& list) {
  std::string out;
  for (const std::string& item : list) {
    if (!out.empty()) {
      out += ", ";
    }
    out += item;
  }
  return out;
}

// Pre-run length for fixed-point and solution estimates.
std::size_t reference_iters(std::size_t iters) {
  std::size_t scaled = iters > 20000 ? 200000 : 10 * iters;
  return std::max<std::size_t>(scaled, 2000);
}

nlohmann::json number_or_null(double value) {
  if (std::isnan(value)) {
    return nullptr;
  }
  return value;
}

// The constant relaxation value the run effectively uses, when it is
// constant at all; the certificate gates key off this.
std::optional<double> effective_constant_lambda(const ExperimentSpec& spec) {
  if (spec.lambda_cycle.empty()) {
    return spec.lambda.value_or(spec.default_lambda());
  }
  double first = spec.lambda_cycle.front();
  for (double value : spec.lambda_cycle) {
    if (value != first) {
      return std::nullopt;
    }
  }
  return first;
}

struct EngineData {
  std::optional<IterationTrace> splitting;
  std::optional<FeasibilityTrace> feasibility;
  std::optional<AdmmTrace> admm;
  // The exact pair and start the feasibility engine iterated, so reference
  // pre-runs repeat the same recursion.
  SetPtr feas_cf;
  SetPtr feas_cg;
  Vec feas_z0;
  bool feas_relaxed = false;  // partial-projection iteration (vs map)
  std::optional<Vec> feas_fixed_point;
  int fbs_flags = 0;
};

FeasibilityConfig base_feasibility_config(const ExperimentSpec& spec,
                                          const GeneratedProblem& problem) {
  FeasibilityConfig config;
  config.stepsizes = StepsizePair::constant(spec.gamma_f, spec.gamma_g);
  config.schedule = spec.schedule();
  config.max_iters = spec.iters;
  config.intersection = problem.intersection;
  config.regularity = problem.regularity;
  config.assert_inequalities = spec.assert_inequalities;
  return config;
}

void run_splitting_engine(const ExperimentSpec& spec,
                          const GeneratedProblem& problem,
                          ExperimentResult& result, EngineData& data) {
  if (!problem.f || !problem.g) {
    throw ConditionNotMetError("solver '" + spec.solver +
                               "' needs a composite-function instance");
  }
  SolverConfig config;
  config.gamma = spec.gamma;
  config.schedule = spec.schedule();
  config.max_iters = spec.iters;
  config.assert_inequalities = spec.assert_inequalities;
  config.known_fixed_point =
      estimate_fixed_point(*problem.f, *problem.g, spec.gamma, problem.z0,
                           reference_iters(spec.iters));
  IterationTrace trace = run_prs(*problem.f, *problem.g, config, problem.z0);
  result.table = tabulate(trace);
  result.inequalities = trace.inequalities;
  data.splitting = std::move(trace);
}

void run_fbs_engine(const ExperimentSpec& spec,
                    const GeneratedProblem& problem, ExperimentResult& result,
                    EngineData& data) {
  if (!problem.f || !problem.g) {
    throw ConditionNotMetError("solver 'fbs' needs a composite-function "
                               "instance");
  }
  if (!problem.g->has_grad()) {
    throw ConditionNotMetError(
        "solver 'fbs' needs a gradient on the second function");
  }
  Vec z_hat = problem.z0;
  std::size_t pre = reference_iters(spec.iters);
  for (std::size_t k = 0; k < pre; ++k) {
    z_hat = fbs_step(*problem.f, *problem.g, spec.gamma, z_hat).z_next;
  }
  double obj_star = problem.f->eval(z_hat) + problem.g->eval(z_hat);

  TraceTable table;
  table.columns = {"k",   "fpr", "step_sq",       "obj_gap_nonergodic",
                   "obj_gap_ergodic", "S_f", "S_g", "dist_to_zstar"};
  table.data.assign(table.columns.size(), {});
  Vec z = problem.z0;
  for (std::size_t k = 0; k < spec.iters; ++k) {
    FbsStepResult step = fbs_step(*problem.f, *problem.g, spec.gamma, z);
    if (step.stepsize_flagged) {
      ++data.fbs_flags;
    }
    double move_sq = dist_sq(step.z_next, z);
    table.data[0].push_back(static_cast<double>(k));
    table.data[1].push_back(move_sq);
    table.data[2].push_back(move_sq);
    double obj = problem.f->eval(z) + problem.g->eval(z);
    table.data[3].push_back(std::isfinite(obj_star) ? obj - obj_star : kNaN);
    table.data[4].push_back(kNaN);
    table.data[5].push_back(kNaN);
    table.data[6].push_back(kNaN);
    table.data[7].push_back(dist(z, z_hat));
    z = std::move(step.z_next);
  }
  result.table = std::move(table);
}

void run_feasibility_engine(const ExperimentSpec& spec,
                            const GeneratedProblem& problem,
                            ExperimentResult& result, EngineData& data) {
  if (problem.sets.size() < 2) {
    throw ConditionNotMetError("solver '" + spec.solver +
                               "' needs a feasibility instance");
  }
  FeasibilityConfig config = base_feasibility_config(spec, problem);
  FeasibilityTrace trace;
  if (spec.solver == "map") {
    if (problem.sets.size() != 2) {
      throw ConditionNotMetError("solver 'map' runs on exactly two sets");
    }
    data.feas_cf = problem.sets[0];
    data.feas_cg = problem.sets[1];
    data.feas_z0 = problem.z0;
    trace = map_run(*data.feas_cf, *data.feas_cg, problem.z0, spec.iters,
                    config);
  } else if (spec.solver == "multi-set") {
    std::size_t blocks = problem.sets.size();
    data.feas_cf = make_product_set(problem.sets);
    data.feas_cg = make_diagonal_set(blocks, problem.dim);
    data.feas_z0.clear();
    for (std::size_t i = 0; i < blocks; ++i) {
      data.feas_z0.insert(data.feas_z0.end(), problem.z0.begin(),
                          problem.z0.end());
    }
    // The lifted pair has no projector or regularity constant attached.
    config.intersection = nullptr;
    config.regularity.reset();
    data.feas_relaxed = true;
    trace = run_two_set(*data.feas_cf, *data.feas_cg, config, data.feas_z0);
  } else {
    if (problem.sets.size() != 2) {
      throw ConditionNotMetError("solver '" + spec.solver +
                                 "' runs on exactly two sets");
    }
    data.feas_cf = problem.sets[0];
    data.feas_cg = problem.sets[1];
    data.feas_z0 = problem.z0;
    data.feas_relaxed = true;
    trace = run_two_set(*data.feas_cf, *data.feas_cg, config, data.feas_z0);
  }
  result.table = tabulate(trace);
  result.inequalities = trace.inequalities;
  data.feasibility = std::move(trace);
}

void run_admm_engine(const ExperimentSpec& spec,
                     const GeneratedProblem& problem,
                     ExperimentResult& result, EngineData& data) {
  if (!problem.admm) {
    throw ConditionNotMetError("solver 'admm' needs a constrained-pair "
                               "instance");
  }
  AdmmConfig config;
  config.gamma = spec.gamma;
  config.schedule = spec.schedule();
  config.max_iters = spec.iters;
  config.assert_inequalities = spec.assert_inequalities;
  config.reference = estimate_admm_solution(*problem.admm, spec.gamma,
                                            problem.w0,
                                            reference_iters(spec.iters));
  AdmmTrace trace = run_admm(*problem.admm, config, problem.w0);
  result.table = tabulate(trace);
  result.inequalities = trace.inequalities;
  data.admm = std::move(trace);
}

// Fixed point of the feasibility recursion, estimated by repeating it at
// lambda = 1/2 for a longer horizon.
const Vec& feasibility_fixed_point(const ExperimentSpec& spec,
                                   EngineData& data) {
  if (!data.feas_fixed_point) {
    FeasibilityConfig config;
    config.stepsizes = StepsizePair::constant(spec.gamma_f, spec.gamma_g);
    config.schedule = RelaxationSchedule::constant(0.5);
    config.max_iters = reference_iters(spec.iters);
    FeasibilityTrace pre =
        run_two_set(*data.feas_cf, *data.feas_cg, config, data.feas_z0);
    data.feas_fixed_point = std::move(pre.final_z);
  }
  return *data.feas_fixed_point;
}

RateCertificate gated_off(RateEnvelope envelope) {
  return not_applicable_certificate(envelope);
}

NamedCertificate build_generic_fpr(const CertificateRequest& request,
                                   const ExperimentSpec& spec,
                                   const TraceTable& table, EngineData& data) {
  NamedCertificate named;
  named.name = request.name;
  named.column = "fpr";
  RateEnvelope envelope;
  envelope.kind = RateKind::kBigOInverseK;
  envelope.constant = kNaN;
  envelope.applies_to = SequenceTag::kFpr;
  envelope.ergodicity = Ergodicity::kNonergodic;

  double tau = 0.0;
  if (spec.solver != "map" && spec.solver != "fbs" && spec.iters > 0) {
    tau = spec.schedule().min_tau(spec.iters - 1);
  }
  if (tau <= 0.0) {
    named.certificate = gated_off(envelope);
    return named;
  }
  double dist0_sq = kNaN;
  if (data.splitting) {
    if (data.splitting->z_star) {
      dist0_sq = dist_sq(data.splitting->z.front(), *data.splitting->z_star);
    }
  } else if (data.feasibility && data.feas_relaxed) {
    dist0_sq = dist_sq(data.feas_z0, feasibility_fixed_point(spec, data));
  } else if (data.admm && !data.admm->dist_to_zstar.empty()) {
    double d0 = data.admm->dist_to_zstar.front();
    dist0_sq = d0 * d0;
  }
  if (!std::isfinite(dist0_sq)) {
    named.certificate = gated_off(envelope);
    return named;
  }
  envelope.constant = dist0_sq / tau;
  named.certificate = certify(table.column("fpr"), SequenceTag::kFpr,
                              envelope, request.tol);
  return named;
}

NamedCertificate build_smooth_fpr(const CertificateRequest& request,
                                  const ExperimentSpec& spec,
                                  const GeneratedProblem& problem,
                                  const TraceTable& table,
                                  const EngineData& data) {
  NamedCertificate named;
  named.name = request.name;
  RateEnvelope envelope;
  envelope.kind = RateKind::kBigOInverseKSquared;
  envelope.constant = kNaN;
  envelope.ergodicity = Ergodicity::kNonergodic;

  std::optional<double> lambda = effective_constant_lambda(spec);
  bool half_relaxed = lambda.has_value() && *lambda == 0.5;

  if (data.splitting) {
    named.column = "step_sq";
    envelope.applies_to = SequenceTag::kFpr;
    const IterationTrace& trace = *data.splitting;
    double beta = problem.g ? problem.g->beta() : 0.0;
    bool gate = half_relaxed && beta > 0.0 && spec.gamma < kKappa * beta &&
                trace.z_star.has_value() && !trace.x_g.empty();
    if (!gate) {
      named.certificate = gated_off(envelope);
      return named;
    }
    FprEnvelopeParams params;
    params.initial_dist_sq = dist_sq(trace.x_g.front(), trace.x_star);
    params.tau_min = 0.25;
    params.beta = beta;
    params.gamma = spec.gamma;
    envelope.constant = fpr_bound(FprEnvelopeKind::kSmoothDrs, params, 1);
    const std::vector<double>& full = table.column("step_sq");
    std::vector<double> tail(full.begin() + 1, full.end());
    named.certificate =
        certify(tail, SequenceTag::kFpr, envelope, request.tol);
    return named;
  }
  if (data.admm && problem.admm) {
    named.column = "residual_norm_sq";
    envelope.applies_to = SequenceTag::kResidual;
    const AdmmTrace& trace = *data.admm;
    double beta = dual_constants(*problem.admm).beta_dg;
    bool gate = half_relaxed && beta > 0.0 && spec.gamma < kKappa * beta &&
                !trace.w_dg_dist.empty() &&
                std::isfinite(trace.w_dg_dist.front());
    if (!gate) {
      named.certificate = gated_off(envelope);
      return named;
    }
    FprEnvelopeParams params;
    params.initial_dist_sq =
        trace.w_dg_dist.front() * trace.w_dg_dist.front();
    params.tau_min = 0.25;
    params.beta = beta;
    params.gamma = spec.gamma;
    envelope.constant = fpr_bound(FprEnvelopeKind::kSmoothDrs, params, 1) /
                        (spec.gamma * spec.gamma);
    const std::vector<double>& full = table.column("residual_norm_sq");
    std::vector<double> tail(full.begin() + 1, full.end());
    named.certificate =
        certify(tail, SequenceTag::kResidual, envelope, request.tol);
    return named;
  }
  named.column = "step_sq";
  envelope.applies_to = SequenceTag::kFpr;
  named.certificate = gated_off(envelope);
  return named;
}

NamedCertificate build_objective(const CertificateRequest& request,
                                 const ExperimentSpec& spec,
                                 const GeneratedProblem& problem,
                                 const EngineData& data, bool every) {
  NamedCertificate named;
  named.name = request.name;
  named.column = "obj_gap_nonergodic";
  RateEnvelope envelope;
  envelope.kind = RateKind::kBigOInverseK;
  envelope.constant = kNaN;
  envelope.applies_to = SequenceTag::kObjectiveGap;
  envelope.ergodicity =
      every ? Ergodicity::kNonergodic : Ergodicity::kBestIterate;

  std::optional<double> lambda = effective_constant_lambda(spec);
  bool half_relaxed = lambda.has_value() && *lambda == 0.5;
  double beta =
      (data.splitting && problem.g) ? problem.g->beta() : 0.0;
  bool gate = data.splitting && half_relaxed && beta > 0.0 &&
              data.splitting->z_star.has_value() &&
              std::isfinite(data.splitting->obj_star) &&
              !data.splitting->x_g.empty();
  if (gate && every && !(spec.gamma < kKappa * beta)) {
    gate = false;
  }
  if (!gate) {
    named.certificate = gated_off(envelope);
    return named;
  }
  const IterationTrace& trace = *data.splitting;
  double dist_xg0_sq = dist_sq(trace.x_g.front(), trace.x_star);
  double dist_z0_sq = dist_sq(trace.z.front(), *trace.z_star);
  SmoothObjectiveBound bound =
      smooth_objective_bound(beta, spec.gamma, 0, dist_xg0_sq, dist_z0_sq);
  std::vector<double> values;
  values.reserve(trace.obj_smooth.size());
  double best = kNaN;
  for (double obj : trace.obj_smooth) {
    double gap = obj - trace.obj_star;
    if (every) {
      values.push_back(gap);
    } else {
      best = std::isnan(best) ? gap : std::min(best, gap);
      values.push_back(best);
    }
  }
  envelope.constant = every ? *bound.every_iterate : bound.best_iterate;
  named.certificate =
      certify(values, SequenceTag::kObjectiveGap, envelope, request.tol);
  return named;
}

NamedCertificate build_feasibility_linear(const CertificateRequest& request,
                                          const ExperimentSpec& spec,
                                          const GeneratedProblem& problem,
                                          const EngineData& data) {
  NamedCertificate named;
  named.name = request.name;
  named.column = "dist_intersection";
  RateEnvelope envelope;
  envelope.kind = RateKind::kLinear;
  envelope.constant = kNaN;
  envelope.applies_to = SequenceTag::kDistance;
  envelope.ergodicity = Ergodicity::kNonergodic;

  bool gate = data.feasibility && problem.regularity &&
              problem.regularity->rho == 0.0 &&
              !data.feasibility->dist_intersection.empty();
  if (!gate) {
    named.certificate = gated_off(envelope);
    return named;
  }
  const FeasibilityTrace& trace = *data.feasibility;
  const std::vector<double>& values = trace.dist_intersection;
  double mu = problem.regularity->mu_rho;
  envelope.constant = values.front();
  envelope.factors.reserve(values.size() > 0 ? values.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    double factor =
        spec.solver == "map"
            ? map_contraction_constant(mu)
            : feas_contraction_constant(spec.gamma_f, spec.gamma_g,
                                        trace.lambda[i], mu);
    envelope.factors.push_back(factor);
  }
  named.certificate =
      certify(values, SequenceTag::kDistance, envelope, request.tol);
  return named;
}

void build_certificates(const ExperimentSpec& spec,
                        const GeneratedProblem& problem,
                        ExperimentResult& result, EngineData& data) {
  for (const CertificateRequest& request : spec.certificates) {
    NamedCertificate named;
    if (request.envelope) {
      named.name = request.name;
      named.column = request.column;
      named.certificate =
          certify(result.table.column(request.column),
                  request.envelope->applies_to, *request.envelope,
                  request.tol);
    } else if (request.name == "generic-fpr") {
      named = build_generic_fpr(request, spec, result.table, data);
    } else if (request.name == "smooth-fpr") {
      named = build_smooth_fpr(request, spec, problem, result.table, data);
    } else if (request.name == "objective-best") {
      named = build_objective(request, spec, problem, data, false);
    } else if (request.name == "objective-every") {
      named = build_objective(request, spec, problem, data, true);
    } else if (request.name == "feasibility-linear") {
      named = build_feasibility_linear(request, spec, problem, data);
    } else {
      throw InvalidArgumentError("unknown certificate '" + request.name +
                                 "' (known: " +
                                 joined(auto_certificate_names()) + ")");
    }
    if (named.certificate.verdict == RateVerdict::kNotApplicable) {
      result.config_error = true;
    }
    result.certificates.push_back(std::move(named));
  }
}

void extract_embedding(const GeneratedProblem& problem,
                       ExperimentResult& result, const EngineData& data) {
  if (!problem.hsde || !data.feasibility || data.feasibility->x_g.empty() ||
      problem.sets.size() != 2) {
    return;
  }
  const HsdeInstance& instance = *problem.hsde;
  // Snap the last prox point onto the graph, which is exact, and let the
  // extraction measure the remaining cone distance.
  Vec candidate = problem.sets[1]->project(data.feasibility->x_g.back());
  std::size_t embed = instance.embedding_dim();
  Vec u = slice(candidate, 0, embed);
  Vec v = slice(candidate, embed, embed);
  result.hsde = hsde_extract(instance, u, v);
  if (result.hsde->outcome == HsdeOutcome::kPrimalDualSolution) {
    result.kkt = lp_kkt_residuals(instance, result.hsde->x, result.hsde->y,
                                  result.hsde->s);
  }
}

const char* outcome_name(HsdeOutcome outcome) {
  switch (outcome) {
    case HsdeOutcome::kPrimalDualSolution:
      return "primal-dual-solution";
    case HsdeOutcome::kInfeasibilityCertificate:
      return "infeasibility-certificate";
    case HsdeOutcome::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

void assemble_report(ExperimentResult& result) {
  nlohmann::json report;
  report["name"] = result.spec.name;
  report["spec"] = to_json(result.spec);
  report["ok"] = result.ok;
  report["config_error"] = result.config_error;
  report["error"] = result.error;
  report["trace_rows"] = result.table.rows();
  if (result.table.rows() > 0) {
    nlohmann::json final_row;
    for (std::size_t c = 0; c < result.table.columns.size(); ++c) {
      final_row[result.table.columns[c]] =
          number_or_null(result.table.data[c].back());
    }
    report["final"] = std::move(final_row);
  }
  nlohmann::json certs = nlohmann::json::array();
  for (const NamedCertificate& named : result.certificates) {
    nlohmann::json entry;
    entry["name"] = named.name;
    entry["column"] = named.column;
    entry["certificate"] = to_json(named.certificate);
    certs.push_back(std::move(entry));
  }
  report["certificates"] = std::move(certs);
  if (result.inequalities) {
    report["inequalities"] = to_json(*result.inequalities);
  }
  if (result.gaps) {
    nlohmann::json gaps;
    gaps["gap_estimate"] = result.gaps->gap_estimate;
    gaps["final_gap_norm"] = nrm2(result.gaps->gap_estimate);
    gaps["divergence_suspected"] = result.gaps->divergence_suspected;
    gaps["summary"] = result.gaps->summary();
    if (!result.gaps->best_error_sq.empty()) {
      gaps["final_best_error_sq"] = result.gaps->best_error_sq.back();
    }
    report["gap_diagnostics"] = std::move(gaps);
  }
  if (result.hsde) {
    nlohmann::json hsde;
    hsde["outcome"] = outcome_name(result.hsde->outcome);
    hsde["tau"] = result.hsde->tau;
    hsde["kappa"] = result.hsde->kappa;
    hsde["b_dot_y"] = result.hsde->b_dot_y;
    hsde["c_dot_x"] = result.hsde->c_dot_x;
    hsde["primal_infeasible"] = result.hsde->primal_infeasible;
    hsde["dual_infeasible"] = result.hsde->dual_infeasible;
    hsde["x"] = result.hsde->x;
    hsde["y"] = result.hsde->y;
    hsde["s"] = result.hsde->s;
    if (result.kkt) {
      nlohmann::json kkt;
      kkt["primal"] = result.kkt->primal;
      kkt["dual"] = result.kkt->dual;
      kkt["gap"] = result.kkt->gap;
      kkt["cone"] = result.kkt->cone;
      kkt["max_residual"] = result.kkt->max_residual();
      hsde["kkt"] = std::move(kkt);
    }
    report["hsde"] = std::move(hsde);
  }
  result.report = std::move(report);
}

void assemble_summary(ExperimentResult& result) {
  std::ostringstream out;
  out << result.spec.name << ": solver=" << result.spec.solver
      << " kind=" << result.spec.problem.kind
      << " iters=" << result.spec.iters << " seed=" << result.spec.seed
      << '\n';
  if (result.table.rows() > 0 && result.table.has_column("fpr")) {
    out << "  final fpr=" << format_double(result.table.column("fpr").back())
        << '\n';
  }
  for (const NamedCertificate& named : result.certificates) {
    out << "  certificate " << named.name << " [" << named.column
        << "]: " << to_string(named.certificate.verdict);
    if (named.certificate.verdict != RateVerdict::kNotApplicable) {
      out << " (max rel violation "
          << format_double(named.certificate.max_relative_violation) << ")";
    }
    out << '\n';
  }
  if (result.inequalities) {
    out << "  inequalities: "
        << (result.inequalities->all_passed() ? "all passed" : "FAILED")
        << '\n';
  }
  if (result.gaps) {
    out << "  gap: " << result.gaps->summary()
        << ", |gap|=" << format_double(nrm2(result.gaps->gap_estimate))
        << '\n';
  }
  if (result.hsde) {
    out << "  hsde: " << outcome_name(result.hsde->outcome)
        << " tau=" << format_double(result.hsde->tau)
        << " kappa=" << format_double(result.hsde->kappa);
    if (result.kkt) {
      out << " kkt_max=" << format_double(result.kkt->max_residual());
    }
    out << '\n';
  }
  if (result.ok) {
    out << "  result: OK\n";
  } else if (!result.error.empty()) {
    out << "  result: FAILED (" << result.error << ")\n";
  } else if (result.config_error) {
    out << "  result: CONFIG ERROR\n";
  } else {
    out << "  result: FAILED\n";
  }
  result.summary = out.str();
}

void run_experiment_impl(const ExperimentSpec& spec,
                         ExperimentResult& result) {
  GeneratedProblem problem = generate_problem(spec.problem);
  EngineData data;
  if (spec.solver == "prs" || spec.solver == "drs") {
    if (problem.category == ProblemCategory::kFeasibility &&
        problem.sets.size() == 2) {
      run_feasibility_engine(spec, problem, result, data);
    } else {
      run_splitting_engine(spec, problem, result, data);
    }
  } else if (spec.solver == "fbs") {
    run_fbs_engine(spec, problem, result, data);
  } else if (spec.solver == "map" || spec.solver == "multi-set") {
    run_feasibility_engine(spec, problem, result, data);
  } else {
    run_admm_engine(spec, problem, result, data);
  }

  if (spec.gap_diagnostics && data.feasibility && data.feas_cf &&
      data.feas_cg) {
    result.gaps = map_infeasible_diagnostics(*data.feas_cf, *data.feas_cg,
                                             *data.feasibility);
  }
  build_certificates(spec, problem, result, data);
  extract_embedding(problem, result, data);
}

}  // namespace

void ExperimentSpec::validate() const {
  if (name.empty()) {
    throw InvalidArgumentError("experiment name must not be empty");
  }
  if (!name_in(solver, solver_names())) {
    throw InvalidArgumentError("unknown solver '" + solver +
                               "' (known: " + joined(solver_names()) + ")");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgumentError("gamma must be positive and finite");
  }
  if (!(gamma_f > 0.0) || !std::isfinite(gamma_f) || !(gamma_g > 0.0) ||
      !std::isfinite(gamma_g)) {
    throw InvalidArgumentError("gamma_f and gamma_g must be positive and "
                               "finite");
  }
  if (iters == 0) {
    throw InvalidArgumentError("iters must be at least 1");
  }
  if (lambda && !(*lambda > 0.0 && *lambda <= 1.0)) {
    throw InvalidArgumentError("lambda must lie in (0, 1]");
  }
  for (double value : lambda_cycle) {
    if (!(value > 0.0 && value <= 1.0)) {
      throw InvalidArgumentError("lambda_cycle values must lie in (0, 1]");
    }
  }
  for (const CertificateRequest& request : certificates) {
    if (!(request.tol > 0.0) || !std::isfinite(request.tol)) {
      throw InvalidArgumentError("certificate tol must be positive");
    }
    if (request.envelope) {
      if (request.column.empty()) {
        throw InvalidArgumentError(
            "an explicit envelope needs a trace column");
      }
    } else if (!name_in(request.name, auto_certificate_names())) {
      throw InvalidArgumentError("unknown certificate '" + request.name +
                                 "' (known: " +
                                 joined(auto_certificate_names()) + ")");
    }
  }
}

double ExperimentSpec::default_lambda() const {
  return solver == "prs" ? 1.0 : 0.5;
}

RelaxationSchedule ExperimentSpec::schedule() const {
  if (!lambda_cycle.empty()) {
    std::vector<double> cycle = lambda_cycle;
    return RelaxationSchedule::from_function(
        [cycle](std::size_t k) { return cycle[k % cycle.size()]; });
  }
  return RelaxationSchedule::constant(lambda.value_or(default_lambda()));
}

namespace {

void require_keys(const nlohmann::json& doc,
                  std::initializer_list<const char*> allowed,
                  const char* where) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    bool known = false;
    for (const char* name : allowed) {
      if (it.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvalidArgumentError(std::string(where) + ": unknown key '" +
                                 it.key() + "'");
    }
  }
}

ProblemRequest problem_request_from_json(const nlohmann::json& doc,
                                         std::uint64_t default_seed) {
  if (!doc.is_object()) {
    throw InvalidArgumentError("problem must be an object");
  }
  require_keys(doc, {"kind", "seed", "dims", "params"}, "problem");
  ProblemRequest request;
  request.kind = doc.at("kind").get<std::string>();
  request.seed = doc.contains("seed")
                     ? doc.at("seed").get<std::uint64_t>()
                     : default_seed;
  if (doc.contains("dims")) {
    request.dims = doc.at("dims").get<std::vector<std::size_t>>();
  }
  if (doc.contains("params")) {
    for (auto it = doc.at("params").begin(); it != doc.at("params").end();
         ++it) {
      request.params[it.key()] = it.value().get<double>();
    }
  }
  return request;
}

CertificateRequest certificate_request_from_json(const nlohmann::json& doc) {
  CertificateRequest request;
  if (doc.is_string()) {
    request.name = doc.get<std::string>();
    return request;
  }
  if (!doc.is_object()) {
    throw InvalidArgumentError("certificate entries must be names or "
                               "objects");
  }
  require_keys(doc, {"name", "tol", "envelope", "column"}, "certificate");
  request.name = doc.at("name").get<std::string>();
  if (doc.contains("tol")) {
    request.tol = doc.at("tol").get<double>();
  }
  if (doc.contains("envelope")) {
    request.envelope = rate_envelope_from_json(doc.at("envelope"));
  }
  if (doc.contains("column")) {
    request.column = doc.at("column").get<std::string>();
  }
  return request;
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw InvalidArgumentError("experiment spec must be an object");
  }
  require_keys(doc,
               {"name", "problem", "solver", "gamma", "gamma_f", "gamma_g",
                "lambda", "lambda_cycle", "iters", "seed", "certificates",
                "gap_diagnostics", "assert_inequalities", "trace_path",
                "report_path", "summary_path"},
               "experiment");
  ExperimentSpec spec;
  if (doc.contains("seed")) {
    spec.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("name")) {
    spec.name = doc.at("name").get<std::string>();
  }
  spec.problem = problem_request_from_json(doc.at("problem"), spec.seed);
  if (doc.contains("solver")) {
    spec.solver = doc.at("solver").get<std::string>();
  }
  if (doc.contains("gamma")) {
    spec.gamma = doc.at("gamma").get<double>();
  }
  if (doc.contains("gamma_f")) {
    spec.gamma_f = doc.at("gamma_f").get<double>();
  }
  if (doc.contains("gamma_g")) {
    spec.gamma_g = doc.at("gamma_g").get<double>();
  }
  if (doc.contains("lambda")) {
    spec.lambda = doc.at("lambda").get<double>();
  }
  if (doc.contains("lambda_cycle")) {
    spec.lambda_cycle = doc.at("lambda_cycle").get<std::vector<double>>();
  }
  if (doc.contains("iters")) {
    spec.iters = doc.at("iters").get<std::size_t>();
  }
  if (doc.contains("certificates")) {
    for (const nlohmann::json& entry : doc.at("certificates")) {
      spec.certificates.push_back(certificate_request_from_json(entry));
    }
  }
  if (doc.contains("gap_diagnostics")) {
    spec.gap_diagnostics = doc.at("gap_diagnostics").get<bool>();
  }
  if (doc.contains("assert_inequalities")) {
    spec.assert_inequalities = doc.at("assert_inequalities").get<bool>();
  }
  if (doc.contains("trace_path")) {
    spec.trace_path = doc.at("trace_path").get<std::string>();
  }
  if (doc.contains("report_path")) {
    spec.report_path = doc.at("report_path").get<std::string>();
  }
  if (doc.contains("summary_path")) {
    spec.summary_path = doc.at("summary_path").get<std::string>();
  }
  return spec;
}

std::vector<ExperimentSpec> experiment_specs_from_json(
    const nlohmann::json& doc) {
  std::vector<ExperimentSpec> specs;
  if (doc.is_object() && doc.contains("experiments")) {
    require_keys(doc, {"experiments"}, "spec file");
    for (const nlohmann::json& entry : doc.at("experiments")) {
      specs.push_back(experiment_spec_from_json(entry));
    }
    if (specs.empty()) {
      throw InvalidArgumentError("experiments list is empty");
    }
    return specs;
  }
  specs.push_back(experiment_spec_from_json(doc));
  return specs;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json doc;
  doc["name"] = spec.name;
  nlohmann::json problem;
  problem["kind"] = spec.problem.kind;
  problem["seed"] = spec.problem.seed;
  problem["dims"] = spec.problem.dims;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : spec.problem.params) {
    params[key] = value;
  }
  problem["params"] = std::move(params);
  doc["problem"] = std::move(problem);
  doc["solver"] = spec.solver;
  doc["gamma"] = spec.gamma;
  doc["gamma_f"] = spec.gamma_f;
  doc["gamma_g"] = spec.gamma_g;
  if (spec.lambda) {
    doc["lambda"] = *spec.lambda;
  }
  if (!spec.lambda_cycle.empty()) {
    doc["lambda_cycle"] = spec.lambda_cycle;
  }
  doc["iters"] = spec.iters;
  doc["seed"] = spec.seed;
  doc["gap_diagnostics"] = spec.gap_diagnostics;
  doc["assert_inequalities"] = spec.assert_inequalities;
  return doc;
}

int ExperimentResult::exit_code() const {
  if (ok) {
    return 0;
  }
  bool hard = !error.empty();
  for (const NamedCertificate& named : certificates) {
    if (named.certificate.verdict == RateVerdict::kViolated) {
      hard = true;
    }
  }
  if (inequalities && !inequalities->all_passed()) {
    hard = true;
  }
  if (hard) {
    return 1;
  }
  return config_error ? 2 : 1;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  result.spec = spec;
  try {
    spec.validate();
    run_experiment_impl(spec, result);
  } catch (const InvalidArgumentError& err) {
    result.error = err.what();
    result.config_error = true;
  } catch (const std::exception& err) {
    result.error = err.what();
  }
  bool certified = true;
  for (const NamedCertificate& named : result.certificates) {
    if (named.certificate.verdict != RateVerdict::kCertified) {
      certified = false;
    }
  }
  bool checks_passed =
      !result.inequalities || result.inequalities->all_passed();
  result.ok = result.error.empty() && certified && checks_passed &&
              !result.config_error;
  assemble_report(result);
  assemble_summary(result);
  return result;
}

std::string resolve_output_dir(const std::string& flag_value) {
  const char* env = std::getenv(kOutputDirEnvVar);
  if (env != nullptr && env[0] != '\0') {
    return env;
  }
  if (!flag_value.empty()) {
    return flag_value;
  }
  return ".";
}

void write_result_files(const ExperimentResult& result,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  const ExperimentSpec& spec = result.spec;
  std::string trace_name =
      spec.trace_path.empty() ? spec.name + "_trace.csv" : spec.trace_path;
  std::string report_name =
      spec.report_path.empty() ? spec.name + "_report.json"
                               : spec.report_path;
  std::string summary_name = spec.summary_path.empty()
                                 ? spec.name + "_summary.txt"
                                 : spec.summary_path;
  if (!result.table.columns.empty()) {
    write_csv_file((dir / trace_name).string(), result.table);
  }
  std::ofstream report((dir / report_name).string(), std::ios::binary);
  if (!report) {
    throw InvalidArgumentError("cannot open '" +
                               (dir / report_name).string() +
                               "' for writing");
  }
  report << result.report.dump(2) << '\n';
  std::ofstream summary((dir / summary_name).string(), std::ios::binary);
  if (!summary) {
    throw InvalidArgumentError("cannot open '" +
                               (dir / summary_name).string() +
                               "' for writing");
  }
  summary << result.summary;
}

int run_spec_file(const std::string& path, const std::string& out_dir_flag,
                  std::ostream& out) {
  std::vector<ExperimentSpec> specs;
  try {
    std::ifstream in(path);
    if (!in) {
      throw InvalidArgumentError("cannot open spec file '" + path + "'");
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    specs = experiment_specs_from_json(doc);
  } catch (const std::exception& err) {
    out << "spec error: " << err.what() << '\n';
    return 2;
  }

  std::vector<ExperimentResult> results(specs.size());
  if (specs.size() == 1) {
    results[0] = run_experiment(specs[0]);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
      workers.emplace_back(
          [&specs, &results, i] { results[i] = run_experiment(specs[i]); });
    }
    for (std::thread& worker : workers) {
      worker.join();
    }
  }

  std::string out_dir = resolve_output_dir(out_dir_flag);
  bool any_hard = false;
  bool any_config = false;
  for (const ExperimentResult& result : results) {
    try {
      write_result_files(result, out_dir);
    } catch (const std::exception& err) {
      out << result.spec.name << ": write failed: " << err.what() << '\n';
      any_hard = true;
      continue;
    }
    out << result.summary;
    int code = result.exit_code();
    any_hard = any_hard || code == 1;
    any_config = any_config || code == 2;
  }
  if (any_hard) {
    return 1;
  }
  return any_config ? 2 : 0;
}

}  // namespace splitkit
