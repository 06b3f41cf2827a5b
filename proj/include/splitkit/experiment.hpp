// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_EXPERIMENT_HPP_
#define SPLITKIT_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitkit/feasibility.hpp"
#include "splitkit/problems.hpp"
#include "splitkit/rates.hpp"
#include "splitkit/splitting.hpp"
#include "splitkit/trace_io.hpp"

#include <json.hpp>

// Experiment runner: turns a JSON spec into a generated instance, a solver
// run, rate certificates, and the three output files (trace CSV, report
// JSON, summary text). Batch specs run concurrently; file writes happen
// serially in spec order, and a fixed spec plus seed reproduces the CSV
// byte for byte.

namespace splitkit {

// Overrides the output directory of every run when set, taking precedence
// over the --out flag.
inline constexpr const char* kOutputDirEnvVar = "SPLITKIT_OUTPUT_DIR";

// A certification request attached to an experiment. With an explicit
// envelope the named trace column is checked against it directly.
// Without one, the name selects an automatically constructed envelope:
//   generic-fpr        fpr <= ||z0 - z^||^2 / (tau (k+1)) with tau the
//                      infimum of lambda (1 - lambda); needs a relaxation
//                      schedule bounded away from 0 and 1
//   smooth-fpr         squared step norms fall like 1/k^2 when the second
//                      function is smooth, the schedule is the constant
//                      1/2, and gamma < kKappa * beta
//   objective-best     running-min objective gap <= c / (k + 1)
//   objective-every    objective gap at every iterate <= c / (k + 1);
//                      needs gamma < kKappa * beta
//   feasibility-linear per-step contraction of the distance to the
//                      intersection; needs a global regularity constant
//                      and an intersection projector
// Unmet gates yield a not-applicable certificate and a configuration
// error, never a silently weakened check.
struct CertificateRequest {
  std::string name;
  std::optional<RateEnvelope> envelope;
  // Explicit mode only: which trace column the envelope bounds.
  std::string column;
  double tol = kProvenRateTol;
};

struct ExperimentSpec {
  std::string name = "experiment";
  ProblemRequest problem;
  // prs | drs | fbs | map | multi-set | admm. On a two-set feasibility
  // instance, prs and drs run the partial-projection iteration with the
  // (gamma_f, gamma_g) weights; otherwise they run the composite
  // splitting iteration at stepsize gamma.
  std::string solver = "drs";
  double gamma = 1.0;
  double gamma_f = 0.5;
  double gamma_g = 0.5;
  // Constant relaxation; defaults per solver (prs 1, everything else 1/2).
  std::optional<double> lambda;
  // Cyclic relaxation schedule; overrides lambda when nonempty.
  std::vector<double> lambda_cycle;
  std::size_t iters = 100;
  std::uint64_t seed = 1;
  std::vector<CertificateRequest> certificates;
  bool gap_diagnostics = false;
  bool assert_inequalities = false;
  // Output file names, defaulted from name when empty.
  std::string trace_path;
  std::string report_path;
  std::string summary_path;

  // Throws InvalidArgumentError on unknown solver names, bad gamma or
  // relaxation values, or iters == 0.
  void validate() const;
  RelaxationSchedule schedule() const;
  double default_lambda() const;
};

// Parses a single experiment object. Unknown keys are rejected. The
// problem seed defaults to the experiment seed when absent.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& doc);
// Accepts either a single experiment object or {"experiments": [...]}.
std::vector<ExperimentSpec> experiment_specs_from_json(
    const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentSpec& spec);

struct NamedCertificate {
  std::string name;
  std::string column;
  RateCertificate certificate;
};

struct ExperimentResult {
  ExperimentSpec spec;
  bool ok = false;
  // True when a requested certificate was not applicable to the
  // configuration (gate failure), as opposed to a violated bound.
  bool config_error = false;
  std::string error;
  TraceTable table;
  std::vector<NamedCertificate> certificates;
  std::optional<InequalityReport> inequalities;
  std::optional<GapDiagnostics> gaps;
  std::optional<HsdeVerdict> hsde;
  std::optional<LpKktResiduals> kkt;
  nlohmann::json report;
  std::string summary;

  // 0 when ok, 2 on configuration errors, 1 on violations and failures.
  int exit_code() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// kOutputDirEnvVar when set, else flag_value, else ".".
std::string resolve_output_dir(const std::string& flag_value);

// Writes trace CSV, report JSON, and summary text under out_dir, creating
// the directory when missing.
void write_result_files(const ExperimentResult& result,
                        const std::string& out_dir);

// Loads a spec file, runs every experiment (concurrently for batches),
// writes all output files in spec order, prints one line per experiment
// to out, and returns the worst exit code (1 dominates 2 dominates 0).
int run_spec_file(const std::string& path, const std::string& out_dir_flag,
                  std::ostream& out);

}  // namespace splitkit

#endif  // SPLITKIT_EXPERIMENT_HPP_
