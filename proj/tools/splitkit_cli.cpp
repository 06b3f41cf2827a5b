// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

// Command-line front end: `run` executes a JSON experiment spec, `generate`
// materializes a catalog instance, `certify` checks a recorded trace column
// against a rate envelope. Exit codes: 0 success, 1 failure, 2
// configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splitkit/errors.hpp"
#include "splitkit/experiment.hpp"
#include "splitkit/problems.hpp"
#include "splitkit/rates.hpp"
#include "splitkit/trace_io.hpp"

namespace {

using splitkit::GeneratedProblem;
using splitkit::ProblemCategory;
using splitkit::ProblemRequest;

const char* category_name(ProblemCategory category) {
  switch (category) {
    case ProblemCategory::kSplitting:
      return "splitting";
    case ProblemCategory::kAdmm:
      return "admm";
    case ProblemCategory::kFeasibility:
      return "feasibility";
  }
  return "splitting";
}

nlohmann::json matrix_to_json(const splitkit::Matrix& matrix) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < matrix.cols; ++j) {
      row.push_back(matrix(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json describe(const ProblemRequest& request,
                        const GeneratedProblem& problem) {
  nlohmann::json doc;
  doc["kind"] = problem.kind;
  doc["seed"] = request.seed;
  doc["dims"] = request.dims;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : request.params) {
    params[key] = value;
  }
  doc["params"] = std::move(params);
  doc["category"] = category_name(problem.category);
  doc["dim"] = problem.dim;
  doc["z0"] = problem.z0;
  doc["set_count"] = problem.sets.size();
  if (problem.friedrichs_cos) {
    doc["friedrichs_cos"] = *problem.friedrichs_cos;
  }
  if (problem.gap_reference) {
    doc["gap_reference"] = *problem.gap_reference;
  }
  if (problem.hsde) {
    nlohmann::json hsde;
    hsde["n"] = problem.hsde->n;
    hsde["m"] = problem.hsde->m;
    hsde["a"] = matrix_to_json(problem.hsde->a);
    hsde["b"] = problem.hsde->b;
    hsde["c"] = problem.hsde->c;
    hsde["q"] = matrix_to_json(problem.hsde->q);
    doc["hsde"] = std::move(hsde);
  }
  return doc;
}

int run_generate(const std::string& kind, std::uint64_t seed,
                 const std::vector<std::size_t>& dims,
                 const std::vector<std::string>& params,
                 const std::string& out_path) {
  ProblemRequest request;
  request.kind = kind;
  request.seed = seed;
  request.dims = dims;
  for (const std::string& entry : params) {
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "bad --param '" << entry << "', expected name=value\n";
      return 2;
    }
    try {
      request.params[entry.substr(0, eq)] = std::stod(entry.substr(eq + 1));
    } catch (const std::exception&) {
      std::cerr << "bad --param value in '" << entry << "'\n";
      return 2;
    }
  }
  GeneratedProblem problem = splitkit::generate_problem(request);
  nlohmann::json doc = describe(request, problem);
  std::cout << "kind=" << problem.kind
            << " category=" << category_name(problem.category)
            << " dim=" << problem.dim << " sets=" << problem.sets.size()
            << "\n";
  if (problem.friedrichs_cos) {
    std::cout << "friedrichs_cos="
              << splitkit::format_double(*problem.friedrichs_cos) << "\n";
  }
  if (problem.hsde) {
    std::cout << "lp m=" << problem.hsde->m << " n=" << problem.hsde->n
              << " embedding_dim=" << problem.hsde->embedding_dim() << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open '" << out_path << "' for writing\n";
      return 1;
    }
    out << doc.dump(2) << '\n';
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int run_certify(const std::string& trace_path,
                const std::string& envelope_path, std::string column,
                double tol, const std::string& out_path) {
  splitkit::TraceTable table = splitkit::read_csv_file(trace_path);
  std::ifstream in(envelope_path);
  if (!in) {
    std::cerr << "cannot open envelope file '" << envelope_path << "'\n";
    return 2;
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  splitkit::RateEnvelope envelope = splitkit::rate_envelope_from_json(doc);
  if (column.empty() && doc.contains("column")) {
    column = doc.at("column").get<std::string>();
  }
  if (column.empty()) {
    std::cerr << "no trace column given (use --column or a \"column\" key "
                 "in the envelope file)\n";
    return 2;
  }
  splitkit::RateCertificate certificate = splitkit::certify(
      table.column(column), envelope.applies_to, envelope, tol);
  nlohmann::json result = splitkit::to_json(certificate);
  result["column"] = column;
  std::cout << result.dump(2) << '\n';
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open '" << out_path << "' for writing\n";
      return 1;
    }
    out << result.dump(2) << '\n';
  }
  switch (certificate.verdict) {
    case splitkit::RateVerdict::kCertified:
      return 0;
    case splitkit::RateVerdict::kNotApplicable:
      return 2;
    case splitkit::RateVerdict::kViolated:
      return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-splitting experiment runner"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string run_out_dir;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Run experiments from a JSON spec file");
  run_cmd->add_option("spec-file", spec_path, "JSON experiment spec")
      ->required();
  run_cmd->add_option("--out", run_out_dir,
                      "Output directory (the " +
                          std::string(splitkit::kOutputDirEnvVar) +
                          " environment variable overrides this)");

  std::string kind;
  std::uint64_t seed = 1;
  std::vector<std::size_t> dims;
  std::vector<std::string> params;
  std::string generate_out;
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "Generate a catalog instance");
  generate_cmd->add_option("kind", kind, "Problem kind")->required();
  generate_cmd->add_option("--seed", seed, "Generator seed");
  generate_cmd->add_option("--dims", dims, "Kind-specific sizes")
      ->delimiter(',');
  generate_cmd->add_option("--param", params,
                           "Kind-specific parameter, name=value");
  generate_cmd->add_option("--out", generate_out,
                           "Write the instance descriptor JSON here");

  std::string trace_path;
  std::string envelope_path;
  std::string column;
  double tol = splitkit::kProvenRateTol;
  std::string certify_out;
  CLI::App* certify_cmd = app.add_subcommand(
      "certify", "Check a recorded trace column against a rate envelope");
  certify_cmd->add_option("trace", trace_path, "Trace CSV file")->required();
  certify_cmd->add_option("--envelope", envelope_path, "Envelope JSON file")
      ->required();
  certify_cmd->add_option("--column", column,
                          "Trace column (defaults to the envelope file's "
                          "\"column\" key)");
  certify_cmd->add_option("--tol", tol, "Relative tolerance");
  certify_cmd->add_option("--out", certify_out,
                          "Write the certificate JSON here too");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return splitkit::run_spec_file(spec_path, run_out_dir, std::cout);
    }
    if (generate_cmd->parsed()) {
      return run_generate(kind, seed, dims, params, generate_out);
    }
    return run_certify(trace_path, envelope_path, column, tol, certify_out);
  } catch (const splitkit::InvalidArgumentError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
