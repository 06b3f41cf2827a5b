// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#include "splitkit/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "splitkit/errors.hpp"

namespace splitkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> index_column(std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = static_cast<double>(i);
  }
  return k;
}

double parse_field(const std::string& text, std::size_t line_no) {
  if (text == "nan" || text == "-nan") {
    return kNaN;
  }
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw InvalidArgumentError("csv line " + std::to_string(line_no) +
                               ": not a number: '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

nlohmann::json number_or_null(double value) {
  if (std::isnan(value)) {
    return nullptr;
  }
  return value;
}

double number_from(const nlohmann::json& value) {
  if (value.is_null()) {
    return kNaN;
  }
  return value.get<double>();
}

}  // namespace

bool TraceTable::has_column(const std::string& name) const {
  for (const std::string& col : columns) {
    if (col == name) {
      return true;
    }
  }
  return false;
}

const std::vector<double>& TraceTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) {
      return data[i];
    }
  }
  throw InvalidArgumentError("no column named '" + name + "'");
}

TraceTable tabulate(const IterationTrace& trace) {
  TraceTable table;
  table.columns = {"k",   "fpr", "step_sq",       "obj_gap_nonergodic",
                   "obj_gap_ergodic", "S_f", "S_g", "dist_to_zstar"};
  table.data = {index_column(trace.steps()),
                trace.fpr,
                trace.step_sq,
                trace.obj_gap_nonergodic,
                trace.obj_gap_ergodic,
                trace.s_f,
                trace.s_g,
                trace.dist_to_zstar};
  return table;
}

TraceTable tabulate(const FeasibilityTrace& trace) {
  TraceTable table;
  table.columns = {"k",      "lambda", "gamma_f", "gamma_g", "fpr",
                   "step_sq", "dist_f", "dist_g",  "dist_intersection"};
  std::vector<double> dist_int = trace.dist_intersection;
  if (dist_int.empty()) {
    dist_int.assign(trace.steps(), kNaN);
  }
  table.data = {index_column(trace.steps()),
                trace.lambda,
                trace.gamma_f,
                trace.gamma_g,
                trace.fpr,
                trace.step_sq,
                trace.dist_f,
                trace.dist_g,
                std::move(dist_int)};
  return table;
}

TraceTable tabulate(const AdmmTrace& trace) {
  TraceTable table;
  table.columns = {"k",   "fpr", "step_sq",       "obj_gap_nonergodic",
                   "obj_gap_ergodic", "S_f", "S_g", "dist_to_zstar",
                   "residual_norm_sq", "w_dg_dist", "w_df_dist"};
  table.data = {index_column(trace.steps()),
                trace.fpr,
                trace.step_sq,
                trace.obj_gap_nonergodic,
                trace.obj_gap_ergodic,
                trace.s_df,
                trace.s_dg,
                trace.dist_to_zstar,
                trace.residual_norm_sq,
                trace.w_dg_dist,
                trace.w_df_dist};
  return table;
}

std::string format_double(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_csv(std::ostream& out, const TraceTable& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) {
      out << ',';
    }
    out << table.columns[i];
  }
  out << '\n';
  std::size_t n = table.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < table.data.size(); ++c) {
      if (c > 0) {
        out << ',';
      }
      out << format_double(table.data[c][r]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const TraceTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgumentError("cannot open '" + path + "' for writing");
  }
  write_csv(out, table);
  if (!out) {
    throw InvalidArgumentError("failed writing '" + path + "'");
  }
}

TraceTable read_csv(std::istream& in) {
  TraceTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgumentError("csv input is empty");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  table.columns = split_line(line);
  table.data.assign(table.columns.size(), {});
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.columns.size()) {
      throw InvalidArgumentError("csv line " + std::to_string(line_no) +
                                 ": expected " +
                                 std::to_string(table.columns.size()) +
                                 " fields, found " +
                                 std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      table.data[c].push_back(parse_field(fields[c], line_no));
    }
  }
  return table;
}

TraceTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgumentError("cannot open '" + path + "'");
  }
  return read_csv(in);
}

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::kBigOInverseK:
      return "inverse-k";
    case RateKind::kLittleOInverseK:
      return "little-o-inverse-k";
    case RateKind::kBigOInverseKSquared:
      return "inverse-k-squared";
    case RateKind::kLittleOInverseKSquared:
      return "little-o-inverse-k-squared";
    case RateKind::kBigOInverseSqrtK:
      return "inverse-sqrt-k";
    case RateKind::kLinear:
      return "linear";
  }
  throw InvalidArgumentError("unknown rate kind");
}

std::string to_string(SequenceTag tag) {
  switch (tag) {
    case SequenceTag::kFpr:
      return "fpr";
    case SequenceTag::kObjectiveGap:
      return "objective-gap";
    case SequenceTag::kSSum:
      return "s-sum";
    case SequenceTag::kResidual:
      return "residual";
    case SequenceTag::kDistance:
      return "distance";
  }
  throw InvalidArgumentError("unknown sequence tag");
}

std::string to_string(Ergodicity ergodicity) {
  switch (ergodicity) {
    case Ergodicity::kErgodic:
      return "ergodic";
    case Ergodicity::kNonergodic:
      return "nonergodic";
    case Ergodicity::kBestIterate:
      return "best-iterate";
  }
  throw InvalidArgumentError("unknown ergodicity");
}

std::string to_string(RateVerdict verdict) {
  switch (verdict) {
    case RateVerdict::kCertified:
      return "certified";
    case RateVerdict::kViolated:
      return "violated";
    case RateVerdict::kNotApplicable:
      return "not-applicable";
  }
  throw InvalidArgumentError("unknown rate verdict");
}

RateKind rate_kind_from_string(const std::string& name) {
  if (name == "inverse-k") return RateKind::kBigOInverseK;
  if (name == "little-o-inverse-k") return RateKind::kLittleOInverseK;
  if (name == "inverse-k-squared") return RateKind::kBigOInverseKSquared;
  if (name == "little-o-inverse-k-squared") {
    return RateKind::kLittleOInverseKSquared;
  }
  if (name == "inverse-sqrt-k") return RateKind::kBigOInverseSqrtK;
  if (name == "linear") return RateKind::kLinear;
  throw InvalidArgumentError("unknown rate kind '" + name + "'");
}

SequenceTag sequence_tag_from_string(const std::string& name) {
  if (name == "fpr") return SequenceTag::kFpr;
  if (name == "objective-gap") return SequenceTag::kObjectiveGap;
  if (name == "s-sum") return SequenceTag::kSSum;
  if (name == "residual") return SequenceTag::kResidual;
  if (name == "distance") return SequenceTag::kDistance;
  throw InvalidArgumentError("unknown sequence tag '" + name + "'");
}

Ergodicity ergodicity_from_string(const std::string& name) {
  if (name == "ergodic") return Ergodicity::kErgodic;
  if (name == "nonergodic") return Ergodicity::kNonergodic;
  if (name == "best-iterate") return Ergodicity::kBestIterate;
  throw InvalidArgumentError("unknown ergodicity '" + name + "'");
}

RateVerdict rate_verdict_from_string(const std::string& name) {
  if (name == "certified") return RateVerdict::kCertified;
  if (name == "violated") return RateVerdict::kViolated;
  if (name == "not-applicable") return RateVerdict::kNotApplicable;
  throw InvalidArgumentError("unknown rate verdict '" + name + "'");
}

nlohmann::json to_json(const TraceTable& table) {
  nlohmann::json doc;
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  std::size_t n = table.rows();
  for (std::size_t r = 0; r < n; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (const std::vector<double>& col : table.data) {
      row.push_back(number_or_null(col[r]));
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

TraceTable trace_table_from_json(const nlohmann::json& doc) {
  TraceTable table;
  table.columns = doc.at("columns").get<std::vector<std::string>>();
  table.data.assign(table.columns.size(), {});
  for (const nlohmann::json& row : doc.at("rows")) {
    if (row.size() != table.columns.size()) {
      throw InvalidArgumentError("trace table row width mismatch");
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      table.data[c].push_back(number_from(row[c]));
    }
  }
  return table;
}

nlohmann::json to_json(const RateEnvelope& envelope) {
  nlohmann::json doc;
  doc["kind"] = to_string(envelope.kind);
  doc["constant"] = number_or_null(envelope.constant);
  if (!envelope.factors.empty()) {
    doc["factors"] = envelope.factors;
  }
  doc["applies_to"] = to_string(envelope.applies_to);
  doc["ergodicity"] = to_string(envelope.ergodicity);
  return doc;
}

RateEnvelope rate_envelope_from_json(const nlohmann::json& doc) {
  RateEnvelope envelope;
  envelope.kind = rate_kind_from_string(doc.at("kind").get<std::string>());
  envelope.constant = number_from(doc.at("constant"));
  if (doc.contains("factors")) {
    envelope.factors = doc.at("factors").get<std::vector<double>>();
  }
  envelope.applies_to =
      sequence_tag_from_string(doc.at("applies_to").get<std::string>());
  envelope.ergodicity =
      ergodicity_from_string(doc.at("ergodicity").get<std::string>());
  return envelope;
}

nlohmann::json to_json(const RateCertificate& certificate) {
  nlohmann::json doc;
  doc["envelope"] = to_json(certificate.envelope);
  doc["max_relative_violation"] =
      number_or_null(certificate.max_relative_violation);
  if (certificate.first_violation_k.has_value()) {
    doc["first_violation_k"] = *certificate.first_violation_k;
  } else {
    doc["first_violation_k"] = nullptr;
  }
  doc["fitted_exponent"] = number_or_null(certificate.fitted_exponent);
  doc["fitted_linear_factor"] =
      number_or_null(certificate.fitted_linear_factor);
  doc["verdict"] = to_string(certificate.verdict);
  return doc;
}

RateCertificate rate_certificate_from_json(const nlohmann::json& doc) {
  RateCertificate certificate;
  certificate.envelope = rate_envelope_from_json(doc.at("envelope"));
  certificate.max_relative_violation =
      number_from(doc.at("max_relative_violation"));
  if (!doc.at("first_violation_k").is_null()) {
    certificate.first_violation_k =
        doc.at("first_violation_k").get<std::size_t>();
  }
  certificate.fitted_exponent = number_from(doc.at("fitted_exponent"));
  certificate.fitted_linear_factor =
      number_from(doc.at("fitted_linear_factor"));
  certificate.verdict =
      rate_verdict_from_string(doc.at("verdict").get<std::string>());
  return certificate;
}

nlohmann::json to_json(const InequalityCheck& check) {
  nlohmann::json doc;
  doc["name"] = check.name;
  doc["applicable"] = check.applicable;
  doc["comparisons"] = check.comparisons;
  if (check.first_violation_k.has_value()) {
    doc["first_violation_k"] = *check.first_violation_k;
  } else {
    doc["first_violation_k"] = nullptr;
  }
  doc["max_violation"] = number_or_null(check.max_violation);
  doc["passed"] = check.passed();
  return doc;
}

nlohmann::json to_json(const InequalityReport& report) {
  nlohmann::json doc;
  doc["scale"] = number_or_null(report.scale);
  nlohmann::json checks = nlohmann::json::array();
  for (const InequalityCheck& check : report.checks) {
    checks.push_back(to_json(check));
  }
  doc["checks"] = std::move(checks);
  doc["all_passed"] = report.all_passed();
  return doc;
}

}  // namespace splitkit
