// Copyright (c) 2026 splitkit contributors
// SPDX-License-Identifier: MIT

#ifndef SPLITKIT_TRACE_IO_HPP_
#define SPLITKIT_TRACE_IO_HPP_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "splitkit/admm.hpp"
#include "splitkit/feasibility.hpp"
#include "splitkit/rates.hpp"
#include "splitkit/splitting.hpp"

#include <json.hpp>

// Columnar views of solver traces, CSV round-tripping at full double
// precision, and JSON serialization of rate envelopes, certificates, and
// inequality reports. Numbers are written with 17 significant digits so a
// read-back reproduces the recorded run bit for bit.

namespace splitkit {

// A named-column table of doubles. All columns have equal length; NaN
// marks entries a run did not produce (no reference point, no projector).
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // one vector per column

  std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
  bool has_column(const std::string& name) const;
  // Throws InvalidArgumentError when the column does not exist.
  const std::vector<double>& column(const std::string& name) const;
};

// Scalar-history tables for the three trace types. The iteration index k
// is emitted as the first column. Column orders are part of the external
// contract:
//   splitting:   k, fpr, step_sq, obj_gap_nonergodic, obj_gap_ergodic,
//                S_f, S_g, dist_to_zstar
//   admm:        the splitting columns followed by residual_norm_sq,
//                w_dg_dist, w_df_dist
//   feasibility: k, lambda, gamma_f, gamma_g, fpr, step_sq, dist_f,
//                dist_g, dist_intersection
TraceTable tabulate(const IterationTrace& trace);
TraceTable tabulate(const FeasibilityTrace& trace);
TraceTable tabulate(const AdmmTrace& trace);

// 17-significant-digit decimal form; strtod parses it back to the same
// double. "nan" for NaN, "inf"/"-inf" for infinities.
std::string format_double(double value);

// CSV with a header row. write_csv emits exactly one '\n' per line so the
// output is byte-identical across runs of the same experiment.
void write_csv(std::ostream& out, const TraceTable& table);
void write_csv_file(const std::string& path, const TraceTable& table);
TraceTable read_csv(std::istream& in);
TraceTable read_csv_file(const std::string& path);

// Enum names used in JSON documents and CLI arguments. from_* throw
// InvalidArgumentError on unknown names.
std::string to_string(RateKind kind);
std::string to_string(SequenceTag tag);
std::string to_string(Ergodicity ergodicity);
std::string to_string(RateVerdict verdict);
RateKind rate_kind_from_string(const std::string& name);
SequenceTag sequence_tag_from_string(const std::string& name);
Ergodicity ergodicity_from_string(const std::string& name);
RateVerdict rate_verdict_from_string(const std::string& name);

// JSON forms. NaN serializes as null and parses back as NaN.
nlohmann::json to_json(const TraceTable& table);
TraceTable trace_table_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RateEnvelope& envelope);
RateEnvelope rate_envelope_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RateCertificate& certificate);
RateCertificate rate_certificate_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const InequalityCheck& check);
nlohmann::json to_json(const InequalityReport& report);

}  // namespace splitkit

#endif  // SPLITKIT_TRACE_IO_HPP_
