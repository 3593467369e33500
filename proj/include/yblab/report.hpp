#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "yblab/lattice.hpp"
#include "yblab/verify.hpp"

namespace yblab::report {

using json = nlohmann::json;

json to_json(const weights::AnySpin& s);
weights::AnySpin spin_from_json(const json& j);

json to_json(const verify::StarConfig& cfg);
verify::StarConfig star_from_json(const json& j);

/// Non-finite numbers are written as null and read back as NaN.
json to_json(const verify::VerificationReport& r);
verify::VerificationReport verification_from_json(const json& j);

json to_json(const lattice::PartitionResult& r);
/// Summary only; the per-sweep series goes to series_csv.
json to_json(const lattice::Observables& o);

json model_to_json(const weights::Model& m);

/// One line of the flat CSV summary.
struct CsvRow {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_residual = 0.0;
  bool passed = false;
};

std::string to_csv(const std::vector<CsvRow>& rows);
/// One row per measurement sweep: sweep, mean_log_w.
std::string series_csv(const lattice::Observables& o);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const json& j);

/// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace yblab::report
