#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "macorner/model/scalar_field.hpp"

namespace macorner {

/// CSV with header `x1,x2,u`, one row per non-exterior node in lattice order,
/// 17 significant digits.
void write_field_csv(std::ostream& os, const ScalarField& u);

/// Sidecar metadata: `c`, `t`, `h`, `R`, `shape`, `provenance`.
nlohmann::json field_metadata_json(const ScalarField& u);

/// Writes <stem>.csv and <stem>.json.
void save_field(const ScalarField& u, const std::filesystem::path& stem);

/// Reads a field back from the CSV and its sidecar. Throws InputError on any
/// malformed, missing or truncated content.
ScalarField load_field(const std::filesystem::path& csv_path, const std::filesystem::path& meta_path);
ScalarField load_field(const std::filesystem::path& stem);

}  // namespace macorner
