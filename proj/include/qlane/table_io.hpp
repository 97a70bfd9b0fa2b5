#pragma once

// Text formats for payoff tables and utility coefficients.
//
// Payoff table: CSV with a header row, one record per
// (state_id, role, self_type, opp_type). The payoff columns are either
// R,S,T,P or U_CC,U_CD,U_DC,U_DD (converted through quad_from_utilities on
// load). Lines starting with '#' are comments. Numbers use 17 significant
// digits. A sidecar "<path>.meta.json" carries provenance, seed and
// standardization statistics; it is optional on load.
//
// Coefficient file: JSON object {"coefficients": [{"role", "self", "opp",
// "outcome", "beta": [12 numbers]}, ...]}.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qlane/game.hpp"

namespace qlane {

// %.17g; NaN becomes "NA".
std::string format_double(double x);

std::string serialize_table(const PayoffTable& table);
std::string serialize_table_metadata(const PayoffTable& table);
PayoffTable parse_table(std::string_view csv, std::string_view source_name = "<memory>");

std::filesystem::path table_metadata_path(const std::filesystem::path& table_path);

void save_table(const PayoffTable& table, const std::filesystem::path& path);
/// Throws IoError, ParseError (with line number) or CompletenessError.
PayoffTable load_table(const std::filesystem::path& path);

// FNV-1a 64 of the serialized table, as 16 hex digits.
std::string table_digest(const PayoffTable& table);

std::string serialize_coefficients(const UtilityCoefficients& coeffs);
UtilityCoefficients parse_coefficients(std::string_view json_text);
void save_coefficients(const UtilityCoefficients& coeffs, const std::filesystem::path& path);
UtilityCoefficients load_coefficients(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace qlane
