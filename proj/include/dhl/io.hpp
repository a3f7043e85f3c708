#pragma once

// JSON text format for lattice sequences:
//   {"n": 2, "origin": [..], "shape": [..], "values": [..]}
// Values are written with 17 significant digits so every double round-trips
// bit-exactly.

#include <filesystem>
#include <string>

#include "dhl/lattice.hpp"
#include "json.hpp"

namespace dhl {

/// Raised on malformed or inconsistent input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// %.17g, with "-0.0" for negative zero so the sign survives parsing.
std::string format_double17(double x);

std::string seq_to_json_text(const LatticeSeq& b);
nlohmann::ordered_json seq_to_json(const LatticeSeq& b);

/// Accepts any JSON object carrying the four sequence fields; extra fields
/// are ignored. Throws FormatError on missing fields or length mismatch.
LatticeSeq seq_from_json(const nlohmann::json& j);
LatticeSeq seq_from_json_text(const std::string& text);

LatticeSeq read_seq_file(const std::filesystem::path& path);
void write_seq_file(const std::filesystem::path& path, const LatticeSeq& b);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Serializes with doubles formatted by format_double17. Used wherever the
/// output must be byte-stable.
std::string dump_json17(const nlohmann::ordered_json& j, int indent = 2);

}  // namespace dhl
