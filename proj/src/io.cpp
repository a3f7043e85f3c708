#include "dhl/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dhl {

using nlohmann::ordered_json;

std::string format_double17(double x) {
  if (x == 0.0 && std::signbit(x)) return "-0.0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

bool is_primitive(const ordered_json& j) { return !j.is_object() && !j.is_array(); }

void dump_value(const ordered_json& j, int indent, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  if (j.is_number_float()) {
    const double v = j.get<double>();
    out += std::isfinite(v) ? format_double17(v) : "null";
  } else if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{";
    out += nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) {
        out += ",";
        out += nl;
      }
      first = false;
      out += pad;
      out += ordered_json(it.key()).dump();
      out += indent > 0 ? ": " : ":";
      dump_value(it.value(), indent, depth + 1, out);
    }
    out += nl;
    out += pad_close;
    out += "}";
  } else if (j.is_array()) {
    const bool flat = std::all_of(j.begin(), j.end(), is_primitive);
    out += "[";
    bool first = true;
    for (const auto& e : j) {
      if (!first) out += flat ? ", " : ",";
      if (!flat) {
        out += nl;
        out += pad;
      }
      first = false;
      dump_value(e, indent, depth + 1, out);
    }
    if (!flat && !j.empty()) {
      out += nl;
      out += pad_close;
    }
    out += "]";
  } else {
    out += j.dump();
  }
}

template <class Json>
std::vector<std::int64_t> int_array(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw FormatError(std::string("sequence: missing array field \"") + field + "\"");
  }
  std::vector<std::int64_t> out;
  for (const auto& e : j[field]) {
    if (!e.is_number_integer()) throw FormatError(std::string("sequence: \"") + field + "\" must hold integers");
    out.push_back(e.template get<std::int64_t>());
  }
  return out;
}

}  // namespace

std::string dump_json17(const ordered_json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  if (indent > 0) out += "\n";
  return out;
}

ordered_json seq_to_json(const LatticeSeq& b) {
  ordered_json j;
  j["n"] = b.dim();
  j["origin"] = b.origin();
  j["shape"] = b.shape();
  ordered_json vals = ordered_json::array();
  for (double v : b.values()) vals.push_back(v);
  j["values"] = std::move(vals);
  return j;
}

std::string seq_to_json_text(const LatticeSeq& b) { return dump_json17(seq_to_json(b)); }

LatticeSeq seq_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("sequence: expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw FormatError("sequence: missing integer field \"n\"");
  const auto n = j["n"].get<std::int64_t>();
  auto origin = int_array(j, "origin");
  auto shape = int_array(j, "shape");
  if (n <= 0) throw FormatError("sequence: n must be positive");
  if (origin.size() != static_cast<std::size_t>(n) || shape.size() != static_cast<std::size_t>(n)) {
    throw FormatError("sequence: origin/shape length must equal n");
  }
  if (!j.contains("values") || !j["values"].is_array()) throw FormatError("sequence: missing array field \"values\"");
  std::vector<double> values;
  values.reserve(j["values"].size());
  for (const auto& e : j["values"]) {
    if (!e.is_number()) throw FormatError("sequence: values must be numbers");
    values.push_back(e.get<double>());
  }
  try {
    return LatticeSeq(Box(std::move(origin), std::move(shape)), std::move(values));
  } catch (const DomainError& err) {
    throw FormatError(std::string("sequence: ") + err.what());
  }
}

LatticeSeq seq_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw FormatError(std::string("malformed JSON: ") + err.what());
  }
  return seq_from_json(j);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

LatticeSeq read_seq_file(const std::filesystem::path& path) { return seq_from_json_text(read_text_file(path)); }

void write_seq_file(const std::filesystem::path& path, const LatticeSeq& b) {
  write_text_file(path, seq_to_json_text(b));
}

}  // namespace dhl
