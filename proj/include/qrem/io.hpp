#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qrem/errors.hpp"
#include "qrem/model.hpp"
#include "qrem/spectral.hpp"
#include "qrem/version.hpp"

namespace qrem {

inline std::string format_hex(std::uint64_t v) {
  std::ostringstream out;
  out << "0x" << std::hex << v;
  return out.str();
}

/// Disorder-field artifact: {N, p, seed, checksum, values}. The field is
/// regenerable from (N, p, seed) alone; the stored checksum detects
/// generator drift.
inline nlohmann::ordered_json field_to_json(const DisorderField& field) {
  nlohmann::ordered_json doc;
  doc["n"] = field.num_spins();
  if (field.order().is_finite()) {
    doc["p"] = field.order().value();
  } else {
    doc["p"] = "inf";
  }
  doc["seed"] = field.seed();
  doc["checksum"] = format_hex(field.checksum());
  doc["values"] = std::vector<double>(field.values().begin(), field.values().end());
  return doc;
}

inline InteractionOrder order_from_json(const nlohmann::json& value) {
  if (value.is_string()) return parse_order(value.get<std::string>());
  return InteractionOrder(value.get<int>());
}

inline DisorderField field_from_json(const nlohmann::json& doc) {
  try {
    const int n = doc.at("n").get<int>();
    const auto order = order_from_json(doc.at("p"));
    const auto seed = doc.at("seed").get<std::uint64_t>();
    auto values = doc.at("values").get<std::vector<double>>();
    DisorderField field(n, order, seed, std::move(values));
    if (doc.contains("checksum") &&
        doc.at("checksum").get<std::string>() != format_hex(field.checksum())) {
      throw io_error("field artifact checksum mismatch");
    }
    return field;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("malformed field artifact: ") + e.what());
  }
}

/// Regenerates the field from its (N, p, seed) metadata and compares
/// checksums; false signals generator drift.
inline bool verify_regeneration(const DisorderField& field) {
  const DisorderField fresh =
      field.order().is_finite()
          ? sample_pspin_field(field.num_spins(), field.order().value(),
                               field.seed())
          : sample_rem_field(field.num_spins(), field.seed());
  return fresh.checksum() == field.checksum();
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw io_error("write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void save_field(const DisorderField& field, const std::string& path) {
  write_text_file(path, field_to_json(field).dump(1) + "\n");
}

inline DisorderField load_field(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("cannot parse '") + path + "': " + e.what());
  }
  return field_from_json(doc);
}

/// One CSV/JSON row per pressure record: N, p, seed, beta, gamma, method,
/// value, stderr.
inline nlohmann::ordered_json record_to_json(const PressureRecord& r) {
  nlohmann::ordered_json row;
  row["N"] = r.num_spins;
  row["p"] = to_string(r.order);
  row["seed"] = r.seed;
  row["beta"] = r.beta;
  row["gamma"] = r.gamma;
  row["method"] = to_string(r.method);
  row["value"] = r.value;
  row["stderr"] = r.std_error;
  return row;
}

namespace detail {

inline std::string json_scalar_to_csv(const nlohmann::ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace detail

/// Renders an array of uniform JSON objects as CSV, preceded by the
/// versioned header comment. Key order of the first row fixes the columns.
inline std::string rows_to_csv(const nlohmann::ordered_json& rows,
                               std::string_view header_comment) {
  std::ostringstream out;
  out << "# " << header_comment << "\n";
  if (rows.empty()) return out.str();
  bool first = true;
  for (const auto& [key, value] : rows.front().items()) {
    (void)value;
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << "\n";
  for (const auto& row : rows) {
    first = true;
    for (const auto& [key, value] : row.items()) {
      (void)key;
      out << (first ? "" : ",") << detail::json_scalar_to_csv(value);
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

/// JSON document variant of the same table.
inline std::string rows_to_json_doc(const nlohmann::ordered_json& rows,
                                    std::string_view header_comment) {
  nlohmann::ordered_json doc;
  doc["header"] = header_comment;
  doc["rows"] = rows;
  return doc.dump(1) + "\n";
}

}  // namespace qrem
