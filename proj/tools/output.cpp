#include "output.hpp"

#include "ctrap/version.hpp"
#include "ctrap/weights.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace ctrap::cli {

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ResultTable::ResultTable(std::vector<std::string> columns, nlohmann::json config)
    : columns_(std::move(columns)), config_(std::move(config)), hash_(config_hash(config_)) {}

void ResultTable::add(std::vector<std::string> row) {
  if (row.size() != columns_.size()) throw std::logic_error("ResultTable: row width mismatch");
  rows_.push_back(std::move(row));
}

void ResultTable::write_csv(std::ostream& os) const {
  os << "# config_hash=" << hash_ << "\r\n";
  os << "# table_cache_version=" << WeightTable::kFormatVersion << "\r\n";
  os << "# library_version=" << kLibraryVersion << "\r\n";
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << "\r\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = r[i];
    rows.push_back(std::move(obj));
  }
  return {{"config", config_},
          {"config_hash", hash_},
          {"table_cache_version", WeightTable::kFormatVersion},
          {"library_version", kLibraryVersion},
          {"rows", std::move(rows)},
          {"summary", summary_}};
}

void ResultTable::emit(const std::optional<std::filesystem::path>& out) const {
  if (!out) {
    write_csv(std::cout);
    return;
  }
  if (out->has_parent_path()) std::filesystem::create_directories(out->parent_path());
  auto csv_path = *out, json_path = *out;
  csv_path += ".csv";
  json_path += ".json";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  write_csv(csv);
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot write " + json_path.string());
  js << to_json().dump(2) << "\n";
  std::cerr << "wrote " << csv_path.string() << " and " << json_path.string() << "\n";
}

}  // namespace ctrap::cli
