#pragma once

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ctrap::cli {

/// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Result table with '#' header lines carrying the config hash and versions.
class ResultTable {
public:
  ResultTable(std::vector<std::string> columns, nlohmann::json config);
  void add(std::vector<std::string> row);
  void set_summary(nlohmann::json summary) { summary_ = std::move(summary); }
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  /// out = std::nullopt: CSV to stdout. Otherwise out.csv and out.json.
  void emit(const std::optional<std::filesystem::path>& out) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  nlohmann::json config_;
  nlohmann::json summary_ = nlohmann::json::object();
  std::string hash_;
};

}  // namespace ctrap::cli
