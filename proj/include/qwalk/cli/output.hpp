#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qwalk/stats.hpp"

namespace qwalk::cli {

// 15 significant digits, shortest form ("%.15g").
std::string format_number(double x);

// One row per support point. Header "x,probability" when the distribution has
// coordinates, "vertex,probability" otherwise.
std::string distribution_csv(const Distribution& d);

// {"metadata": {...}, "columns": [label, "probability"], "rows": [[label, p], ...]}
// with the same rows and the same 15-digit values as the CSV.
nlohmann::json distribution_json(const Distribution& d, const nlohmann::json& metadata);

struct CsvRow {
  int label = 0;
  double probability = 0.0;
};

struct CsvDistribution {
  std::string label_column;  // "x" or "vertex"
  std::vector<CsvRow> rows;
};

CsvDistribution parse_distribution_csv(const std::string& text);

// Writes through a temporary file in the same directory, then renames it over
// the destination.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace qwalk::cli
