#include "qwalk/cli/output.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "qwalk/errors.hpp"

namespace qwalk::cli {

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

namespace {

int label_of(const Distribution& d, std::size_t i) {
  return d.has_coordinates() ? d.coordinates()[i] : static_cast<int>(i);
}

}  // namespace

std::string distribution_csv(const Distribution& d) {
  std::string out = d.has_coordinates() ? "x,probability\n" : "vertex,probability\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) continue;
    out += std::to_string(label_of(d, i));
    out += ',';
    out += format_number(d[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json distribution_json(const Distribution& d, const nlohmann::json& metadata) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) continue;
    rows.push_back({label_of(d, i), std::stod(format_number(d[i]))});
  }
  return {{"metadata", metadata},
          {"columns", {d.has_coordinates() ? "x" : "vertex", "probability"}},
          {"rows", rows}};
}

CsvDistribution parse_distribution_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CsvDistribution out;
  if (!std::getline(in, line)) throw InvalidArgument("empty distribution file");
  if (line == "x,probability") {
    out.label_column = "x";
  } else if (line == "vertex,probability") {
    out.label_column = "vertex";
  } else {
    throw InvalidArgument("unexpected header '" + line + "'");
  }
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("malformed row '" + line + "'");
    out.rows.push_back({std::stoi(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace qwalk::cli
