#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "critlab/mc.hpp"

namespace critlab::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Malformed artifact on disk; the message names the file and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Round-trip exact text form of a double.
std::string format_real(double v);

/// Rectangular table written as CSV with a header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> columns) : header(std::move(columns)) {}
  void add(const std::vector<double>& values);
  void add_text(std::vector<std::string> values);
  std::string str() const;
};

/// Parses a CSV file, rejecting rows whose column count differs from the header.
CsvTable read_csv(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);

/// Persist a sample set: series.csv, blocks_<observable>.csv and provenance.json.
void save_samples(const SampleSet& samples, const fs::path& dir);
SampleSet load_samples(const fs::path& dir);

/// Structured error report written next to the outputs on runtime failure.
void write_error_report(const fs::path& dir, const std::string& command, const std::string& message);

}  // namespace critlab::cli
