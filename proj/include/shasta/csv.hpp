#pragma once

// Sample CSV format: a header row, then one row per sample. The column named
// `group` holds 1-based group labels; an optional `variance` column holds a
// known per-sample noise variance (reporting only). Every other column is a
// data coordinate, in header order. An empty cell is a missing entry; a row
// with every data cell empty is a legal sample with nothing observed.

#include "shasta/batch.hpp"
#include "shasta/types.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shasta {

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CsvRow {
  ObservedSample sample;
  std::optional<double> variance;
  std::size_t line = 0;
};

/// Streams samples one row at a time; memory use does not grow with file length.
class CsvSampleReader {
 public:
  explicit CsvSampleReader(const std::filesystem::path& path);

  Index dimension() const { return static_cast<Index>(value_columns_.size()); }
  bool has_variance() const { return variance_column_.has_value(); }

  std::optional<CsvRow> next();

 private:
  std::string file_;
  std::ifstream in_;
  std::size_t line_ = 0;
  std::size_t columns_ = 0;
  std::size_t group_column_ = 0;
  std::optional<std::size_t> variance_column_;
  std::vector<std::size_t> value_columns_;
  std::string buffer_;
  std::vector<std::string_view> cells_;
  std::vector<double> scratch_;
};

/// Reads a whole file into a batch problem. `groups` defaults to the largest
/// label seen.
BatchProblem ingest_csv(const std::filesystem::path& path, Index k,
                        std::optional<int> groups = std::nullopt);

struct CsvSummary {
  std::size_t rows = 0;
  Index d = 0;
  std::vector<std::size_t> group_counts;  // index l holds label l + 1
  std::size_t empty_rows = 0;
  double mean_observed = 0.0;
  bool has_variance = false;
};

/// Validates a file in one streaming pass.
CsvSummary inspect_csv(const std::filesystem::path& path);

/// Writes samples in the format above (labels written 1-based).
void write_samples_csv(std::ostream& out, std::span<const ObservedSample> samples, Index d,
                       std::span<const double> variances = {});

}  // namespace shasta
