#include "shasta/csv.hpp"

#include "shasta/metrics.hpp"

#include <charconv>
#include <cmath>
#include <string_view>

namespace shasta {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void split(std::string_view line, std::vector<std::string_view>& cells) {
  cells.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

}  // namespace

CsvSampleReader::CsvSampleReader(const std::filesystem::path& path)
    : file_(path.string()), in_(path) {
  if (!in_) throw std::runtime_error("cannot open " + file_);
  if (!std::getline(in_, buffer_)) throw CsvError(file_, 1, "missing header row");
  line_ = 1;
  split(buffer_, cells_);
  columns_ = cells_.size();
  std::optional<std::size_t> group;
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c] == "group") {
      if (group) throw CsvError(file_, 1, "duplicate group column");
      group = c;
    } else if (cells_[c] == "variance") {
      if (variance_column_) throw CsvError(file_, 1, "duplicate variance column");
      variance_column_ = c;
    } else {
      value_columns_.push_back(c);
    }
  }
  if (!group) throw CsvError(file_, 1, "header has no group column");
  if (value_columns_.empty()) throw CsvError(file_, 1, "header has no data columns");
  group_column_ = *group;
}

std::optional<CsvRow> CsvSampleReader::next() {
  while (std::getline(in_, buffer_)) {
    ++line_;
    if (trim(buffer_).empty()) continue;
    split(buffer_, cells_);
    if (cells_.size() != columns_) {
      throw CsvError(file_, line_, "expected " + std::to_string(columns_) + " cells, found " +
                                       std::to_string(cells_.size()));
    }
    CsvRow row;
    row.line = line_;

    const auto g = parse_double(cells_[group_column_]);
    if (!g || *g != static_cast<double>(static_cast<long>(*g)) || *g < 1.0) {
      throw CsvError(file_, line_, "group label must be a positive integer");
    }
    row.sample.group = static_cast<int>(*g) - 1;

    if (variance_column_ && !cells_[*variance_column_].empty()) {
      const auto v = parse_double(cells_[*variance_column_]);
      if (!v || !std::isfinite(*v)) throw CsvError(file_, line_, "variance is not a number");
      row.variance = *v;
    }

    scratch_.clear();
    for (std::size_t i = 0; i < value_columns_.size(); ++i) {
      const auto cell = cells_[value_columns_[i]];
      if (cell.empty()) continue;
      const auto x = parse_double(cell);
      if (!x || !std::isfinite(*x)) {
        throw CsvError(file_, line_, "cell " + std::to_string(value_columns_[i] + 1) +
                                         " is not a finite number");
      }
      row.sample.omega.push_back(static_cast<Index>(i));
      scratch_.push_back(*x);
    }
    row.sample.values = Eigen::Map<const Vector>(scratch_.data(), static_cast<Index>(scratch_.size()));
    return row;
  }
  if (in_.bad()) throw std::runtime_error("read error in " + file_);
  return std::nullopt;
}

BatchProblem ingest_csv(const std::filesystem::path& path, Index k, std::optional<int> groups) {
  CsvSampleReader reader(path);
  BatchProblem p;
  p.d = reader.dimension();
  p.k = k;
  int max_group = 0;
  while (auto row = reader.next()) {
    if (groups && row->sample.group >= *groups) {
      throw CsvError(path.string(), row->line,
                     "group label exceeds the configured " + std::to_string(*groups) + " groups");
    }
    max_group = std::max(max_group, row->sample.group + 1);
    p.data.push_back(std::move(row->sample));
  }
  p.groups = groups.value_or(std::max(max_group, 1));
  return p;
}

CsvSummary inspect_csv(const std::filesystem::path& path) {
  CsvSampleReader reader(path);
  CsvSummary out;
  out.d = reader.dimension();
  out.has_variance = reader.has_variance();
  double observed = 0.0;
  while (auto row = reader.next()) {
    ++out.rows;
    const auto g = static_cast<std::size_t>(row->sample.group);
    if (out.group_counts.size() <= g) out.group_counts.resize(g + 1, 0);
    ++out.group_counts[g];
    if (row->sample.observed() == 0) ++out.empty_rows;
    observed += static_cast<double>(row->sample.observed());
  }
  out.mean_observed = out.rows ? observed / static_cast<double>(out.rows) : 0.0;
  return out;
}

void write_samples_csv(std::ostream& out, std::span<const ObservedSample> samples, Index d,
                       std::span<const double> variances) {
  const bool with_variance = !variances.empty();
  if (with_variance && variances.size() != samples.size()) {
    throw std::invalid_argument("write_samples_csv: one variance per sample required");
  }
  out << "group";
  if (with_variance) out << ",variance";
  for (Index j = 1; j <= d; ++j) out << ",x" << j;
  out << '\n';
  std::vector<std::optional<double>> row(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    std::fill(row.begin(), row.end(), std::nullopt);
    for (std::size_t c = 0; c < s.omega.size(); ++c) {
      row[static_cast<std::size_t>(s.omega[c])] = s.values[static_cast<Index>(c)];
    }
    out << (s.group + 1);
    if (with_variance) out << ',' << format_double(variances[i]);
    for (const auto& x : row) {
      out << ',';
      if (x) out << format_double(*x);
    }
    out << '\n';
  }
}

}  // namespace shasta
