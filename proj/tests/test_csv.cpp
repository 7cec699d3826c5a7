#include "shasta/csv.hpp"
#include "shasta/datagen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shasta;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& contents) {
  const auto dir = fs::temp_directory_path() / "shasta_csv_test";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << contents;
  return path;
}

long resident_kb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmRSS:", 0) == 0) return std::stol(line.substr(6));
  }
  return -1;
}

}  // namespace

TEST(Csv, DenseAndMissingCells) {
  const auto path = temp_file("basic.csv",
                              "a,group,b,c\n"
                              "1.5,1,2,3\n"
                              ",2,,-4e-3\n"
                              ",1,,\n");
  CsvSampleReader reader(path);
  EXPECT_EQ(reader.dimension(), 3);
  EXPECT_FALSE(reader.has_variance());
  auto r1 = reader.next();
  ASSERT_TRUE(r1);
  EXPECT_EQ(r1->sample.omega, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(r1->sample.values, (Vector{{1.5, 2.0, 3.0}}));
  EXPECT_EQ(r1->sample.group, 0);
  auto r2 = reader.next();
  EXPECT_EQ(r2->sample.omega, (std::vector<Index>{2}));
  EXPECT_EQ(r2->sample.values[0], -4e-3);
  EXPECT_EQ(r2->sample.group, 1);
  auto r3 = reader.next();
  EXPECT_EQ(r3->sample.observed(), 0);
  EXPECT_EQ(r3->line, 4u);
  EXPECT_FALSE(reader.next());
}

TEST(Csv, EveryOtherCellEmpty) {
  std::ostringstream os;
  os << "group";
  for (int j = 0; j < 20; ++j) os << ",x" << j;
  os << "\n";
  for (int i = 0; i < 5; ++i) {
    os << "1";
    for (int j = 0; j < 20; ++j) os << "," << (j % 2 ? "" : "0.5");
    os << "\n";
  }
  const auto summary = inspect_csv(temp_file("half.csv", os.str()));
  EXPECT_EQ(summary.rows, 5u);
  EXPECT_EQ(summary.d, 20);
  EXPECT_DOUBLE_EQ(summary.mean_observed, 10.0);
}

TEST(Csv, MalformedRowsReportLineNumbers) {
  auto expect_line = [](const std::string& name, const std::string& text, std::size_t line) {
    try {
      CsvSampleReader reader(temp_file(name, text));
      while (reader.next()) {
      }
      FAIL() << "no error for " << name;
    } catch (const CsvError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("short.csv", "group,a,b\n1,2,3\n1,2\n", 3);
  expect_line("nan.csv", "group,a\n1,2\n1,abc\n", 3);
  expect_line("label.csv", "group,a\n0,2\n", 2);
  expect_line("nogroup.csv", "a,b\n1,2\n", 1);
}

TEST(Csv, VarianceColumnAndGroups) {
  const auto path = temp_file("var.csv", "group,variance,a\n3,0.5,1\n1,0.25,\n");
  CsvSampleReader reader(path);
  EXPECT_TRUE(reader.has_variance());
  EXPECT_EQ(reader.dimension(), 1);
  EXPECT_EQ(*reader.next()->variance, 0.5);
  const auto p = ingest_csv(path, 1);
  EXPECT_EQ(p.groups, 3);
  EXPECT_EQ(p.data.size(), 2u);
  EXPECT_THROW(ingest_csv(path, 1, 2), CsvError);
}

TEST(Csv, GeneratedStreamRoundTrips) {
  ScenarioScript script;
  script.d = 15;
  script.k = 2;
  script.lambda = Vector{{2.0, 1.0}};
  script.v_star = Vector{{0.01, 0.1, 1.0}};
  script.group_law = GroupProbabilities{{0.2, 0.3, 0.5}};
  script.epochs = {Epoch{300, 0.4, false, {}}};
  std::vector<ObservedSample> samples;
  for (const auto& it : run_script(script, 77)) samples.push_back(it.sample);

  std::ostringstream os;
  write_samples_csv(os, samples, 15);
  const auto p = ingest_csv(temp_file("roundtrip.csv", os.str()), 2, 3);
  ASSERT_EQ(p.data.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(p.data[i], samples[i]) << "row " << i;
}

TEST(Csv, StreamingMemoryIsBounded) {
  const auto dir = fs::temp_directory_path() / "shasta_csv_test";
  fs::create_directories(dir);
  const auto path = dir / "million.csv";
  {
    std::ofstream out(path);
    out << "group,a,b,c,d\n";
    for (int i = 0; i < 1000000; ++i) out << (i % 2 + 1) << ",0.25,," << i << ",-1.5\n";
  }
  CsvSampleReader reader(path);
  std::size_t rows = 0;
  double checksum = 0.0;
  long early = 0;
  while (auto row = reader.next()) {
    checksum += row->sample.values[1];
    if (++rows == 1000) early = resident_kb();
  }
  const long late = resident_kb();
  EXPECT_EQ(rows, 1000000u);
  EXPECT_DOUBLE_EQ(checksum, 999999.0 * 1000000.0 / 2.0);
  // The file is ~20 MB; streaming must not hold it.
  EXPECT_LT(late - early, 2048) << "resident set grew from " << early << " kB to " << late << " kB";
  fs::remove(path);
}
