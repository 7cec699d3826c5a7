#include "shasta/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace shasta;

namespace {

const char* kMinimal = R"({
  "name": "t",
  "rank": 2,
  "seeds": {"first": 3, "count": 2},
  "scenario": {"d": 8, "lambda": [2, 1], "v_star": [0.1, 0.2], "group_probs": [0.5, 0.5],
               "epochs": [{"samples": 100}]},
  "estimators": [{"type": "shasta", "weights": {"kind": "constant", "value": 0.05}},
                 {"type": "petrels", "lambda": 0.99},
                 {"type": "ppca", "group": 2}]
})";

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Config, ParsesMinimal) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(cfg.groups(), 2);
  EXPECT_EQ(cfg.dimension(), 8);
  EXPECT_EQ(cfg.output_dir, std::filesystem::path("runs/t"));
  ASSERT_EQ(cfg.estimators.size(), 3u);
  EXPECT_EQ(cfg.estimators[0].type(), "shasta");
  EXPECT_DOUBLE_EQ(std::get<ShastaSpec>(cfg.estimators[0].params).weights.schedule()(7), 0.05);
  EXPECT_DOUBLE_EQ(std::get<PetrelsSpec>(cfg.estimators[1].params).lambda, 0.99);
  EXPECT_EQ(*std::get<PpcaSpec>(cfg.estimators[2].params).group, 1);
  EXPECT_EQ(cfg.checkpoint_every, 100u);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(error_path(replace(kMinimal, "\"lambda\": 0.99", "\"lambda\": 1.5")), "estimators[1].lambda");
  EXPECT_EQ(error_path(replace(kMinimal, "\"rank\": 2", "\"rank\": 0")), "rank");
  EXPECT_EQ(error_path(replace(kMinimal, "\"lambda\": [2, 1]", "\"lambda\": [2]")), "scenario.lambda");
  EXPECT_EQ(error_path(replace(kMinimal, "\"samples\": 100", "\"samples\": 100, \"bogus\": 1")),
            "scenario.epochs[0].bogus");
  EXPECT_EQ(error_path(replace(kMinimal, "\"group\": 2", "\"group\": 3")), "estimators[2].group");
  EXPECT_EQ(error_path(replace(kMinimal, "\"type\": \"petrels\"", "\"type\": \"oja\"")), "estimators[1].type");
  EXPECT_EQ(error_path(replace(kMinimal, "\"kind\": \"constant\"", "\"kind\": \"linear\"")),
            "estimators[0].weights.kind");
  EXPECT_EQ(error_path("{"), "");
}

TEST(Config, DatasetPathsMustExist) {
  const std::string text = R"({"rank": 1, "seeds": [1], "dataset": {"csv": "missing.csv", "groups": 1},
                               "estimators": [{"type": "grouse"}]})";
  EXPECT_EQ(error_path(text), "dataset.csv");
}

TEST(Config, BundledConfigsLoad) {
  const std::filesystem::path dir = SHASTA_SOURCE_DIR "/configs";
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 7);
  const auto full = load_config(dir / "static_full.json");
  EXPECT_EQ(full.seeds.size(), 50u);
  EXPECT_EQ(full.dimension(), 100);
  const auto dyn = load_config(dir / "dynamic_subspace.json");
  EXPECT_EQ(std::get<ScenarioScript>(dyn.source).total_samples(), 20000u);
}
