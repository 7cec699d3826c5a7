#include "shasta/checkpoint.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

using namespace shasta;
using namespace shasta::testing;

namespace {

ShastaConfig config() {
  ShastaConfig c;
  c.k = 3;
  c.groups = 2;
  return c;
}

std::vector<ObservedSample> stream(Rng& rng, int n) {
  std::vector<ObservedSample> out;
  for (int i = 0; i < n; ++i) out.push_back(random_sample(rng, 11, 2, 0.6));
  return out;
}

}  // namespace

TEST(Checkpoint, RoundTripIsExact) {
  Rng rng(71);
  const auto cfg = config();
  auto st = init_state(cfg, gaussian(rng, 11, 3), positive(rng, 2, 0.1, 1.0));
  for (const auto& s : stream(rng, 25)) ingest(st, s, cfg);
  const auto bytes = serialize_state(st);
  EXPECT_EQ(bytes.size(), checkpoint_size(11, 3, 2));
  EXPECT_EQ(std::memcmp(bytes.data(), kCheckpointMagic, 8), 0);
  EXPECT_TRUE(deserialize_state(bytes) == st);
}

TEST(Checkpoint, ResumedRunMatchesUninterrupted) {
  Rng rng(72);
  const auto cfg = config();
  const Matrix f0 = gaussian(rng, 11, 3);
  const Vector v0 = positive(rng, 2, 0.1, 1.0);
  const auto data = stream(rng, 60);

  auto full = init_state(cfg, f0, v0);
  for (const auto& s : data) ingest(full, s, cfg);

  auto first = init_state(cfg, f0, v0);
  for (int i = 0; i < 30; ++i) ingest(first, data[i], cfg);
  const auto path = std::filesystem::temp_directory_path() / "shasta_resume.bin";
  save_state(first, path);
  auto resumed = load_state(path);
  for (int i = 30; i < 60; ++i) ingest(resumed, data[i], cfg);
  EXPECT_TRUE(resumed == full);
  std::filesystem::remove(path);
}

TEST(Checkpoint, CorruptInputRejected) {
  Rng rng(73);
  const auto st = init_state(config(), gaussian(rng, 11, 3), positive(rng, 2, 0.1, 1.0));
  auto bytes = serialize_state(st);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_state(bad_magic), std::runtime_error);
  EXPECT_THROW(deserialize_state(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
  EXPECT_THROW(deserialize_state(bytes + "x"), std::runtime_error);
  EXPECT_THROW(load_state("/nonexistent/state.bin"), std::runtime_error);
}

TEST(Checkpoint, JsonView) {
  Rng rng(74);
  const auto st = init_state(config(), gaussian(rng, 11, 3), positive(rng, 2, 0.1, 1.0));
  const auto brief = state_to_json(st, false);
  const auto full = state_to_json(st, true);
  EXPECT_NE(brief.find("\"d\""), std::string::npos);
  EXPECT_LT(brief.size(), full.size());
  EXPECT_NE(full.find("r_bar"), std::string::npos);
}
