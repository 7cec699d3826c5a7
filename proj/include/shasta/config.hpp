#pragma once

// Declarative experiment configuration (JSON). See docs/config.md.

#include "shasta/datagen.hpp"
#include "shasta/shasta.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace shasta {

/// Invalid configuration; `path()` names the offending field, e.g.
/// "estimators[1].lambda".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct WeightSpec {
  enum class Kind { kInverseT, kConstant, kInverseSqrt } kind = Kind::kInverseT;
  double value = 1.0;  // w for constant, scale for inverse_sqrt

  WeightSchedule schedule() const;
};

struct ShastaSpec {
  WeightSpec weights;
  double c_f = 0.1;
  double c_v = 0.1;
  double delta = 0.1;
  VarianceMode variance_mode = VarianceMode::kGrouped;
  bool save_state = false;
};

struct PetrelsSpec {
  double lambda = 1.0;
  double delta = 0.1;
};

struct GrouseSpec {
  double eta = 0.01;
};

struct BatchSpec {
  int iters = 100;
  std::optional<double> rel_tol;
};

/// Closed-form PPCA on zero-filled data, optionally restricted to one group.
struct PpcaSpec {
  std::optional<int> group;  // 0-based
};

struct EstimatorSpec {
  std::string label;
  std::variant<ShastaSpec, PetrelsSpec, GrouseSpec, BatchSpec, PpcaSpec> params;

  bool streaming() const { return params.index() <= 2; }
  std::string type() const;
};

struct DatasetSpec {
  std::filesystem::path csv;
  int groups = 1;
  std::optional<std::filesystem::path> reference_basis;
};

struct ExperimentConfig {
  std::string name;
  Index rank = 1;
  std::vector<std::uint64_t> seeds;
  std::size_t checkpoint_every = 100;
  bool loglik = false;
  std::filesystem::path output_dir;
  std::variant<ScenarioScript, DatasetSpec> source;
  std::vector<EstimatorSpec> estimators;

  int groups() const;
  Index dimension() const;  // reads the CSV header for datasets
};

/// Parses and validates a config; relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace shasta
