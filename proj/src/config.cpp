#include "shasta/config.hpp"

#include "shasta/csv.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace shasta {

using nlohmann::json;

namespace {

// A json node paired with its location in the document, for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Node at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) throw ConfigError(child(key), "required field is missing");
    return {j_.at(key), child(key)};
  }

  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }

  std::int64_t integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<std::int64_t>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).number());
    return out;
  }

  void only(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail("expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : j_.items()) {
      if (!allowed.count(k)) throw ConfigError(child(k.c_str()), "unknown field");
    }
  }

 private:
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

double positive(const Node& n) {
  const double x = n.number();
  if (!(x > 0.0)) n.fail("must be positive");
  return x;
}

double unit_interval(const Node& n) {
  const double x = n.number();
  if (!(x > 0.0 && x <= 1.0)) n.fail("must lie in (0, 1]");
  return x;
}

std::int64_t at_least(const Node& n, std::int64_t lo) {
  const auto x = n.integer();
  if (x < lo) n.fail("must be >= " + std::to_string(lo));
  return x;
}

Vector to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Index>(xs.size()));
}

WeightSpec parse_weights(const Node& n) {
  n.only({"kind", "value"});
  WeightSpec w;
  const auto kind = n.at("kind").string();
  if (kind == "inverse_t") {
    w.kind = WeightSpec::Kind::kInverseT;
  } else if (kind == "constant") {
    w.kind = WeightSpec::Kind::kConstant;
    w.value = unit_interval(n.at("value"));
  } else if (kind == "inverse_sqrt") {
    w.kind = WeightSpec::Kind::kInverseSqrt;
    w.value = positive(n.at("value"));
  } else {
    n.at("kind").fail("expected inverse_t, constant or inverse_sqrt");
  }
  return w;
}

EstimatorSpec parse_estimator(const Node& n, int groups) {
  EstimatorSpec e;
  const auto type = n.at("type").string();
  e.label = n.has("label") ? n.at("label").string() : type;
  if (e.label.empty() || e.label.find_first_of("/\\") != std::string::npos || e.label[0] == '.') {
    n.at("label").fail("must be a plain, non-empty name");
  }
  if (type == "shasta") {
    n.only({"type", "label", "weights", "c_f", "c_v", "delta", "variance_mode", "save_state"});
    ShastaSpec s;
    if (n.has("weights")) s.weights = parse_weights(n.at("weights"));
    if (n.has("c_f")) s.c_f = unit_interval(n.at("c_f"));
    if (n.has("c_v")) s.c_v = unit_interval(n.at("c_v"));
    if (n.has("delta")) s.delta = positive(n.at("delta"));
    if (n.has("variance_mode")) {
      const auto mode = n.at("variance_mode").string();
      if (mode == "grouped") {
        s.variance_mode = VarianceMode::kGrouped;
      } else if (mode == "memoryless_single") {
        s.variance_mode = VarianceMode::kMemorylessSingle;
      } else {
        n.at("variance_mode").fail("expected grouped or memoryless_single");
      }
    }
    if (n.has("save_state")) s.save_state = n.at("save_state").boolean();
    e.params = s;
  } else if (type == "petrels") {
    n.only({"type", "label", "lambda", "delta"});
    PetrelsSpec s;
    if (n.has("lambda")) s.lambda = unit_interval(n.at("lambda"));
    if (n.has("delta")) s.delta = positive(n.at("delta"));
    e.params = s;
  } else if (type == "grouse") {
    n.only({"type", "label", "eta"});
    GrouseSpec s;
    if (n.has("eta")) {
      s.eta = n.at("eta").number();
      if (!(s.eta >= 0.0)) n.at("eta").fail("must be non-negative");
    }
    e.params = s;
  } else if (type == "batch_mm") {
    n.only({"type", "label", "iters", "rel_tol"});
    BatchSpec s;
    if (n.has("iters")) s.iters = static_cast<int>(at_least(n.at("iters"), 1));
    if (n.has("rel_tol")) s.rel_tol = positive(n.at("rel_tol"));
    e.params = s;
  } else if (type == "ppca") {
    n.only({"type", "label", "group"});
    PpcaSpec s;
    if (n.has("group")) {
      const auto g = at_least(n.at("group"), 1);
      if (g > groups) n.at("group").fail("exceeds the number of groups");
      s.group = static_cast<int>(g - 1);
    }
    e.params = s;
  } else {
    n.at("type").fail("expected shasta, petrels, grouse, batch_mm or ppca");
  }
  return e;
}

ScenarioScript parse_scenario(const Node& n, Index rank) {
  n.only({"d", "lambda", "v_star", "group_counts", "group_probs", "epochs"});
  ScenarioScript s;
  s.d = at_least(n.at("d"), 1);
  s.k = rank;
  if (rank > s.d) n.at("d").fail("must be at least the rank");
  s.lambda = to_vector(n.at("lambda").numbers());
  if (s.lambda.size() != rank) n.at("lambda").fail("needs one entry per rank");
  for (Index i = 0; i < rank; ++i) {
    if (!(s.lambda[i] > 0.0)) n.at("lambda").at(static_cast<std::size_t>(i)).fail("must be positive");
    if (i > 0 && s.lambda[i] > s.lambda[i - 1]) n.at("lambda").fail("must be sorted descending");
  }
  const auto vs = n.at("v_star");
  s.v_star = to_vector(vs.numbers());
  if (s.v_star.size() < 1) vs.fail("needs at least one group");
  for (std::size_t i = 0; i < vs.size(); ++i) positive(vs.at(i));

  const bool counts = n.has("group_counts");
  const bool probs = n.has("group_probs");
  if (counts == probs) n.fail("exactly one of group_counts or group_probs is required");
  if (counts) {
    const auto c = n.at("group_counts");
    GroupCounts law;
    for (std::size_t i = 0; i < c.size(); ++i) {
      law.counts.push_back(static_cast<std::size_t>(at_least(c.at(i), 0)));
    }
    if (static_cast<Index>(law.counts.size()) != s.v_star.size()) c.fail("needs one entry per group");
    s.group_law = law;
  } else {
    const auto p = n.at("group_probs");
    GroupProbabilities law{p.numbers()};
    if (static_cast<Index>(law.probs.size()) != s.v_star.size()) p.fail("needs one entry per group");
    double sum = 0.0;
    for (std::size_t i = 0; i < law.probs.size(); ++i) {
      if (law.probs[i] < 0.0) p.at(i).fail("must be non-negative");
      sum += law.probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) p.fail("must sum to 1");
    s.group_law = law;
  }

  const auto epochs = n.at("epochs");
  if (epochs.size() == 0) epochs.fail("needs at least one epoch");
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto e = epochs.at(i);
    e.only({"samples", "p_observe", "redraw_subspace", "variance_factors"});
    Epoch ep;
    ep.samples = static_cast<std::size_t>(at_least(e.at("samples"), 1));
    if (e.has("p_observe")) ep.p_observe = unit_interval(e.at("p_observe"));
    if (e.has("redraw_subspace")) ep.redraw_subspace = e.at("redraw_subspace").boolean();
    if (e.has("variance_factors")) {
      const auto vf = e.at("variance_factors");
      ep.variance_factors = vf.numbers();
      if (static_cast<Index>(ep.variance_factors.size()) != s.v_star.size()) {
        vf.fail("needs one entry per group");
      }
      for (std::size_t g = 0; g < vf.size(); ++g) positive(vf.at(g));
    }
    s.epochs.push_back(std::move(ep));
  }
  if (const auto* c = std::get_if<GroupCounts>(&s.group_law)) {
    std::size_t total = 0;
    for (auto x : c->counts) total += x;
    if (total != s.total_samples()) n.at("group_counts").fail("must add up to the epochs' sample count");
  }
  return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

WeightSchedule WeightSpec::schedule() const {
  switch (kind) {
    case Kind::kConstant:
      return WeightSchedule::constant(value);
    case Kind::kInverseSqrt:
      return WeightSchedule::inverse_sqrt(value);
    case Kind::kInverseT:
      break;
  }
  return WeightSchedule::inverse_t();
}

std::string EstimatorSpec::type() const {
  static const char* names[] = {"shasta", "petrels", "grouse", "batch_mm", "ppca"};
  return names[params.index()];
}

int ExperimentConfig::groups() const {
  if (const auto* s = std::get_if<ScenarioScript>(&source)) return s->groups();
  return std::get<DatasetSpec>(source).groups;
}

Index ExperimentConfig::dimension() const {
  if (const auto* s = std::get_if<ScenarioScript>(&source)) return s->d;
  return CsvSampleReader(std::get<DatasetSpec>(source).csv).dimension();
}

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.only({"name", "rank", "seeds", "checkpoint_every", "loglik", "output_dir", "scenario",
             "dataset", "estimators"});

  ExperimentConfig cfg;
  cfg.name = root.has("name") ? root.at("name").string() : "experiment";
  cfg.rank = at_least(root.at("rank"), 1);

  const auto seeds = root.at("seeds");
  if (seeds.raw().is_array()) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(at_least(seeds.at(i), 0)));
    }
  } else {
    seeds.only({"first", "count"});
    const auto first = at_least(seeds.at("first"), 0);
    const auto count = at_least(seeds.at("count"), 1);
    for (std::int64_t i = 0; i < count; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(first + i));
  }
  if (cfg.seeds.empty()) seeds.fail("needs at least one seed");

  if (root.has("checkpoint_every")) {
    cfg.checkpoint_every = static_cast<std::size_t>(at_least(root.at("checkpoint_every"), 1));
  }
  if (root.has("loglik")) cfg.loglik = root.at("loglik").boolean();
  // Output paths are relative to the working directory, not the config file.
  cfg.output_dir = root.has("output_dir") ? root.at("output_dir").string() : "runs/" + cfg.name;

  const bool scenario = root.has("scenario");
  const bool dataset = root.has("dataset");
  if (scenario == dataset) root.fail("exactly one of scenario or dataset is required");
  if (scenario) {
    cfg.source = parse_scenario(root.at("scenario"), cfg.rank);
  } else {
    const auto ds = root.at("dataset");
    ds.only({"csv", "groups", "reference_basis"});
    DatasetSpec spec;
    spec.csv = resolve(base_dir, ds.at("csv").string());
    if (!std::filesystem::exists(spec.csv)) ds.at("csv").fail("file does not exist: " + spec.csv.string());
    spec.groups = static_cast<int>(at_least(ds.at("groups"), 1));
    if (ds.has("reference_basis")) {
      spec.reference_basis = resolve(base_dir, ds.at("reference_basis").string());
      if (!std::filesystem::exists(*spec.reference_basis)) {
        ds.at("reference_basis").fail("file does not exist: " + spec.reference_basis->string());
      }
    }
    cfg.source = spec;
  }

  const auto ests = root.at("estimators");
  if (ests.size() == 0) ests.fail("needs at least one estimator");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < ests.size(); ++i) {
    auto e = parse_estimator(ests.at(i), cfg.groups());
    if (!labels.insert(e.label).second) ests.at(i).fail("duplicate estimator label " + e.label);
    cfg.estimators.push_back(std::move(e));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace shasta
