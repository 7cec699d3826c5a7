#include "shasta/harness.hpp"

#include "shasta/baselines.hpp"
#include "shasta/batch.hpp"
#include "shasta/checkpoint.hpp"
#include "shasta/csv.hpp"
#include "shasta/linalg.hpp"
#include "shasta/model.hpp"
#include "shasta/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>

namespace shasta {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr std::uint64_t kInitStream = 5;

bool stationary(const ScenarioScript& s) {
  for (std::size_t i = 0; i < s.epochs.size(); ++i) {
    const auto& e = s.epochs[i];
    if (e.redraw_subspace) return false;
    if (i > 0) {
      for (double f : e.variance_factors) {
        if (f != 1.0) return false;
      }
    }
  }
  return true;
}

Matrix read_reference_basis(const std::filesystem::path& path, Index d, Index k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<double> vals;
  std::string line;
  Index rows = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    Index cols = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw CsvError(path.string(), static_cast<std::size_t>(rows + 1), "not a number: " + cell);
      }
      ++cols;
    }
    if (cols != k) throw CsvError(path.string(), static_cast<std::size_t>(rows + 1), "expected k columns");
    ++rows;
  }
  if (rows != d) throw std::runtime_error(path.string() + ": expected d rows");
  Matrix basis(d, k);
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < k; ++c) basis(r, c) = vals[static_cast<std::size_t>(r * k + c)];
  }
  return orthonormal_basis(basis);
}

// Sample source for one seed. Scenario streams are regenerated for each
// estimator unless something needs the whole dataset in memory.
class SeedSource {
 public:
  SeedSource(const ExperimentConfig& cfg, std::uint64_t seed, bool materialize)
      : cfg_(cfg), seed_(seed) {
    if (const auto* ds = std::get_if<DatasetSpec>(&cfg.source)) {
      if (ds->reference_basis) {
        auto truth = std::make_shared<GroundTruth>();
        truth->u = read_reference_basis(*ds->reference_basis, cfg.dimension(), cfg.rank);
        reference_ = truth;
      }
      if (materialize) {
        auto problem = ingest_csv(ds->csv, cfg.rank, ds->groups);
        samples_ = std::move(problem.data);
      }
    } else if (materialize) {
      const auto items = run_script(std::get<ScenarioScript>(cfg.source), seed);
      samples_.emplace();
      samples_->reserve(items.size());
      for (const auto& it : items) {
        samples_->push_back(it.sample);
        truths_.push_back(it.truth);
      }
    }
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    if (samples_) {
      for (std::size_t i = 0; i < samples_->size(); ++i) {
        fn((*samples_)[i], truth_at(i));
      }
      return;
    }
    if (const auto* ds = std::get_if<DatasetSpec>(&cfg_.source)) {
      CsvSampleReader reader(ds->csv);
      while (auto row = reader.next()) {
        if (row->sample.group >= ds->groups) {
          throw CsvError(ds->csv.string(), row->line, "group label exceeds the configured groups");
        }
        fn(row->sample, reference_.get());
      }
      return;
    }
    ScenarioStream stream(std::get<ScenarioScript>(cfg_.source), seed_);
    while (auto item = stream.next()) fn(item->sample, item->truth.get());
  }

  const std::vector<ObservedSample>& samples() const { return *samples_; }
  const GroundTruth* final_truth() const {
    if (!truths_.empty()) return truths_.back().get();
    return reference_.get();
  }
  const GroundTruth* truth_at(std::size_t i) const {
    return truths_.empty() ? reference_.get() : truths_[i].get();
  }

 private:
  const ExperimentConfig& cfg_;
  std::uint64_t seed_;
  std::optional<std::vector<ObservedSample>> samples_;
  std::vector<std::shared_ptr<const GroundTruth>> truths_;
  std::shared_ptr<const GroundTruth> reference_;
};

struct Context {
  const ExperimentConfig& cfg;
  const SeedSource& source;
  std::uint64_t seed;
  Initialization init;
  std::optional<double> loglik_star;  // L(F*, v*) over the dataset
  const GroundTruth* loglik_truth = nullptr;
};

std::unique_ptr<StreamingEstimator> make_streaming(const EstimatorSpec& spec, const Context& ctx) {
  const auto& init = ctx.init;
  if (const auto* s = std::get_if<ShastaSpec>(&spec.params)) {
    ShastaConfig c;
    c.k = ctx.cfg.rank;
    c.groups = ctx.cfg.groups();
    c.weights = s->weights.schedule();
    c.c_f = s->c_f;
    c.c_v = s->c_v;
    c.delta = s->delta;
    c.variance_mode = s->variance_mode;
    const NoiseVariances v0 = init.v0.head(c.variance_slots());
    return std::make_unique<ShastaEstimator>(c, init.f0, v0);
  }
  if (const auto* p = std::get_if<PetrelsSpec>(&spec.params)) {
    return std::make_unique<PetrelsEstimator>(init.f0, p->lambda, p->delta);
  }
  const auto& g = std::get<GrouseSpec>(spec.params);
  return std::make_unique<GrouseEstimator>(init.f0, g.eta);
}

MetricRecord measure(const StreamingEstimator& est, std::uint64_t t, const GroundTruth* truth,
                     const Context& ctx) {
  MetricRecord rec;
  rec.t = t;
  if (truth) rec.subspace_error = subspace_error(est.current_subspace(), truth->u);
  const auto v = est.current_variances();
  if (v && v->size() == ctx.cfg.groups()) {
    rec.v_estimates = *v;
    if (ctx.loglik_star) {
      rec.loglik_gap =
          dataset_log_likelihood(*est.current_factors(), *v, ctx.source.samples()) - *ctx.loglik_star;
    }
  }
  return rec;
}

EstimatorRun run_streaming(const EstimatorSpec& spec, const Context& ctx) {
  EstimatorRun run{spec.label, spec.type(), ctx.seed, MetricTrace(ctx.cfg.groups()), 0.0, 0};
  auto est = make_streaming(spec, ctx);

  const GroundTruth* first_truth = nullptr;
  bool pending_initial = true;
  std::uint64_t t = 0;
  const GroundTruth* last_truth = nullptr;
  bool last_recorded = true;

  ctx.source.for_each([&](const ObservedSample& s, const GroundTruth* truth) {
    if (pending_initial) {
      first_truth = truth;
      run.trace.append(measure(*est, 0, first_truth, ctx));
      pending_initial = false;
    }
    // Homoscedastic baselines cannot use a sample with nothing observed.
    const auto start = Clock::now();
    if (s.observed() > 0 || spec.type() == "shasta") est->ingest(s);
    run.seconds += seconds_since(start);
    ++t;
    last_truth = truth;
    last_recorded = false;
    if (t % ctx.cfg.checkpoint_every == 0) {
      auto rec = measure(*est, t, truth, ctx);
      rec.elapsed_seconds = run.seconds;
      run.trace.append(std::move(rec));
      last_recorded = true;
    }
  });
  if (!last_recorded) {
    auto rec = measure(*est, t, last_truth, ctx);
    rec.elapsed_seconds = run.seconds;
    run.trace.append(std::move(rec));
  }

  if (const auto* s = std::get_if<ShastaSpec>(&spec.params); s && s->save_state &&
                                                             !ctx.cfg.output_dir.empty()) {
    const auto* sh = dynamic_cast<const ShastaEstimator*>(est.get());
    const auto dir = ctx.cfg.output_dir / spec.label;
    std::filesystem::create_directories(dir);
    save_state(sh->state(), dir / ("state_seed" + std::to_string(ctx.seed) + ".bin"));
  }
  return run;
}

EstimatorRun run_batch(const EstimatorSpec& spec, const Context& ctx) {
  const auto& b = std::get<BatchSpec>(spec.params);
  EstimatorRun run{spec.label, spec.type(), ctx.seed, MetricTrace(ctx.cfg.groups()), 0.0, 0};

  BatchProblem problem;
  problem.data = ctx.source.samples();
  problem.groups = ctx.cfg.groups();
  problem.d = ctx.cfg.dimension();
  problem.k = ctx.cfg.rank;

  const GroundTruth* truth = ctx.source.final_truth();
  double metric_seconds = 0.0;
  BatchOptions opts;
  opts.max_iters = b.iters;
  opts.rel_tol = b.rel_tol;
  const auto start = Clock::now();
  opts.on_iterate = [&](const BatchIterate& it) {
    const auto m0 = Clock::now();
    MetricRecord rec;
    rec.t = static_cast<std::uint64_t>(it.iteration);
    if (truth) rec.subspace_error = subspace_error(left_singular_vectors(it.f), truth->u);
    rec.v_estimates = it.v;
    if (ctx.loglik_star) rec.loglik_gap = it.loglik - *ctx.loglik_star;
    metric_seconds += seconds_since(m0);
    rec.elapsed_seconds = seconds_since(start) - metric_seconds;
    run.trace.append(std::move(rec));
    run.iterations = it.iteration;
  };
  // No ownership of samples needed past this call.
  batch_solve(problem, ctx.init.f0, ctx.init.v0, opts);
  run.seconds = seconds_since(start) - metric_seconds;
  return run;
}

EstimatorRun run_ppca(const EstimatorSpec& spec, const Context& ctx) {
  const auto& p = std::get<PpcaSpec>(spec.params);
  EstimatorRun run{spec.label, spec.type(), ctx.seed, MetricTrace(ctx.cfg.groups()), 0.0, 0};
  const auto& samples = ctx.source.samples();
  const Index d = ctx.cfg.dimension();

  const auto start = Clock::now();
  std::vector<const ObservedSample*> chosen;
  for (const auto& s : samples) {
    if (!p.group || s.group == *p.group) chosen.push_back(&s);
  }
  // Missing entries are zero-filled for this fully-observed method.
  Matrix data(static_cast<Index>(chosen.size()), d);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    data.row(static_cast<Index>(i)) = chosen[i]->zero_filled(d).transpose();
  }
  const auto fit = ppca_closed_form(data, ctx.cfg.rank);
  run.seconds = seconds_since(start);

  MetricRecord rec;
  rec.t = chosen.size();
  if (const auto* truth = ctx.source.final_truth()) {
    rec.subspace_error = subspace_error(left_singular_vectors(fit.f), truth->u);
  }
  NoiseVariances v = NoiseVariances::Constant(ctx.cfg.groups(), floored(fit.sigma2));
  rec.v_estimates = v;
  if (ctx.loglik_star) rec.loglik_gap = dataset_log_likelihood(fit.f, v, samples) - *ctx.loglik_star;
  rec.elapsed_seconds = run.seconds;
  run.trace.append(std::move(rec));
  return run;
}

json stats(std::vector<double> xs) {
  if (xs.empty()) return nullptr;
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  const double median = n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return {{"median", median}, {"mean", mean}, {"std", sd}, {"min", xs.front()}, {"max", xs.back()},
          {"q25", xs[(n - 1) / 4]}, {"q75", xs[(3 * (n - 1)) / 4]}};
}

std::string build_summary(const ExperimentConfig& cfg, const std::vector<EstimatorRun>& runs) {
  json doc;
  doc["name"] = cfg.name;
  doc["seeds"] = cfg.seeds;
  json ests = json::object();
  for (const auto& spec : cfg.estimators) {
    json per_seed = json::array();
    std::vector<double> errs, gaps, secs;
    for (const auto& r : runs) {
      if (r.label != spec.label || r.trace.empty()) continue;
      const auto& last = r.trace.back();
      json entry{{"seed", r.seed}, {"t", last.t}, {"seconds", r.seconds}};
      entry["subspace_error"] = last.subspace_error ? json(*last.subspace_error) : json(nullptr);
      entry["loglik_gap"] = last.loglik_gap ? json(*last.loglik_gap) : json(nullptr);
      if (last.v_estimates) {
        entry["v"] = std::vector<double>(last.v_estimates->data(),
                                         last.v_estimates->data() + last.v_estimates->size());
      }
      if (r.iterations) entry["iterations"] = r.iterations;
      if (last.subspace_error) errs.push_back(*last.subspace_error);
      if (last.loglik_gap) gaps.push_back(*last.loglik_gap);
      secs.push_back(r.seconds);
      per_seed.push_back(std::move(entry));
    }
    ests[spec.label] = {{"type", spec.type()},
                        {"per_seed", per_seed},
                        {"final_subspace_error", stats(errs)},
                        {"final_loglik_gap", stats(gaps)},
                        {"seconds", stats(secs)}};
  }
  doc["estimators"] = ests;
  return doc.dump(2);
}

}  // namespace

std::vector<const EstimatorRun*> ExperimentResult::runs_for(const std::string& label) const {
  std::vector<const EstimatorRun*> out;
  for (const auto& r : runs) {
    if (r.label == label) out.push_back(&r);
  }
  return out;
}

Initialization draw_initialization(std::uint64_t seed, Index d, Index k, int groups) {
  Rng rng = Rng(seed).split(kInitStream);
  Initialization init;
  init.f0.resize(d, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < d; ++r) init.f0(r, c) = scale * rng.normal();
  }
  init.v0.resize(groups);
  for (int l = 0; l < groups; ++l) init.v0[l] = floored(rng.uniform());
  return init;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  bool needs_all = cfg.loglik;
  for (const auto& e : cfg.estimators) needs_all = needs_all || !e.streaming();
  if (cfg.loglik) {
    const auto* script = std::get_if<ScenarioScript>(&cfg.source);
    if (!script) throw ConfigError("loglik", "needs a synthetic scenario with known parameters");
    if (!stationary(*script)) throw ConfigError("loglik", "needs a stationary scenario");
  }

  ExperimentResult result;
  result.name = cfg.name;
  const Index d = cfg.dimension();
  for (const auto seed : cfg.seeds) {
    SeedSource source(cfg, seed, needs_all);
    Context ctx{cfg, source, seed, draw_initialization(seed, d, cfg.rank, cfg.groups()), {}, nullptr};
    if (cfg.loglik) {
      ctx.loglik_truth = source.final_truth();
      ctx.loglik_star = dataset_log_likelihood(ctx.loglik_truth->f_star, ctx.loglik_truth->v_star,
                                               source.samples());
    }
    for (const auto& spec : cfg.estimators) {
      if (spec.streaming()) {
        result.runs.push_back(run_streaming(spec, ctx));
      } else if (std::holds_alternative<BatchSpec>(spec.params)) {
        result.runs.push_back(run_batch(spec, ctx));
      } else {
        result.runs.push_back(run_ppca(spec, ctx));
      }
    }
  }
  result.summary_json = build_summary(cfg, result.runs);

  if (opts.write_files) {
    std::filesystem::create_directories(cfg.output_dir);
    for (const auto& r : result.runs) {
      const auto dir = cfg.output_dir / r.label;
      std::filesystem::create_directories(dir);
      r.trace.write_csv((dir / ("trace_seed" + std::to_string(r.seed) + ".csv")).string());
    }
    const auto path = cfg.output_dir / "summary.json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << result.summary_json << '\n';
  }
  return result;
}

TimingResult timing_run(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  cfg.loglik = true;
  TimingResult out;
  for (const auto& e : cfg.estimators) {
    if (std::holds_alternative<BatchSpec>(e.params)) {
      if (!out.batch_label.empty()) throw ConfigError("estimators", "timing needs exactly one batch_mm");
      out.batch_label = e.label;
    } else if (e.streaming()) {
      if (!out.stream_label.empty()) throw ConfigError("estimators", "timing allows one streaming estimator");
      out.stream_label = e.label;
    } else {
      throw ConfigError("estimators", "timing supports one streaming and one batch_mm estimator");
    }
  }
  if (out.batch_label.empty()) throw ConfigError("estimators", "timing needs a batch_mm estimator");

  out.experiment = run_experiment(cfg, opts);
  const auto batch_runs = out.experiment.runs_for(out.batch_label);
  const auto stream_runs = out.experiment.runs_for(out.stream_label);
  for (std::size_t i = 0; i < batch_runs.size(); ++i) {
    const auto& b = *batch_runs[i];
    TimingRow row;
    row.seed = b.seed;
    row.initial_gap = *b.trace.records().front().loglik_gap;
    row.batch_final_gap = *b.trace.back().loglik_gap;
    row.batch_seconds = b.seconds;
    row.batch_iterations = b.iterations;
    if (!out.stream_label.empty()) {
      const auto& s = *stream_runs[i];
      if (s.trace.back().loglik_gap) {
        row.stream_final_gap = *s.trace.back().loglik_gap;
        const double target =
            row.batch_final_gap - 0.05 * std::abs(row.batch_final_gap - row.initial_gap);
        for (const auto& rec : s.trace.records()) {
          if (rec.loglik_gap && *rec.loglik_gap >= target) {
            row.stream_seconds_to_target = rec.elapsed_seconds;
            break;
          }
        }
      }
      row.stream_seconds = s.seconds;
    }
    out.rows.push_back(row);
  }
  if (opts.write_files) {
    std::ofstream f(cfg.output_dir / "timing.json");
    f << out.to_json() << '\n';
  }
  return out;
}

std::string TimingResult::table() const {
  std::ostringstream os;
  os << std::left << std::setw(8) << "seed" << std::setw(16) << "initial_gap" << std::setw(16)
     << "batch_gap" << std::setw(8) << "iters" << std::setw(12) << "batch_s";
  if (!stream_label.empty()) {
    os << std::setw(16) << "stream_gap" << std::setw(12) << "stream_s" << "stream_s_to_target";
  }
  os << '\n';
  os << std::setprecision(6);
  for (const auto& r : rows) {
    os << std::setw(8) << r.seed << std::setw(16) << r.initial_gap << std::setw(16) << r.batch_final_gap
       << std::setw(8) << r.batch_iterations << std::setw(12) << r.batch_seconds;
    if (!stream_label.empty()) {
      os << std::setw(16) << r.stream_final_gap.value_or(NAN) << std::setw(12)
         << r.stream_seconds.value_or(NAN);
      if (r.stream_seconds_to_target) {
        os << *r.stream_seconds_to_target;
      } else {
        os << "not reached";
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string TimingResult::to_json() const {
  json rows_json = json::array();
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  for (const auto& r : rows) {
    rows_json.push_back({{"seed", r.seed},
                         {"initial_gap", r.initial_gap},
                         {"batch_final_gap", r.batch_final_gap},
                         {"batch_seconds", r.batch_seconds},
                         {"batch_iterations", r.batch_iterations},
                         {"stream_final_gap", opt(r.stream_final_gap)},
                         {"stream_seconds", opt(r.stream_seconds)},
                         {"stream_seconds_to_target", opt(r.stream_seconds_to_target)}});
  }
  return json{{"stream", stream_label}, {"batch", batch_label}, {"rows", rows_json}}.dump(2);
}

}  // namespace shasta
