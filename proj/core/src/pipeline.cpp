#include "signbias/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/log.hpp"
#include "signbias/parallel.hpp"
#include "signbias/pose_metrics.hpp"

namespace signbias {

namespace {

RunLayout layout(const RunConfig& cfg) { return RunLayout{cfg.out}; }

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

ScorerConfig effective_scorer(const RunConfig& cfg) {
  ScorerConfig scorer = cfg.scorer;
  if (scorer.mode == ScorerMode::external) {
    if (cfg.external_scores.empty()) {
      throw UsageError("quality.mode = \"external\" needs quality.external_scores");
    }
    scorer.external = read_quality_table(cfg.external_scores);
  }
  return scorer;
}

std::string fmt_acc(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const GroupRow* find_row(const GroupReport& g, const std::string& value) {
  for (const auto& r : g.rows) {
    if (r.value == value) return &r;
  }
  return nullptr;
}

std::vector<std::string> expand_strategies(const RunConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& s : cfg.experiment.strategies) {
    if (s == "group_subset") {
      for (const auto& v : cfg.experiment.subset_values) out.push_back("group_subset_" + v);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace

GenerationResult run_synth(const RunConfig& cfg) {
  RunConfig c = cfg;
  derive_component_seeds(c);
  return generate(c.generator, c.dataset_dir(), c.threads, provenance_line(cfg));
}

FeaturesOutcome run_features(const RunConfig& cfg, bool force) {
  const auto dir = cfg.dataset_dir();
  const auto out = layout(cfg);
  ensure_dir(out.root);
  const std::string prov = provenance_line(cfg);
  Dataset tables = load_dataset_dir(dir, {false, cfg.threads});
  const auto& videos = tables.videos();
  FeaturesOutcome result;
  result.videos = videos.size();

  FeatureTable have;
  if (!force && std::filesystem::exists(out.features())) {
    for (auto& row : read_trajectory_features(out.features())) have.emplace(row.video_id, std::move(row));
  }
  const bool need_trajectories =
      std::any_of(videos.begin(), videos.end(), [&](const VideoRecord& v) { return !have.count(v.video_id); });
  if (need_trajectories) {
    const Dataset full = load_dataset_dir(dir, {true, cfg.threads});
    auto summary = compute_trajectory_features(full, cfg.threads);
    for (auto& row : summary.rows) {
      if (have.emplace(row.video_id, row).second) ++result.trajectory_computed;
    }
  }
  std::vector<TrajectoryFeatureRow> rows;
  for (const auto& v : videos) {
    const auto& row = have.at(v.video_id);
    if (!row.seed_div_rh) ++result.missing_seed;
    if (!row.speed_rh) ++result.too_short_for_speed;
    rows.push_back(row);
  }
  write_trajectory_features(out.features(), rows, prov);
  if (result.missing_seed > 0) {
    log_warning(std::to_string(result.missing_seed) + " video(s) have no seed-signer reference; divergence left empty");
  }

  if (cfg.quality_features) {
    const ScorerConfig scorer = effective_scorer(cfg);
    QualityTable qhave;
    if (!force && std::filesystem::exists(out.quality())) qhave = read_quality_table(out.quality());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < videos.size(); ++i) {
      if (!qhave.count(videos[i].video_id)) todo.push_back(i);
    }
    std::vector<QualityScore> computed(todo.size());
    parallel_for(todo.size(), cfg.threads, [&](std::size_t k) {
      const auto& v = videos[todo[k]];
      std::vector<GrayImage> frames;
      if (scorer.mode == ScorerMode::linear) {
        frames = read_pgm_frames(dir / DatasetLayout::kFrames / (v.video_id + ".pgm"));
      }
      computed[k] = video_quality(v.video_id, frames, scorer);
    });
    for (const auto& s : computed) qhave[s.video_id] = s.brisque_like;
    result.quality_computed = computed.size();
    std::vector<QualityScore> scores;
    for (const auto& v : videos) scores.push_back({v.video_id, qhave.at(v.video_id)});
    write_quality_table(out.quality(), scores, prov);
  }
  return result;
}

PreparedData prepare_data(const RunConfig& cfg) {
  const auto out = layout(cfg);
  PreparedData d;
  d.dataset = load_dataset_dir(cfg.dataset_dir(), {true, cfg.threads});
  std::map<std::string, int, std::less<>> label_index;
  for (const auto& s : d.dataset.signs()) {
    label_index.emplace(s.gloss_id, static_cast<int>(d.labels.size()));
    d.labels.push_back(s.gloss_id);
  }
  const auto& videos = d.dataset.videos();
  d.label_of.resize(videos.size());
  for (std::size_t i = 0; i < videos.size(); ++i) d.label_of[i] = label_index.at(videos[i].gloss_id);
  d.features.resize(videos.size());
  parallel_for(videos.size(), cfg.threads, [&](std::size_t i) {
    d.features[i] = featurize(normalize_pose(d.dataset.pose(i)), cfg.train.frame_cap);
  });
  if (std::filesystem::exists(out.features())) {
    for (auto& row : read_trajectory_features(out.features())) d.trajectory.emplace(row.video_id, std::move(row));
  }
  if (std::filesystem::exists(out.quality())) d.quality = read_quality_table(out.quality());
  return d;
}

TrainOutcome run_train(const RunConfig& cfg_in, const std::string& strategy, const PreparedData& data) {
  RunConfig cfg = cfg_in;
  derive_component_seeds(cfg);
  const auto& dataset = data.dataset;
  const auto& videos = dataset.videos();

  const bool subset = strategy == "group_subset" || strategy.starts_with("group_subset_");
  std::string group_value = cfg.sampler.group_value;
  if (strategy.starts_with("group_subset_")) group_value = strategy.substr(std::string("group_subset_").size());
  const Strategy sampling = subset ? Strategy::uniform : parse_strategy(strategy);

  TrainOutcome outcome;
  outcome.label = subset ? "group_subset_" + group_value : std::string(to_string(sampling));

  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    if (videos[i].split == Split::train) {
      if (subset) {
        const auto v = attribute_value(dataset, videos[i], cfg.sampler.group_attribute);
        if (!v || *v != group_value) continue;
      }
      train_idx.push_back(i);
    }
    if (videos[i].split == cfg.audit.split) test_idx.push_back(i);
  }
  if (train_idx.empty()) throw UsageError("strategy '" + strategy + "' selects no training videos");
  if (test_idx.empty()) throw UsageError("no videos in the " + std::string(to_string(cfg.audit.split)) + " split");

  WeightInputs inputs;
  const bool needs_z = sampling == Strategy::video_length || sampling == Strategy::video_length_group_restricted;
  const bool needs_q = sampling == Strategy::quality_high || sampling == Strategy::quality_low;
  for (auto i : train_idx) {
    const auto& id = videos[i].video_id;
    inputs.video_ids.push_back(id);
    if (needs_z) {
      auto it = data.trajectory.find(id);
      if (it == data.trajectory.end()) throw UsageError("no length z-score for '" + id + "'; run `features` first");
      inputs.length_z.push_back(it->second.length_z);
    }
    if (needs_q) {
      auto it = data.quality.find(id);
      if (it == data.quality.end()) throw UsageError("no quality score for '" + id + "'; run `features` first");
      inputs.quality.push_back(it->second);
    }
  }
  auto weights = strategy_weights(sampling, inputs);
  if (sampling == Strategy::video_length_group_restricted) {
    weights = restrict_weights_to_group(weights, dataset, cfg.sampler.group_attribute, cfg.sampler.group_value);
  }

  SamplerPlan plan;
  plan.weights = weights;
  plan.epoch_size = cfg.sampler.epoch_size;
  plan.rng_seed = derive_seed(cfg.seed, "sampler");
  plan.strategy = sampling;

  std::vector<FeatureVector> feats;
  std::vector<int> labels;
  for (auto i : train_idx) {
    feats.push_back(data.features[i]);
    labels.push_back(data.label_of[i]);
  }
  FeatureSource source;
  if (cfg.train.augment) {
    source = [&](std::size_t k, Rng& rng) {
      return featurize(augment(normalize_pose(dataset.pose(train_idx[k])), cfg.train.augmentation, rng),
                       cfg.train.frame_cap);
    };
  }
  const Model model = train(feats, labels, data.labels, plan, cfg.train, source);

  std::vector<std::pair<std::string, std::vector<std::string>>> ranked;
  for (auto i : test_idx) {
    ranked.push_back({videos[i].video_id, predict_topk(model, data.features[i], std::min<std::size_t>(10, data.labels.size()))});
  }

  const auto dir = layout(cfg).train_dir(outcome.label);
  ensure_dir(dir);
  const std::string prov = provenance_line(cfg_in);
  write_weights_csv(dir / "weights.csv", weights, prov);
  save_model(dir / "model.json", model);
  outcome.predictions = dir / "predictions.csv";
  write_predictions(outcome.predictions, ranked, prov);
  outcome.train_videos = train_idx.size();
  outcome.test_videos = test_idx.size();
  return outcome;
}

AuditReport run_audit(const RunConfig& cfg, const PreparedData& data, const std::filesystem::path& predictions,
                      const std::filesystem::path& out_dir, const std::string& label) {
  const auto ranked = read_predictions(predictions);
  const auto outcomes = outcomes_from_predictions(data.dataset, ranked);
  AuditMetadata meta;
  meta.config_hash = config_hash(cfg);
  meta.seed = cfg.seed;
  meta.strategy = label;
  meta.mi_bins = cfg.audit.mi_bins;
  meta.scorer_mode = cfg.scorer.mode == ScorerMode::linear ? "linear" : "external";
  meta.quality_frames_per_video = cfg.scorer.frames_per_video;
  meta.split = std::string(to_string(cfg.audit.split));
  auto report = build_audit(data.dataset, outcomes, data.trajectory, data.quality, cfg.audit, std::move(meta));
  write_audit(out_dir, report, provenance_line(cfg));
  return report;
}

AuditReport run_audit(const RunConfig& cfg, const std::filesystem::path& predictions,
                      const std::filesystem::path& out_dir, const std::string& label) {
  const auto out = layout(cfg);
  PreparedData d;
  d.dataset = load_dataset_dir(cfg.dataset_dir(), {false, cfg.threads});
  if (std::filesystem::exists(out.features())) {
    for (auto& row : read_trajectory_features(out.features())) d.trajectory.emplace(row.video_id, std::move(row));
  } else {
    log_warning("no feature table at " + out.features().string() + "; trajectory statistics will be empty");
  }
  if (std::filesystem::exists(out.quality())) d.quality = read_quality_table(out.quality());
  return run_audit(cfg, d, predictions, out_dir, label);
}

ExperimentOutcome run_experiment(const RunConfig& cfg, bool force) {
  bool regenerated = false;
  if (cfg.dataset.empty()) {
    std::error_code ec;
    std::filesystem::remove_all(cfg.dataset_dir(), ec);
    run_synth(cfg);
    regenerated = true;
  }
  run_features(cfg, force || regenerated);
  const PreparedData data = prepare_data(cfg);

  ExperimentOutcome result;
  for (const auto& strategy : expand_strategies(cfg)) {
    const auto trained = run_train(cfg, strategy, data);
    auto report = run_audit(cfg, data, trained.predictions, layout(cfg).audit_dir(trained.label), trained.label);
    ExperimentRow row;
    row.strategy = trained.label;
    row.overall = report.overall;
    const auto& g = report.groups.front();
    if (const auto* a = find_row(g, cfg.audit.parity_group)) row.group_a = a->acc;
    if (const auto* b = find_row(g, cfg.audit.reference_group)) row.group_b = b->acc;
    row.parity = g.parity;
    result.rows.push_back(row);
    result.reports.push_back(std::move(report));
  }

  const auto dir = layout(cfg).experiment_dir();
  ensure_dir(dir);
  const std::string& ga = cfg.audit.parity_group;
  const std::string& gb = cfg.audit.reference_group;
  {
    CsvWriter w(dir / "comparison.csv",
                {"strategy", "overall_top1", "overall_top5", "overall_top10", ga + "_top1", ga + "_top5",
                 ga + "_top10", gb + "_top1", gb + "_top5", gb + "_top10", "parity"},
                provenance_line(cfg));
    for (const auto& r : result.rows) {
      w.write_row({r.strategy, format_double(r.overall.top1), format_double(r.overall.top5),
                   format_double(r.overall.top10), format_double(r.group_a.top1), format_double(r.group_a.top5),
                   format_double(r.group_a.top10), format_double(r.group_b.top1), format_double(r.group_b.top5),
                   format_double(r.group_b.top10), r.parity ? format_double(*r.parity) : ""});
    }
    w.close();
  }
  {
    nlohmann::ordered_json j;
    j["attribute"] = to_string(cfg.audit.attribute);
    j["parity_group"] = ga;
    j["reference_group"] = gb;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
      const auto triple = [](const AccuracyTriple& t) {
        return nlohmann::ordered_json{{"n", t.n}, {"top1", t.top1}, {"top5", t.top5}, {"top10", t.top10}};
      };
      nlohmann::ordered_json row;
      row["strategy"] = r.strategy;
      row["overall"] = triple(r.overall);
      row[ga] = triple(r.group_a);
      row[gb] = triple(r.group_b);
      row["parity"] = r.parity ? nlohmann::ordered_json(*r.parity) : nlohmann::ordered_json(nullptr);
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    j["metadata"] = {{"config_hash", config_hash(cfg)}, {"seed", cfg.seed}};
    write_text_file(dir / "comparison.json", j.dump(2) + "\n");
  }
  return result;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  const auto result = run_synth(cfg);
  const auto& ds = result.dataset;
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& v : ds.videos()) ++counts[static_cast<int>(v.split)];
  out << "wrote " << cfg.dataset_dir().string() << "\n"
      << "  participants " << ds.participants().size() << ", glosses " << ds.signs().size() << ", videos "
      << ds.size() << " (train " << counts[0] << ", val " << counts[1] << ", test " << counts[2] << ")\n";
  for (const auto& a : demographics_summary(ds)) {
    if (a.attribute != Attribute::gender) continue;
    out << "  gender:";
    for (const auto& v : a.values) out << " " << v.value << " " << v.count;
    out << ", unspecified " << a.unspecified << "\n";
  }
  return 0;
}

int cmd_features(const RunConfig& cfg, bool force, std::ostream& out) {
  const auto r = run_features(cfg, force);
  const auto l = layout(cfg);
  out << "features for " << r.videos << " videos: " << r.trajectory_computed << " trajectory rows computed, "
      << r.quality_computed << " quality scores computed\n"
      << "  missing seed reference " << r.missing_seed << ", too short for speed " << r.too_short_for_speed << "\n"
      << "  " << l.features().string() << "\n";
  if (cfg.quality_features) out << "  " << l.quality().string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& strategy, std::ostream& out) {
  const PreparedData data = prepare_data(cfg);
  const auto r = run_train(cfg, strategy, data);
  out << "trained '" << r.label << "' on " << r.train_videos << " videos; predictions for " << r.test_videos
      << " videos in " << r.predictions.string() << "\n";
  return 0;
}

int cmd_audit(const RunConfig& cfg, const std::filesystem::path& predictions, std::ostream& out) {
  const std::string label = predictions.parent_path().filename().string();
  const auto dir = layout(cfg).audit_dir(label.empty() ? "predictions" : label);
  const auto report = run_audit(cfg, predictions, dir, label);
  out << "audited " << report.evaluated << " videos: top1 " << fmt_acc(report.overall.top1) << ", top5 "
      << fmt_acc(report.overall.top5) << ", top10 " << fmt_acc(report.overall.top10);
  if (report.groups.front().parity) out << ", parity " << fmt_acc(*report.groups.front().parity);
  out << "\n  " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_experiment(const RunConfig& cfg, bool force, std::ostream& out) {
  const auto r = run_experiment(cfg, force);
  out << "strategy               top1    top5    top10   " << cfg.audit.parity_group << "/" << cfg.audit.reference_group
      << " top1   parity\n";
  for (const auto& row : r.rows) {
    std::string name = row.strategy;
    name.resize(std::max<std::size_t>(name.size(), 22), ' ');
    out << name << " " << fmt_acc(row.overall.top1) << "  " << fmt_acc(row.overall.top5) << "  "
        << fmt_acc(row.overall.top10) << "  " << fmt_acc(row.group_a.top1) << "/" << fmt_acc(row.group_b.top1)
        << "   " << (row.parity ? fmt_acc(*row.parity) : "n/a") << "\n";
  }
  out << "  " << (layout(cfg).experiment_dir() / "comparison.csv").string() << "\n";
  return 0;
}

}  // namespace signbias
