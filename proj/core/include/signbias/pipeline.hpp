#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "signbias/classifier.hpp"
#include "signbias/config.hpp"
#include "signbias/report.hpp"

namespace signbias {

// Output layout under RunConfig::out.
struct RunLayout {
  std::filesystem::path root;

  std::filesystem::path features() const { return root / "features.csv"; }
  std::filesystem::path quality() const { return root / "quality.csv"; }
  std::filesystem::path train_dir(const std::string& label) const { return root / "train" / label; }
  std::filesystem::path audit_dir(const std::string& label) const { return root / "audit" / label; }
  std::filesystem::path experiment_dir() const { return root / "experiment"; }
};

struct FeaturesOutcome {
  std::size_t videos = 0;
  std::size_t trajectory_computed = 0;
  std::size_t quality_computed = 0;
  std::size_t missing_seed = 0;
  std::size_t too_short_for_speed = 0;
};

// Dataset plus per-video classifier features and the feature tables, loaded
// once and shared by every training run of an experiment.
struct PreparedData {
  Dataset dataset;
  std::vector<std::string> labels;       // gloss ids, lexicon order
  std::vector<int> label_of;             // per video
  std::vector<FeatureVector> features;   // per video
  FeatureTable trajectory;
  QualityTable quality;
};

PreparedData prepare_data(const RunConfig& cfg);

struct TrainOutcome {
  std::string label;  // strategy name, or group_subset_<value>
  std::size_t train_videos = 0;
  std::size_t test_videos = 0;
  std::filesystem::path predictions;
};

struct ExperimentRow {
  std::string strategy;
  AccuracyTriple overall;
  AccuracyTriple group_a;
  AccuracyTriple group_b;
  std::optional<double> parity;
};

struct ExperimentOutcome {
  std::vector<ExperimentRow> rows;
  std::vector<AuditReport> reports;
};

GenerationResult run_synth(const RunConfig& cfg);
FeaturesOutcome run_features(const RunConfig& cfg, bool force);
// strategy: uniform | video_length | video_length_group | quality_high |
// quality_low | group_subset (training restricted to sampler.group_value).
TrainOutcome run_train(const RunConfig& cfg, const std::string& strategy, const PreparedData& data);
AuditReport run_audit(const RunConfig& cfg, const std::filesystem::path& predictions,
                      const std::filesystem::path& out_dir, const std::string& label);
AuditReport run_audit(const RunConfig& cfg, const PreparedData& data, const std::filesystem::path& predictions,
                      const std::filesystem::path& out_dir, const std::string& label);
ExperimentOutcome run_experiment(const RunConfig& cfg, bool force);

// Subcommand entry points: print a short human summary and return 0; errors
// propagate as exceptions.
int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_features(const RunConfig& cfg, bool force, std::ostream& out);
int cmd_train(const RunConfig& cfg, const std::string& strategy, std::ostream& out);
int cmd_audit(const RunConfig& cfg, const std::filesystem::path& predictions, std::ostream& out);
int cmd_experiment(const RunConfig& cfg, bool force, std::ostream& out);

}  // namespace signbias
