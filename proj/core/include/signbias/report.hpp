#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "signbias/config.hpp"
#include "signbias/pose_metrics.hpp"
#include "signbias/stats.hpp"

namespace signbias {

inline constexpr std::string_view kReportSchemaVersion = "1";

struct AuditMetadata {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string strategy;
  std::size_t mi_bins = 10;
  std::string scorer_mode;
  std::size_t quality_frames_per_video = 5;
  std::string split;
};

struct NamedBuckets {
  std::string feature;
  BucketTable table;
};

struct NamedCorrelation {
  std::string feature;
  CorrelationResult result;
};

struct NamedHistogram {
  std::string feature;
  Histogram histogram;
};

struct AuditReport {
  std::size_t evaluated = 0;
  AccuracyTriple overall;
  std::size_t missing_features = 0;
  std::size_t missing_quality = 0;
  std::vector<GroupReport> groups;
  std::vector<NamedBuckets> buckets;
  std::vector<NamedCorrelation> correlations;
  std::vector<MiEntry> mi_ranking;
  std::vector<AttributeSummary> demographics;
  std::vector<NamedHistogram> histograms;
  AuditMetadata metadata;
};

using FeatureTable = std::map<std::string, TrajectoryFeatureRow, std::less<>>;
using QualityTable = std::map<std::string, double, std::less<>>;

// Every outcome must name a dataset video (IntegrityError otherwise); an
// empty outcome set is a UsageError. Missing feature or quality rows leave the
// affected statistics computed over the remaining videos.
AuditReport build_audit(const Dataset& dataset, const std::vector<EvalOutcome>& outcomes,
                        const FeatureTable& features, const QualityTable& quality,
                        const AuditOptions& options, AuditMetadata metadata);

// Keys in fixed order: summary, groups, buckets, correlations, mi_ranking,
// metadata. Undefined values are null.
std::string report_json(const AuditReport& report);

// report.json plus groups.csv, parity.csv, buckets.csv, correlations.csv,
// mi_ranking.csv, demographics.csv and histograms.csv.
void write_audit(const std::filesystem::path& dir, const AuditReport& report,
                 std::string_view provenance);

// Predictions file: video_id,rank,gloss with ranks 1..k per video.
void write_predictions(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& ranked,
                       std::string_view provenance);
// Throws UsageError when the file has no rows; ranks must be consecutive.
std::vector<std::pair<std::string, std::vector<std::string>>> read_predictions(
    const std::filesystem::path& path);

// Matches predictions to their true glosses; unknown video_ids throw
// IntegrityError.
std::vector<EvalOutcome> outcomes_from_predictions(
    const Dataset& dataset, const std::vector<std::pair<std::string, std::vector<std::string>>>& ranked);

}  // namespace signbias
