#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signbias/dataset.hpp"
#include "signbias/pose.hpp"

namespace signbias {

inline constexpr double kSampleInterval = 0.25;  // seconds

// Per frame: translate so the shoulder midpoint is the origin and scale so the
// shoulder distance is 1. Throws DegenerateFrameError if the shoulders are
// closer than 1e-9.
PoseSequence normalize_pose(const PoseSequence& seq);

// Frames at t0, t0+dt, t0+2dt, ... up to the last timestamp; each is the
// source frame nearest the target time (ties go to the earlier frame).
PoseSequence sample_at_interval(const PoseSequence& seq, double dt = kSampleInterval);

// Mean Euclidean distance over one hand's keypoints.
double pose_distance(const PoseFrame& a, const PoseFrame& b, Hand hand);
double pose_distance(const std::array<Point, kHandKeypoints>& a,
                     const std::array<Point, kHandKeypoints>& b);

// Discrete Frechet distance with pose_distance as the ground metric, by the
// O(nm) coupling DP (Eiter & Mannila). Throws DomainError on empty input.
double discrete_frechet(const HandTrajectory& a, const HandTrajectory& b);

// Mean pose_distance between index-aligned 0.25 s samples of `video` and
// `seed`, truncated to the shorter sampled length. Inputs should already be
// normalized.
double seed_divergence(const PoseSequence& video, const PoseSequence& seed, Hand hand);
// Fraction of the video's 0.25 s samples dropped by that truncation.
double seed_truncation_fraction(const PoseSequence& video, const PoseSequence& seed);

// Mean displacement between consecutive 0.25 s samples. Throws DomainError if
// fewer than two samples exist.
double signing_speed(const PoseSequence& seq, Hand hand);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

// (value - mean) / sd, or 0 when sd == 0.
double zscore(double value, const MeanSd& stats) noexcept;

MeanSd population_mean_sd(const std::vector<double>& values);

struct TrajectoryFeatureRow {
  std::string video_id;
  double length_z = 0.0;
  std::optional<double> seed_div_lh;
  std::optional<double> seed_div_rh;
  std::optional<double> speed_lh;
  std::optional<double> speed_rh;
  std::optional<double> speed_z_lh;
  std::optional<double> speed_z_rh;
  // Not part of the CSV schema; kept for in-process reporting.
  double seed_truncated_fraction = 0.0;
  friend bool operator==(const TrajectoryFeatureRow&, const TrajectoryFeatureRow&) = default;
};

struct TrajectoryFeatureSummary {
  std::vector<TrajectoryFeatureRow> rows;  // parallel to dataset.videos()
  std::size_t missing_seed = 0;
  std::size_t too_short_for_speed = 0;
};

// Computes length z, seed divergence (both hands) and signing speed (+ per-gloss
// speed z) for every video. Requires loaded poses.
TrajectoryFeatureSummary compute_trajectory_features(const Dataset& dataset, unsigned threads = 1);

inline const std::vector<std::string>& trajectory_feature_header() {
  static const std::vector<std::string> header = {
      "video_id", "length_z", "seed_div_lh", "seed_div_rh",
      "speed_lh", "speed_rh", "speed_z_lh",  "speed_z_rh"};
  return header;
}

void write_trajectory_features(const std::filesystem::path& path,
                               const std::vector<TrajectoryFeatureRow>& rows,
                               std::string_view provenance = {});
std::vector<TrajectoryFeatureRow> read_trajectory_features(const std::filesystem::path& path);

}  // namespace signbias
