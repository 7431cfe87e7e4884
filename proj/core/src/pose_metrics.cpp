#include "signbias/pose_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/parallel.hpp"

namespace signbias {

PoseSequence normalize_pose(const PoseSequence& seq) {
  PoseSequence out;
  out.frames.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& frame = seq.frames[i];
    const Point ls = frame.kp[KeypointSchema::kLeftShoulder];
    const Point rs = frame.kp[KeypointSchema::kRightShoulder];
    const double dist = std::hypot(rs.x - ls.x, rs.y - ls.y);
    if (!(dist >= 1e-9)) {
      throw DegenerateFrameError(i, "frame " + std::to_string(i) +
                                        ": shoulder keypoints coincide, cannot normalize");
    }
    const Point mid{0.5 * (ls.x + rs.x), 0.5 * (ls.y + rs.y)};
    PoseFrame norm;
    norm.t = frame.t;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      norm.kp[k] = {(frame.kp[k].x - mid.x) / dist, (frame.kp[k].y - mid.y) / dist};
    }
    out.frames.push_back(norm);
  }
  return out;
}

PoseSequence sample_at_interval(const PoseSequence& seq, double dt) {
  if (seq.empty()) throw DomainError("sample_at_interval: empty sequence");
  if (!(dt > 0.0)) throw DomainError("sample_at_interval: dt must be positive");
  const double t0 = seq.frames.front().t;
  const double t_last = seq.frames.back().t;
  constexpr double kEps = 1e-9;
  PoseSequence out;
  for (std::size_t k = 0;; ++k) {
    const double target = t0 + static_cast<double>(k) * dt;
    if (target > t_last + kEps) break;
    auto it = std::lower_bound(seq.frames.begin(), seq.frames.end(), target,
                               [](const PoseFrame& f, double t) { return f.t < t; });
    std::size_t idx = static_cast<std::size_t>(it - seq.frames.begin());
    if (idx == seq.size()) {
      idx = seq.size() - 1;
    } else if (idx > 0) {
      const double after = seq.frames[idx].t - target;
      const double before = target - seq.frames[idx - 1].t;
      if (before <= after) --idx;
    }
    out.frames.push_back(seq.frames[idx]);
  }
  return out;
}

double pose_distance(const std::array<Point, kHandKeypoints>& a,
                     const std::array<Point, kHandKeypoints>& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    sum += std::hypot(a[k].x - b[k].x, a[k].y - b[k].y);
  }
  return sum / static_cast<double>(kHandKeypoints);
}

double pose_distance(const PoseFrame& a, const PoseFrame& b, Hand hand) {
  const std::size_t first = KeypointSchema::hand_first(hand);
  double sum = 0.0;
  for (std::size_t k = first; k < first + kHandKeypoints; ++k) {
    sum += std::hypot(a.kp[k].x - b.kp[k].x, a.kp[k].y - b.kp[k].y);
  }
  return sum / static_cast<double>(kHandKeypoints);
}

double discrete_frechet(const HandTrajectory& a, const HandTrajectory& b) {
  if (a.empty() || b.empty()) throw DomainError("discrete_frechet: empty trajectory");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // Rolling row: prev[j] = ca(i-1, j), cur[j] = ca(i, j).
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = pose_distance(a.points[i], b.points[j]);
      double reach;
      if (i == 0 && j == 0) {
        reach = 0.0;
      } else if (i == 0) {
        reach = cur[j - 1];
      } else if (j == 0) {
        reach = prev[0];
      } else {
        reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      }
      cur[j] = std::max(reach, d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

double seed_divergence(const PoseSequence& video, const PoseSequence& seed, Hand hand) {
  if (video.empty() || seed.empty()) throw DomainError("seed_divergence: empty sequence");
  const auto sv = sample_at_interval(video);
  const auto ss = sample_at_interval(seed);
  const std::size_t n = std::min(sv.size(), ss.size());
  if (n == 0) throw DomainError("seed_divergence: no overlapping samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += pose_distance(sv.frames[i], ss.frames[i], hand);
  return sum / static_cast<double>(n);
}

double seed_truncation_fraction(const PoseSequence& video, const PoseSequence& seed) {
  const auto nv = sample_at_interval(video).size();
  const auto ns = sample_at_interval(seed).size();
  if (nv <= ns) return 0.0;
  return static_cast<double>(nv - ns) / static_cast<double>(nv);
}

double signing_speed(const PoseSequence& seq, Hand hand) {
  if (seq.empty()) throw DomainError("signing_speed: empty sequence");
  const auto s = sample_at_interval(seq);
  if (s.size() < 2) throw DomainError("signing_speed: fewer than two 0.25 s samples");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    sum += pose_distance(s.frames[i], s.frames[i + 1], hand);
  }
  return sum / static_cast<double>(s.size() - 1);
}

double zscore(double value, const MeanSd& stats) noexcept {
  if (stats.sd <= 0.0) return 0.0;
  return (value - stats.mean) / stats.sd;
}

MeanSd population_mean_sd(const std::vector<double>& values) {
  if (values.empty()) return {};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size())) : 0.0};
}

TrajectoryFeatureSummary compute_trajectory_features(const Dataset& dataset, unsigned threads) {
  const auto& videos = dataset.videos();
  const std::size_t n = videos.size();
  TrajectoryFeatureSummary summary;
  summary.rows.resize(n);
  if (n == 0) return summary;
  if (!dataset.has_poses()) throw DomainError("compute_trajectory_features: poses not loaded");

  std::vector<PoseSequence> normalized(n);
  parallel_for(n, threads, [&](std::size_t i) { normalized[i] = normalize_pose(dataset.pose(i)); });

  const auto length_stats = sign_length_stats(dataset);
  std::vector<char> missing_seed(n, 0), too_short(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& v = videos[i];
    auto& row = summary.rows[i];
    row.video_id = v.video_id;
    const auto& ls = length_stats.at(v.gloss_id);
    row.length_z = zscore(v.length_s, {ls.mean_length_s, ls.sd_length_s});
    if (auto seed = dataset.seed_video(v.gloss_id)) {
      row.seed_div_lh = seed_divergence(normalized[i], normalized[*seed], Hand::left);
      row.seed_div_rh = seed_divergence(normalized[i], normalized[*seed], Hand::right);
      row.seed_truncated_fraction = seed_truncation_fraction(normalized[i], normalized[*seed]);
    } else {
      missing_seed[i] = 1;
    }
    if (sample_at_interval(normalized[i]).size() >= 2) {
      row.speed_lh = signing_speed(normalized[i], Hand::left);
      row.speed_rh = signing_speed(normalized[i], Hand::right);
    } else {
      too_short[i] = 1;
    }
  });

  // Per-gloss speed z-scores, reusing the sign-level z machinery.
  std::map<std::string, std::vector<double>> lh_by_gloss, rh_by_gloss;
  for (std::size_t i = 0; i < n; ++i) {
    if (summary.rows[i].speed_lh) {
      lh_by_gloss[videos[i].gloss_id].push_back(*summary.rows[i].speed_lh);
      rh_by_gloss[videos[i].gloss_id].push_back(*summary.rows[i].speed_rh);
    }
  }
  std::map<std::string, MeanSd> lh_stats, rh_stats;
  for (const auto& [g, vals] : lh_by_gloss) lh_stats[g] = population_mean_sd(vals);
  for (const auto& [g, vals] : rh_by_gloss) rh_stats[g] = population_mean_sd(vals);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = summary.rows[i];
    if (row.speed_lh) {
      row.speed_z_lh = zscore(*row.speed_lh, lh_stats.at(videos[i].gloss_id));
      row.speed_z_rh = zscore(*row.speed_rh, rh_stats.at(videos[i].gloss_id));
    }
    summary.missing_seed += missing_seed[i];
    summary.too_short_for_speed += too_short[i];
  }
  return summary;
}

void write_trajectory_features(const std::filesystem::path& path,
                               const std::vector<TrajectoryFeatureRow>& rows,
                               std::string_view provenance) {
  CsvWriter w(path, trajectory_feature_header(), provenance);
  for (const auto& r : rows) {
    w.write_row({r.video_id, format_double(r.length_z), format_optional(r.seed_div_lh),
                 format_optional(r.seed_div_rh), format_optional(r.speed_lh),
                 format_optional(r.speed_rh), format_optional(r.speed_z_lh),
                 format_optional(r.speed_z_rh)});
  }
  w.close();
}

std::vector<TrajectoryFeatureRow> read_trajectory_features(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  std::vector<std::size_t> cols;
  for (const auto& name : trajectory_feature_header()) cols.push_back(table.column(name));
  std::vector<TrajectoryFeatureRow> rows;
  rows.reserve(table.rows.size());
  const std::string file = path.filename().string();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto at = [&](std::size_t c) -> const std::string& { return f[cols[c]]; };
    const auto cx = [&](std::size_t c) {
      return file + " row " + std::to_string(r + 1) + " column '" + trajectory_feature_header()[c] + "'";
    };
    TrajectoryFeatureRow row;
    row.video_id = at(0);
    row.length_z = parse_double(at(1), cx(1));
    row.seed_div_lh = parse_optional_double(at(2), cx(2));
    row.seed_div_rh = parse_optional_double(at(3), cx(3));
    row.speed_lh = parse_optional_double(at(4), cx(4));
    row.speed_rh = parse_optional_double(at(5), cx(5));
    row.speed_z_lh = parse_optional_double(at(6), cx(6));
    row.speed_z_rh = parse_optional_double(at(7), cx(7));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace signbias
