#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signbias/image.hpp"

namespace signbias {

// Mean-subtracted contrast-normalized luminance coefficients.
struct MscnField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;  // row-major
};

// Asymmetric generalized Gaussian fit: shape alpha, left/right scales.
struct AggdFit {
  double alpha = 2.0;
  double beta_left = 0.0;
  double beta_right = 0.0;
  // Mean of the fitted distribution, (beta_r - beta_l) G(2/a) / G(1/a).
  double mean() const;
};

// Symmetric generalized Gaussian fit of zero-mean data: shape and variance.
struct GgdFit {
  double alpha = 2.0;
  double variance = 0.0;
};

inline constexpr double kMscnStabilizer = 1.0;  // C, on the 0-255 scale
inline constexpr std::size_t kMscnWindow = 7;
inline constexpr double kMscnGaussSigma = 7.0 / 6.0;
inline constexpr double kShapeGridMin = 0.2;
inline constexpr double kShapeGridMax = 10.0;
inline constexpr double kShapeGridStep = 0.001;
inline constexpr std::size_t kMinMscnSide = 16;
inline constexpr std::size_t kMinFitSamples = 100;
inline constexpr std::size_t kQualityFeatureCount = 36;

using QualityFeatures = std::array<double, kQualityFeatureCount>;

// (I - mu) / (sigma + C) with a normalized 7x7 Gaussian window (sigma 7/6)
// and mirror (reflect-101) borders. Throws DomainError below 16x16.
MscnField mscn(const GrayImage& image);

// Moment-matching fits over the shape grid [0.2, 10] step 0.001.
// aggd_fit needs >= 100 finite samples with both signs present; all-zero or
// one-sided input throws DegenerateFitError.
AggdFit aggd_fit(std::span<const double> samples);
GgdFit ggd_fit(std::span<const double> samples);

// 18 features per scale (full, then 2x box-downsampled):
//   [0] GGD alpha, [1] GGD variance of the MSCN field,
//   then for each orientation H, V, D1, D2 of neighbouring-pair products:
//   AGGD alpha, mean, beta_left, beta_right.
// Degenerate fits (blank frames) fall back to alpha = 2 with zero scales.
QualityFeatures brisque_features(const GrayImage& image);

enum class ScorerMode { linear, external };

struct ScorerConfig {
  ScorerMode mode = ScorerMode::linear;
  // 36 feature weights followed by the bias term.
  std::array<double, kQualityFeatureCount + 1> weights{};
  std::size_t frames_per_video = 5;
  // Per-video scores for external mode.
  std::map<std::string, double, std::less<>> external;

  static ScorerConfig default_linear();
};

struct QualityScore {
  std::string video_id;
  double brisque_like = 0.0;  // higher = lower quality
};

// Linear mode: bias + w . features, clamped to [0, 100].
double linear_quality_score(const QualityFeatures& features, const ScorerConfig& scorer);
// Linear mode uses the features; external mode looks video_id up and throws
// LookupError if it is missing.
QualityScore quality_score(std::string_view video_id, const QualityFeatures& features,
                           const ScorerConfig& scorer);

// Mean per-frame score over frames_per_video uniformly spaced frames.
QualityScore video_quality(std::string_view video_id, const std::vector<GrayImage>& frames,
                           const ScorerConfig& scorer);

// Indices of k frames spread uniformly over n: floor((i + 0.5) n / k).
std::vector<std::size_t> uniform_frame_indices(std::size_t n, std::size_t k);

std::map<std::string, double, std::less<>> read_quality_table(const std::filesystem::path& path);
void write_quality_table(const std::filesystem::path& path, const std::vector<QualityScore>& scores,
                         std::string_view provenance = {});

}  // namespace signbias
