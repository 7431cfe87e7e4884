#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signbias/dataset.hpp"
#include "signbias/image.hpp"
#include "signbias/pose.hpp"
#include "signbias/rng.hpp"

namespace signbias {

struct GenConfig {
  std::uint64_t seed = 1;

  std::size_t participants = 40;
  double female_fraction = 0.6;
  double unspecified_gender_fraction = 0.0;
  // Relative frequency of age decades 20, 30, ..., 70.
  std::array<double, 6> age_mix = {0.30, 0.25, 0.15, 0.12, 0.10, 0.08};
  double unspecified_age_fraction = 0.05;

  std::size_t glosses = 100;
  std::size_t videos_per_participant = 75;
  bool seed_signer = true;

  // Planted length effects, in per-sign SD units of the raw length score.
  double gender_length_offset = 0.3;  // male minus female
  double age_length_slope = 0.0;      // per decade above 45
  // Relative tempo spread: duration = prototype * (1 + length_cv * z).
  double length_cv = 0.3;
  // Share of a duration change realized as rest holds (longer) or as a
  // clipped sign (shorter) rather than as a tempo change.
  double length_content_coupling = 0.9;

  // Per-participant recording quality factor ~ U(min, max), plus a shift for
  // female participants (planted gender gap), times per-video jitter.
  double quality_factor_min = 0.05;
  double quality_factor_max = 0.45;
  double female_quality_shift = 0.5;
  double quality_video_jitter = 0.25;  // lognormal sigma
  // Keypoint noise SD (shoulder units) = base + coupling * quality factor.
  double base_keypoint_noise = 0.01;
  double quality_error_coupling = 0.14;
  // Finger keypoints contract toward the hand centroid by this fraction per
  // unit quality factor (capped at 1), as blurred hands do under pose estimation.
  double quality_hand_collapse = 0.8;

  double style_sd = 0.05;     // participant hand-position offset
  // Per-sign hand-position variant, +d for female and -d for male signers.
  double gender_variant_sd = 0.03;
  double speed_variance = 0.05;  // per-video temporal warp amplitude

  bool frames = true;
  std::size_t frame_width = 64;
  std::size_t frame_height = 64;
  std::size_t frames_per_video = 5;
  double frame_noise_variance = 400.0;  // pixel noise variance at quality factor 1

  double train_fraction = 0.7;
  double val_fraction = 0.1;
};

// Throws UsageError on invalid settings.
void validate(const GenConfig& cfg);

struct GroundTruthRow {
  std::string video_id;
  double noise_level = 0.0;       // keypoint noise SD, shoulder units
  double planted_length_z = 0.0;  // raw length score before standardization
  double quality_factor = 0.0;
};

struct GroundTruth {
  std::vector<GroundTruthRow> rows;  // parallel to the generated videos
};

// Analytic per-gloss hand motion; evaluate at normalized phase u in [0, 1].
struct GlossPrototype {
  struct Component {
    double amp_x, amp_y, freq, phase_x, phase_y;
  };
  struct HandMotion {
    Point base;
    std::vector<Component> components;
    double shape_angle = 0.0;
    double shape_swing = 0.0;
    double shape_freq = 1.0;
    std::array<Point, kHandKeypoints> shape_jitter{};
  };
  double duration_s = 2.0;
  bool two_handed = true;
  HandMotion left;
  HandMotion right;

  Keypoints at(double u) const;
  static Keypoints rest_pose();
};

GlossPrototype make_prototype(Rng& rng);

// Prototype sampled at 30 fps in the normalized layout (shoulders at
// (-0.5, 0) and (0.5, 0)). Deterministic in the generator state.
PoseSequence prototype_trajectory(const GlossPrototype& proto);
PoseSequence prototype_trajectory(std::size_t gloss_index, std::uint64_t seed);

struct FrameSpec {
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t count = 5;
  double noise_variance = 400.0;
};

// Smooth gradient background plus a blob following the right wrist, with
// Gaussian pixel noise of variance quality_factor * noise_variance.
std::vector<GrayImage> generate_frames(const PoseSequence& image_space_pose, double quality_factor,
                                       const FrameSpec& spec, Rng& rng);

struct GenerationResult {
  Dataset dataset;
  GroundTruth truth;
};

// Generates the dataset in memory; when out_dir is non-empty also writes
// manifest, participants, lexicon, poses/, frames/ and ground_truth.csv.
GenerationResult generate(const GenConfig& cfg, const std::filesystem::path& out_dir = {},
                          unsigned threads = 1, const std::string& provenance = {});

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth,
                        std::string_view provenance = {});
GroundTruth read_ground_truth(const std::filesystem::path& path);

}  // namespace signbias
