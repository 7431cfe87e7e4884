#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "signbias/pose.hpp"
#include "signbias/rng.hpp"
#include "signbias/sampler.hpp"

namespace signbias {

// 27 keypoints x 2 coordinates x {temporal mean, temporal SD, mean |delta|}.
inline constexpr std::size_t kFeatureDim = kNumKeypoints * 2 * 3;
inline constexpr std::size_t kDefaultFrameCap = 128;

using FeatureVector = std::vector<double>;

// Blocks of 54: means, population SDs, mean absolute frame-to-frame deltas.
// Sequences longer than frame_cap keep frames floor(i * n / cap), i < cap.
// Throws DomainError with fewer than two frames.
FeatureVector featurize(const PoseSequence& seq, std::size_t frame_cap = kDefaultFrameCap);

// Frame indices kept by the cap rule.
std::vector<std::size_t> capped_frame_indices(std::size_t n, std::size_t frame_cap);

struct AugmentConfig {
  double shear_range = 0.1;       // shear factor ~ U(-r, r)
  double rotation_deg = 15.0;     // angle ~ U(-r, r) degrees
  bool horizontal_flip = false;   // mirror with probability 1/2
};

// p' = R(angle) * [[1, shear], [0, 1]] * p on every keypoint of every frame;
// a flip mirrors x and swaps left/right keypoint identities first.
PoseSequence apply_transform(const PoseSequence& seq, double shear, double angle_rad,
                             bool flip = false);
// One transform drawn per call (per video per epoch).
PoseSequence augment(const PoseSequence& seq, const AugmentConfig& cfg, Rng& rng);

struct Model {
  std::size_t dim = kFeatureDim;
  std::vector<std::string> labels;   // class index -> gloss
  std::vector<double> feature_mean;  // standardization applied before the linear layer
  std::vector<double> feature_scale;
  std::vector<double> weights;       // classes x dim, row-major
  std::vector<double> bias;          // classes
  std::vector<double> loss_trace;    // mean training loss per epoch

  std::size_t classes() const noexcept { return labels.size(); }
  // Zero weights and bias, identity standardization.
  static Model zeros(std::vector<std::string> labels, std::size_t dim = kFeatureDim);
  friend bool operator==(const Model&, const Model&) = default;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  double l2 = 1e-4;
  bool augment = false;
  AugmentConfig augmentation{};
  std::size_t frame_cap = kDefaultFrameCap;
  std::uint64_t seed = 0;
};

// Produces the feature row for training example i; used when augmentation
// needs to re-featurize a freshly transformed sequence each epoch.
using FeatureSource = std::function<FeatureVector(std::size_t index, Rng& rng)>;

// Mini-batch SGD on softmax cross-entropy + (l2/2)||W||^2. Example order comes
// from the sampler plan (weights parallel to `features`). Standardization
// statistics are taken from the unaugmented training features. Throws
// TrainingDivergenceError if the loss becomes non-finite.
Model train(std::span<const FeatureVector> features, std::span<const int> labels,
            const std::vector<std::string>& label_names, const SamplerPlan& plan,
            const TrainConfig& cfg, const FeatureSource& augmented_source = {});

std::vector<double> logits(const Model& model, std::span<const double> feature);
std::vector<double> predict_proba(const Model& model, std::span<const double> feature);
// Class indices by descending logit; equal logits keep ascending index order.
std::vector<std::size_t> rank_classes(const Model& model, std::span<const double> feature);
std::vector<std::string> predict_topk(const Model& model, std::span<const double> feature,
                                      std::size_t k);

struct Gradient {
  std::vector<double> weights;
  std::vector<double> bias;
};

double batch_loss(const Model& model, std::span<const FeatureVector> batch,
                  std::span<const int> labels, double l2);
Gradient batch_gradient(const Model& model, std::span<const FeatureVector> batch,
                        std::span<const int> labels, double l2);

// Max relative error |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// over `samples` randomly chosen parameters, numeric = central difference.
double gradient_check(const Model& model, std::span<const FeatureVector> batch,
                      std::span<const int> labels, double epsilon, double l2 = 0.0,
                      std::size_t samples = 20, std::uint64_t seed = 0);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace signbias
