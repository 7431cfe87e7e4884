#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signbias/dataset.hpp"

namespace signbias {

inline constexpr double kMinWeight = 0x1.0p-20;
inline constexpr double kMaxWeight = 0x1.0p+20;
inline constexpr double kQualityEpsilon = 1e-6;

// The three resampling formulas, used as unnormalized sampling weights
// (2^-z exceeds 1 for z < 0, so they cannot be read as probabilities).
double weight_video_length(double length_z);   // 2^(-z)
double weight_quality_high(double quality);    // 2^(-B/100)
double weight_quality_low(double quality);     // 2^(-100/B), floor 2^-20 for B <= 1e-6

enum class Strategy { uniform, video_length, video_length_group_restricted, quality_high, quality_low };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view text);

struct SampleWeight {
  std::string video_id;
  double weight = 1.0;
};

// Per-video inputs to the weight formulas, parallel to the training videos.
struct WeightInputs {
  std::vector<std::string> video_ids;
  std::vector<double> length_z;
  std::vector<double> quality;  // may be empty for strategies that ignore it
};

std::vector<SampleWeight> strategy_weights(Strategy strategy, const WeightInputs& inputs);

// Videos in the group keep their weight; every other video gets 1.0.
std::vector<SampleWeight> restrict_weights_to_group(const std::vector<SampleWeight>& weights,
                                                    const Dataset& dataset, Attribute attribute,
                                                    std::string_view value);

struct SamplerPlan {
  std::vector<SampleWeight> weights;
  std::size_t epoch_size = 0;  // 0 = number of weights
  std::uint64_t rng_seed = 0;
  Strategy strategy = Strategy::uniform;
};

// I.i.d. draws with replacement, P(i) = w_i / sum(w). Epoch e uses its own
// xoshiro256** stream seeded with derive_seed(rng_seed, "epoch", e), and each
// draw maps u = uniform() * total onto the cumulative weights by binary
// search, so the stream is a pure function of (weights, epoch_size, seed, e).
class WeightedSampler {
 public:
  explicit WeightedSampler(const SamplerPlan& plan);

  std::vector<std::size_t> epoch(std::uint64_t epoch_index) const;
  std::size_t epoch_size() const noexcept { return epoch_size_; }
  std::size_t population() const noexcept { return cumulative_.size(); }
  double probability(std::size_t index) const;

 private:
  std::vector<double> cumulative_;
  std::size_t epoch_size_ = 0;
  std::uint64_t seed_ = 0;
};

void write_weights_csv(const std::filesystem::path& path, const std::vector<SampleWeight>& weights,
                       std::string_view provenance = {});

}  // namespace signbias
