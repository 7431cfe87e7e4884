#include "signbias/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/rng.hpp"

namespace signbias {

namespace {
double clamp_weight(double w) { return std::clamp(w, kMinWeight, kMaxWeight); }
}  // namespace

double weight_video_length(double length_z) {
  if (!std::isfinite(length_z)) throw DomainError("weight_video_length: z must be finite");
  return clamp_weight(std::exp2(-length_z));
}

double weight_quality_high(double quality) {
  if (!(quality >= 0.0)) throw DomainError("weight_quality_high: score must be >= 0");
  return clamp_weight(std::exp2(-quality / 100.0));
}

double weight_quality_low(double quality) {
  if (!(quality >= 0.0)) throw DomainError("weight_quality_low: score must be >= 0");
  if (quality <= kQualityEpsilon) return kMinWeight;
  return clamp_weight(std::exp2(-100.0 / quality));
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::uniform: return "uniform";
    case Strategy::video_length: return "video_length";
    case Strategy::video_length_group_restricted: return "video_length_group";
    case Strategy::quality_high: return "quality_high";
    case Strategy::quality_low: return "quality_low";
  }
  return "uniform";
}

Strategy parse_strategy(std::string_view text) {
  for (auto s : {Strategy::uniform, Strategy::video_length, Strategy::video_length_group_restricted,
                 Strategy::quality_high, Strategy::quality_low}) {
    if (to_string(s) == text) return s;
  }
  if (text == "video_length_group_restricted") return Strategy::video_length_group_restricted;
  throw UsageError("unknown sampling strategy '" + std::string(text) + "'");
}

std::vector<SampleWeight> strategy_weights(Strategy strategy, const WeightInputs& inputs) {
  const std::size_t n = inputs.video_ids.size();
  const bool needs_z = strategy == Strategy::video_length ||
                       strategy == Strategy::video_length_group_restricted;
  const bool needs_q = strategy == Strategy::quality_high || strategy == Strategy::quality_low;
  if (needs_z && inputs.length_z.size() != n) throw DomainError("strategy_weights: length_z missing");
  if (needs_q && inputs.quality.size() != n) throw DomainError("strategy_weights: quality scores missing");
  std::vector<SampleWeight> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].video_id = inputs.video_ids[i];
    switch (strategy) {
      case Strategy::uniform: out[i].weight = 1.0; break;
      case Strategy::video_length:
      case Strategy::video_length_group_restricted:
        out[i].weight = weight_video_length(inputs.length_z[i]);
        break;
      case Strategy::quality_high: out[i].weight = weight_quality_high(inputs.quality[i]); break;
      case Strategy::quality_low: out[i].weight = weight_quality_low(inputs.quality[i]); break;
    }
  }
  return out;
}

std::vector<SampleWeight> restrict_weights_to_group(const std::vector<SampleWeight>& weights,
                                                    const Dataset& dataset, Attribute attribute,
                                                    std::string_view value) {
  std::vector<SampleWeight> out = weights;
  for (auto& w : out) {
    const auto idx = dataset.video_index(w.video_id);
    if (!idx) throw IntegrityError("weight for unknown video '" + w.video_id + "'");
    const auto attr = attribute_value(dataset, dataset.videos()[*idx], attribute);
    if (!attr || *attr != value) w.weight = 1.0;
  }
  return out;
}

WeightedSampler::WeightedSampler(const SamplerPlan& plan)
    : epoch_size_(plan.epoch_size == 0 ? plan.weights.size() : plan.epoch_size),
      seed_(plan.rng_seed) {
  if (plan.weights.empty()) throw DomainError("WeightedSampler: no weights");
  cumulative_.reserve(plan.weights.size());
  double total = 0.0;
  for (const auto& w : plan.weights) {
    if (!(w.weight > 0.0) || !std::isfinite(w.weight)) {
      throw DomainError("WeightedSampler: weight for '" + w.video_id + "' must be positive and finite");
    }
    total += w.weight;
    cumulative_.push_back(total);
  }
}

std::vector<std::size_t> WeightedSampler::epoch(std::uint64_t epoch_index) const {
  Rng rng(derive_seed(seed_, "epoch", epoch_index));
  const double total = cumulative_.back();
  std::vector<std::size_t> out(epoch_size_);
  for (auto& idx : out) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    idx = static_cast<std::size_t>(it - cumulative_.begin());
  }
  return out;
}

double WeightedSampler::probability(std::size_t index) const {
  const double prev = index == 0 ? 0.0 : cumulative_[index - 1];
  return (cumulative_.at(index) - prev) / cumulative_.back();
}

void write_weights_csv(const std::filesystem::path& path, const std::vector<SampleWeight>& weights,
                       std::string_view provenance) {
  CsvWriter w(path, {"video_id", "weight"}, provenance);
  for (const auto& sw : weights) w.write_row({sw.video_id, format_double(sw.weight)});
  w.close();
}

}  // namespace signbias
