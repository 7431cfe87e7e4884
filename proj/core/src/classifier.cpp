#include "signbias/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

std::vector<std::size_t> capped_frame_indices(std::size_t n, std::size_t frame_cap) {
  std::vector<std::size_t> idx;
  if (frame_cap == 0) throw DomainError("frame_cap must be >= 1");
  if (n <= frame_cap) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  idx.reserve(frame_cap);
  for (std::size_t i = 0; i < frame_cap; ++i) idx.push_back(i * n / frame_cap);
  return idx;
}

FeatureVector featurize(const PoseSequence& seq, std::size_t frame_cap) {
  if (seq.size() < 2) throw DomainError("featurize: need at least two frames");
  const auto idx = capped_frame_indices(seq.size(), frame_cap);
  constexpr std::size_t kCoords = kNumKeypoints * 2;
  FeatureVector f(kFeatureDim, 0.0);
  double* mean = f.data();
  double* sd = f.data() + kCoords;
  double* delta = f.data() + 2 * kCoords;
  const auto coord = [&](std::size_t frame, std::size_t c) {
    const Point& p = seq.frames[frame].kp[c / 2];
    return (c % 2 == 0) ? p.x : p.y;
  };
  const double n = static_cast<double>(idx.size());
  for (std::size_t c = 0; c < kCoords; ++c) {
    double sum = 0.0;
    for (auto i : idx) sum += coord(i, c);
    const double m = sum / n;
    double ss = 0.0;
    for (auto i : idx) ss += (coord(i, c) - m) * (coord(i, c) - m);
    double dsum = 0.0;
    for (std::size_t j = 1; j < idx.size(); ++j) dsum += std::abs(coord(idx[j], c) - coord(idx[j - 1], c));
    mean[c] = m;
    sd[c] = std::sqrt(ss / n);
    delta[c] = dsum / (n - 1.0);
  }
  return f;
}

namespace {
constexpr std::array<std::size_t, kNumKeypoints> mirror_map() {
  std::array<std::size_t, kNumKeypoints> m{};
  for (std::size_t i = 0; i < kNumKeypoints; ++i) m[i] = i;
  m[0] = 1;
  m[1] = 0;
  m[3] = 4;
  m[4] = 3;
  m[5] = 6;
  m[6] = 5;
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    m[KeypointSchema::kLeftHandFirst + k] = KeypointSchema::kRightHandFirst + k;
    m[KeypointSchema::kRightHandFirst + k] = KeypointSchema::kLeftHandFirst + k;
  }
  return m;
}
}  // namespace

PoseSequence apply_transform(const PoseSequence& seq, double shear, double angle_rad, bool flip) {
  static constexpr auto kMirror = mirror_map();
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  PoseSequence out;
  out.frames.reserve(seq.size());
  for (const auto& frame : seq.frames) {
    PoseFrame f;
    f.t = frame.t;
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      Point p = flip ? frame.kp[kMirror[k]] : frame.kp[k];
      if (flip) p.x = -p.x;
      const double sx = p.x + shear * p.y;
      const double sy = p.y;
      f.kp[k] = {c * sx - s * sy, s * sx + c * sy};
    }
    out.frames.push_back(f);
  }
  return out;
}

PoseSequence augment(const PoseSequence& seq, const AugmentConfig& cfg, Rng& rng) {
  const double shear = rng.uniform(-cfg.shear_range, cfg.shear_range);
  const double angle = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg) * std::numbers::pi / 180.0;
  const bool flip = cfg.horizontal_flip && rng.uniform() < 0.5;
  return apply_transform(seq, shear, angle, flip);
}

Model Model::zeros(std::vector<std::string> labels, std::size_t dim) {
  Model m;
  m.dim = dim;
  m.labels = std::move(labels);
  m.feature_mean.assign(dim, 0.0);
  m.feature_scale.assign(dim, 1.0);
  m.weights.assign(m.labels.size() * dim, 0.0);
  m.bias.assign(m.labels.size(), 0.0);
  return m;
}

namespace {

void standardize(const Model& model, std::span<const double> x, std::vector<double>& out) {
  out.resize(model.dim);
  for (std::size_t d = 0; d < model.dim; ++d) {
    out[d] = (x[d] - model.feature_mean[d]) / model.feature_scale[d];
  }
}

void compute_logits(const Model& model, const std::vector<double>& xs, std::vector<double>& z) {
  const std::size_t C = model.classes();
  const std::size_t D = model.dim;
  z.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    const double* w = model.weights.data() + c * D;
    double acc = model.bias[c];
    for (std::size_t d = 0; d < D; ++d) acc += w[d] * xs[d];
    z[c] = acc;
  }
}

// In-place softmax; returns log-sum-exp.
double softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return mx + std::log(sum);
}

void check_feature(const Model& model, std::span<const double> x) {
  if (x.size() != model.dim) {
    throw DomainError("feature length " + std::to_string(x.size()) + " does not match model dimension " +
                      std::to_string(model.dim));
  }
}

// Accumulates mean-over-batch gradient of cross-entropy (without L2) into g;
// returns the mean cross-entropy.
double accumulate_batch(const Model& model, std::span<const FeatureVector> batch,
                        std::span<const int> labels, Gradient& g) {
  const std::size_t C = model.classes();
  const std::size_t D = model.dim;
  g.weights.assign(C * D, 0.0);
  g.bias.assign(C, 0.0);
  std::vector<double> xs, z;
  double loss = 0.0;
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    check_feature(model, batch[i]);
    const auto y = static_cast<std::size_t>(labels[i]);
    if (labels[i] < 0 || y >= C) throw DomainError("label index out of range");
    standardize(model, batch[i], xs);
    compute_logits(model, xs, z);
    const double zy = z[y];
    const double lse = softmax_inplace(z);
    loss += lse - zy;
    z[y] -= 1.0;
    for (std::size_t c = 0; c < C; ++c) {
      const double gc = z[c] * inv_b;
      if (gc == 0.0) continue;
      g.bias[c] += gc;
      double* gw = g.weights.data() + c * D;
      for (std::size_t d = 0; d < D; ++d) gw[d] += gc * xs[d];
    }
  }
  return loss * inv_b;
}

double l2_penalty(const Model& model, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (double w : model.weights) s += w * w;
  return 0.5 * l2 * s;
}

}  // namespace

double batch_loss(const Model& model, std::span<const FeatureVector> batch,
                  std::span<const int> labels, double l2) {
  if (batch.empty()) throw DomainError("batch_loss: empty batch");
  std::vector<double> xs, z;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    check_feature(model, batch[i]);
    standardize(model, batch[i], xs);
    compute_logits(model, xs, z);
    const double zy = z.at(static_cast<std::size_t>(labels[i]));
    loss += softmax_inplace(z) - zy;
  }
  return loss / static_cast<double>(batch.size()) + l2_penalty(model, l2);
}

Gradient batch_gradient(const Model& model, std::span<const FeatureVector> batch,
                        std::span<const int> labels, double l2) {
  if (batch.empty()) throw DomainError("batch_gradient: empty batch");
  Gradient g;
  accumulate_batch(model, batch, labels, g);
  if (l2 != 0.0) {
    for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights[i] += l2 * model.weights[i];
  }
  return g;
}

Model train(std::span<const FeatureVector> features, std::span<const int> labels,
            const std::vector<std::string>& label_names, const SamplerPlan& plan,
            const TrainConfig& cfg, const FeatureSource& augmented_source) {
  if (features.size() != labels.size()) throw DomainError("train: features/labels length mismatch");
  if (label_names.size() < 2) throw DomainError("train: need at least two classes");
  if (plan.weights.size() != features.size()) {
    throw DomainError("train: sampler plan must weight every training example");
  }
  if (!(cfg.learning_rate > 0.0)) throw DomainError("train: learning rate must be positive");
  if (cfg.batch_size == 0) throw DomainError("train: batch size must be positive");
  const std::size_t D = features.empty() ? kFeatureDim : features.front().size();
  Model model = Model::zeros(label_names, D);
  if (features.empty()) return model;

  // Standardization from the raw training rows.
  const double n = static_cast<double>(features.size());
  for (const auto& f : features) {
    if (f.size() != D) throw DomainError("train: inconsistent feature length");
    for (std::size_t d = 0; d < D; ++d) {
      if (!std::isfinite(f[d])) throw DomainError("train: non-finite feature");
      model.feature_mean[d] += f[d];
    }
  }
  for (auto& m : model.feature_mean) m /= n;
  std::vector<double> var(D, 0.0);
  for (const auto& f : features) {
    for (std::size_t d = 0; d < D; ++d) var[d] += (f[d] - model.feature_mean[d]) * (f[d] - model.feature_mean[d]);
  }
  for (std::size_t d = 0; d < D; ++d) {
    const double sd = std::sqrt(var[d] / n);
    model.feature_scale[d] = sd > 1e-8 ? sd : 1.0;
  }

  const WeightedSampler sampler(plan);
  Rng augment_rng(derive_seed(cfg.seed, "augment"));
  const bool use_source = cfg.augment && static_cast<bool>(augmented_source);
  std::vector<FeatureVector> batch;
  std::vector<int> batch_labels;
  Gradient g;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order = sampler.epoch(epoch);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t idx = order[j];
        batch.push_back(use_source ? augmented_source(idx, augment_rng) : features[idx]);
        batch_labels.push_back(labels[idx]);
      }
      const double loss = accumulate_batch(model, batch, batch_labels, g) + l2_penalty(model, cfg.l2);
      if (!std::isfinite(loss)) {
        throw TrainingDivergenceError(static_cast<int>(epoch),
                                      "training diverged (non-finite loss) in epoch " + std::to_string(epoch));
      }
      loss_sum += loss;
      ++batches;
      const double lr = cfg.learning_rate;
      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        model.weights[i] -= lr * (g.weights[i] + cfg.l2 * model.weights[i]);
      }
      for (std::size_t c = 0; c < model.bias.size(); ++c) model.bias[c] -= lr * g.bias[c];
    }
    model.loss_trace.push_back(loss_sum / static_cast<double>(std::max<std::size_t>(1, batches)));
  }
  return model;
}

std::vector<double> logits(const Model& model, std::span<const double> feature) {
  check_feature(model, feature);
  std::vector<double> xs, z;
  standardize(model, feature, xs);
  compute_logits(model, xs, z);
  return z;
}

std::vector<double> predict_proba(const Model& model, std::span<const double> feature) {
  auto z = logits(model, feature);
  softmax_inplace(z);
  return z;
}

std::vector<std::size_t> rank_classes(const Model& model, std::span<const double> feature) {
  const auto z = logits(model, feature);
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  return order;
}

std::vector<std::string> predict_topk(const Model& model, std::span<const double> feature, std::size_t k) {
  const auto order = rank_classes(model, feature);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(model.labels[order[i]]);
  return out;
}

double gradient_check(const Model& model, std::span<const FeatureVector> batch,
                      std::span<const int> labels, double epsilon, double l2,
                      std::size_t samples, std::uint64_t seed) {
  const auto g = batch_gradient(model, batch, labels, l2);
  const std::size_t nw = model.weights.size();
  const std::size_t total = nw + model.bias.size();
  Rng rng(derive_seed(seed, "gradient_check"));
  Model probe = model;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto p = static_cast<std::size_t>(rng.below(total));
    double& param = p < nw ? probe.weights[p] : probe.bias[p - nw];
    const double analytic = p < nw ? g.weights[p] : g.bias[p - nw];
    const double saved = param;
    param = saved + epsilon;
    const double up = batch_loss(probe, batch, labels, l2);
    param = saved - epsilon;
    const double down = batch_loss(probe, batch, labels, l2);
    param = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  }
  return worst;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  nlohmann::ordered_json j;
  j["format"] = "signbias-linear-model";
  j["version"] = 1;
  j["dim"] = model.dim;
  j["classes"] = model.classes();
  j["labels"] = model.labels;
  j["feature_mean"] = model.feature_mean;
  j["feature_scale"] = model.feature_scale;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["loss_trace"] = model.loss_trace;
  write_text_file(path, j.dump() + "\n");
}

Model load_model(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": invalid model file: " + e.what());
  }
  if (j.value("format", "") != "signbias-linear-model" || j.value("version", 0) != 1) {
    throw SchemaError(path.string() + ": not a version-1 signbias model");
  }
  try {
    Model m;
    m.dim = j.at("dim").get<std::size_t>();
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
    m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<std::vector<double>>();
    m.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    if (m.feature_mean.size() != m.dim || m.feature_scale.size() != m.dim ||
        m.weights.size() != m.dim * m.labels.size() || m.bias.size() != m.labels.size()) {
      throw SchemaError(path.string() + ": parameter shapes do not match dim/classes");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace signbias
