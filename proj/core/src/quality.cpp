#include "signbias/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

namespace {

// r(a) = G(2/a)^2 / (G(1/a) G(3/a)), tabulated over the shape grid.
const std::vector<double>& shape_ratio_table() {
  static const std::vector<double> table = [] {
    const auto steps = static_cast<std::size_t>(
        std::llround((kShapeGridMax - kShapeGridMin) / kShapeGridStep));
    std::vector<double> t(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
      const double a = kShapeGridMin + static_cast<double>(k) * kShapeGridStep;
      t[k] = std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) - std::lgamma(3.0 / a));
    }
    return t;
  }();
  return table;
}

double grid_shape(std::size_t k) {
  return kShapeGridMin + static_cast<double>(k) * kShapeGridStep;
}

// Grid shape whose ratio is nearest the target (earliest on ties).
double invert_shape_ratio(double target) {
  const auto& table = shape_ratio_table();
  std::size_t best = 0;
  double best_diff = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double diff = std::abs(table[k] - target);
    if (diff < best_diff) {
      best_diff = diff;
      best = k;
    }
  }
  return grid_shape(best);
}

std::array<double, kMscnWindow> gaussian_kernel() {
  std::array<double, kMscnWindow> k{};
  const int r = static_cast<int>(kMscnWindow / 2);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[static_cast<std::size_t>(i + r)] =
        std::exp(-0.5 * (i * i) / (kMscnGaussSigma * kMscnGaussSigma));
    sum += k[static_cast<std::size_t>(i + r)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

std::size_t reflect101(long i, std::size_t n) {
  const long len = static_cast<long>(n);
  if (len == 1) return 0;
  while (i < 0 || i >= len) {
    if (i < 0) i = -i;
    if (i >= len) i = 2 * (len - 1) - i;
  }
  return static_cast<std::size_t>(i);
}

// Separable Gaussian blur with reflect-101 borders.
std::vector<double> blur(const std::vector<double>& src, std::size_t w, std::size_t h) {
  static const auto kernel = gaussian_kernel();
  const long r = static_cast<long>(kMscnWindow / 2);
  std::vector<double> tmp(src.size()), out(src.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long d = -r; d <= r; ++d) {
        acc += kernel[static_cast<std::size_t>(d + r)] *
               src[y * w + reflect101(static_cast<long>(x) + d, w)];
      }
      tmp[y * w + x] = acc;
    }
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long d = -r; d <= r; ++d) {
        acc += kernel[static_cast<std::size_t>(d + r)] *
               tmp[reflect101(static_cast<long>(y) + d, h) * w + x];
      }
      out[y * w + x] = acc;
    }
  }
  return out;
}

MscnField mscn_unchecked(const GrayImage& image) {
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  // Work on deviations from one pixel: the window weights only sum to 1 up to
  // rounding, and this keeps flat regions at exactly zero.
  const double ref = image.pixels().front();
  std::vector<double> dev(image.size()), dev_sq(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    dev[i] = image.pixels()[i] - ref;
    dev_sq[i] = dev[i] * dev[i];
  }
  const auto mu = blur(dev, w, h);
  const auto second = blur(dev_sq, w, h);
  MscnField field{w, h, std::vector<double>(image.size())};
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double var = std::max(0.0, second[i] - mu[i] * mu[i]);
    field.values[i] = (dev[i] - mu[i]) / (std::sqrt(var) + kMscnStabilizer);
  }
  return field;
}

AggdFit aggd_fit_unchecked(std::span<const double> samples) {
  double neg_sq = 0.0, pos_sq = 0.0, abs_sum = 0.0;
  std::size_t neg = 0, pos = 0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw DomainError("aggd_fit: non-finite sample");
    if (x < 0) {
      neg_sq += x * x;
      abs_sum -= x;
      ++neg;
    } else if (x > 0) {
      pos_sq += x * x;
      abs_sum += x;
      ++pos;
    }
  }
  if (neg == 0 && pos == 0) throw DegenerateFitError("aggd_fit: all samples are zero");
  if (neg == 0 || pos == 0) throw DegenerateFitError("aggd_fit: samples are one-sided");
  const double n = static_cast<double>(samples.size());
  const double sigma_l = std::sqrt(neg_sq / static_cast<double>(neg));
  const double sigma_r = std::sqrt(pos_sq / static_cast<double>(pos));
  const double g = sigma_l / sigma_r;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / ((neg_sq + pos_sq) / n);
  const double r_norm = r_hat * (g * g * g + 1.0) * (g + 1.0) / ((g * g + 1.0) * (g * g + 1.0));
  AggdFit fit;
  fit.alpha = invert_shape_ratio(r_norm);
  const double scale = std::exp(0.5 * (std::lgamma(1.0 / fit.alpha) - std::lgamma(3.0 / fit.alpha)));
  fit.beta_left = sigma_l * scale;
  fit.beta_right = sigma_r * scale;
  return fit;
}

GgdFit ggd_fit_unchecked(std::span<const double> samples) {
  double sq = 0.0, abs_sum = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw DomainError("ggd_fit: non-finite sample");
    sq += x * x;
    abs_sum += std::abs(x);
  }
  if (sq == 0.0) throw DegenerateFitError("ggd_fit: all samples are zero");
  const double n = static_cast<double>(samples.size());
  const double variance = sq / n;
  const double mean_abs = abs_sum / n;
  return {invert_shape_ratio(mean_abs * mean_abs / variance), variance};
}

GrayImage downsample2(const GrayImage& image) {
  const std::size_t w = image.width() / 2;
  const std::size_t h = image.height() / 2;
  GrayImage out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out.at(y, x) = 0.25 * (image.at(2 * y, 2 * x) + image.at(2 * y, 2 * x + 1) +
                             image.at(2 * y + 1, 2 * x) + image.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

void append_scale_features(const GrayImage& image, double* out) {
  const auto field = mscn_unchecked(image);
  try {
    const auto g = ggd_fit_unchecked(field.values);
    out[0] = g.alpha;
    out[1] = g.variance;
  } catch (const DegenerateFitError&) {
    out[0] = 2.0;
    out[1] = 0.0;
  }
  // H, V, D1 (down-right), D2 (down-left) neighbour offsets as (dy, dx).
  constexpr std::array<std::array<int, 2>, 4> shifts = {{{0, 1}, {1, 0}, {1, 1}, {1, -1}}};
  const long w = static_cast<long>(field.width);
  const long h = static_cast<long>(field.height);
  std::vector<double> products;
  products.reserve(field.values.size());
  for (std::size_t s = 0; s < shifts.size(); ++s) {
    products.clear();
    const int dy = shifts[s][0];
    const int dx = shifts[s][1];
    for (long y = 0; y < h; ++y) {
      for (long x = 0; x < w; ++x) {
        const long y2 = y + dy;
        const long x2 = x + dx;
        if (y2 < 0 || y2 >= h || x2 < 0 || x2 >= w) continue;
        products.push_back(field.values[static_cast<std::size_t>(y * w + x)] *
                           field.values[static_cast<std::size_t>(y2 * w + x2)]);
      }
    }
    double* slot = out + 2 + 4 * s;
    try {
      const auto fit = aggd_fit_unchecked(products);
      slot[0] = fit.alpha;
      slot[1] = fit.mean();
      slot[2] = fit.beta_left;
      slot[3] = fit.beta_right;
    } catch (const DegenerateFitError&) {
      slot[0] = 2.0;
      slot[1] = 0.0;
      slot[2] = 0.0;
      slot[3] = 0.0;
    }
  }
}

}  // namespace

double AggdFit::mean() const {
  return (beta_right - beta_left) * std::exp(std::lgamma(2.0 / alpha) - std::lgamma(1.0 / alpha));
}

MscnField mscn(const GrayImage& image) {
  if (image.width() < kMinMscnSide || image.height() < kMinMscnSide) {
    throw DomainError("mscn: image " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()) + " is smaller than 16x16");
  }
  return mscn_unchecked(image);
}

AggdFit aggd_fit(std::span<const double> samples) {
  if (samples.size() < kMinFitSamples) {
    throw DomainError("aggd_fit: need at least " + std::to_string(kMinFitSamples) + " samples, got " +
                      std::to_string(samples.size()));
  }
  return aggd_fit_unchecked(samples);
}

GgdFit ggd_fit(std::span<const double> samples) {
  if (samples.size() < kMinFitSamples) {
    throw DomainError("ggd_fit: need at least " + std::to_string(kMinFitSamples) + " samples");
  }
  return ggd_fit_unchecked(samples);
}

QualityFeatures brisque_features(const GrayImage& image) {
  if (image.width() < kMinMscnSide || image.height() < kMinMscnSide) {
    throw DomainError("brisque_features: image smaller than 16x16");
  }
  QualityFeatures features{};
  append_scale_features(image, features.data());
  append_scale_features(downsample2(image), features.data() + kQualityFeatureCount / 2);
  return features;
}

ScorerConfig ScorerConfig::default_linear() {
  ScorerConfig cfg;
  cfg.mode = ScorerMode::linear;
  cfg.weights.fill(0.0);
  // Calibrated on generated frames: the MSCN variance at both scales rises
  // with additive noise, giving roughly 15 (clean) to 80 (heavy noise).
  cfg.weights[1] = 55.0;
  cfg.weights[kQualityFeatureCount / 2 + 1] = 30.0;
  cfg.weights[kQualityFeatureCount] = 15.0;
  return cfg;
}

double linear_quality_score(const QualityFeatures& features, const ScorerConfig& scorer) {
  double s = scorer.weights[kQualityFeatureCount];
  for (std::size_t i = 0; i < kQualityFeatureCount; ++i) s += scorer.weights[i] * features[i];
  return std::clamp(s, 0.0, 100.0);
}

QualityScore quality_score(std::string_view video_id, const QualityFeatures& features,
                           const ScorerConfig& scorer) {
  if (scorer.mode == ScorerMode::external) {
    auto it = scorer.external.find(video_id);
    if (it == scorer.external.end()) {
      throw LookupError("no external quality score for video '" + std::string(video_id) + "'");
    }
    return {std::string(video_id), it->second};
  }
  return {std::string(video_id), linear_quality_score(features, scorer)};
}

std::vector<std::size_t> uniform_frame_indices(std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx;
  if (n == 0 || k == 0) return idx;
  if (k >= n) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t i = 0; i < k; ++i) idx.push_back((2 * i + 1) * n / (2 * k));
  return idx;
}

QualityScore video_quality(std::string_view video_id, const std::vector<GrayImage>& frames,
                           const ScorerConfig& scorer) {
  if (scorer.mode == ScorerMode::external) return quality_score(video_id, {}, scorer);
  if (frames.empty()) throw DomainError("video_quality: no frames for '" + std::string(video_id) + "'");
  const auto idx = uniform_frame_indices(frames.size(), std::max<std::size_t>(1, scorer.frames_per_video));
  double sum = 0.0;
  for (auto i : idx) sum += linear_quality_score(brisque_features(frames[i]), scorer);
  return {std::string(video_id), sum / static_cast<double>(idx.size())};
}

std::map<std::string, double, std::less<>> read_quality_table(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_id = table.column("video_id");
  const auto c_score = table.column("quality_score");
  std::map<std::string, double, std::less<>> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out[table.rows[r][c_id]] =
        parse_double(table.rows[r][c_score],
                     path.filename().string() + " row " + std::to_string(r + 1) + " column 'quality_score'");
  }
  return out;
}

void write_quality_table(const std::filesystem::path& path, const std::vector<QualityScore>& scores,
                         std::string_view provenance) {
  CsvWriter w(path, {"video_id", "quality_score"}, provenance);
  for (const auto& s : scores) w.write_row({s.video_id, format_double(s.brisque_like)});
  w.close();
}

}  // namespace signbias
