#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "signbias/errors.hpp"
#include "signbias/image.hpp"
#include "signbias/quality.hpp"
#include "signbias/rng.hpp"
#include "signbias/synth.hpp"
#include "test_util.hpp"

using namespace signbias;

namespace {

GrayImage noise_image(std::size_t w, std::size_t h, double mean, double sd, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = mean + sd * rng.normal();
  return img;
}

GrayImage smooth_image(std::size_t w, std::size_t h) {
  GrayImage img(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      img.at(y, x) = std::round(120.0 + 60.0 * std::sin(0.2 * static_cast<double>(x)) *
                                            std::cos(0.15 * static_cast<double>(y)));
    }
  }
  return img;
}

}  // namespace

TEST(Mscn, ConstantImageIsZero) {
  const auto f = mscn(GrayImage(20, 18, 137.0));
  for (double v : f.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(mscn(GrayImage(15, 40, 1.0)), DomainError);
}

TEST(Mscn, NoiseImageIsCentered) {
  const auto f = mscn(noise_image(128, 128, 128.0, 20.0, 1));
  double mean = 0;
  for (double v : f.values) mean += v;
  mean /= static_cast<double>(f.values.size());
  EXPECT_NEAR(mean, 0.0, 0.05);
}

TEST(Mscn, DeterministicOnCheckerboard) {
  GrayImage board(32, 32);
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 0; x < 32; ++x) board.at(y, x) = ((x / 4 + y / 4) % 2) ? 200.0 : 30.0;
  }
  const auto a = mscn(board);
  const auto b = mscn(board);
  EXPECT_EQ(a.values, b.values);
}

TEST(Mscn, OffsetInvarianceAtHighContrast) {
  auto img = noise_image(48, 48, 0.0, 5000.0, 2);
  auto shifted = img;
  for (auto& p : shifted.pixels()) p += 37.0;
  const auto a = mscn(img);
  const auto b = mscn(shifted);
  double worst = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  EXPECT_LT(worst, 0.02);
}

TEST(AggdFit, GaussianAndLaplacianShapes) {
  Rng rng(3);
  std::vector<double> gauss(100000), lap(100000);
  for (auto& x : gauss) x = rng.normal();
  for (auto& x : lap) x = rng.laplace(1.0);
  const auto g = aggd_fit(gauss);
  EXPECT_NEAR(g.alpha, 2.0, 0.15);
  EXPECT_NEAR(g.beta_left / g.beta_right, 1.0, 0.05);
  EXPECT_NEAR(aggd_fit(lap).alpha, 1.0, 0.15);
}

TEST(AggdFit, MirrorSymmetricSamplesGiveEqualScales) {
  Rng rng(4);
  std::vector<double> xs;
  for (int i = 0; i < 5000; ++i) {
    const double v = std::abs(rng.normal()) * rng.uniform(0.5, 2.0);
    xs.push_back(v);
    xs.push_back(-v);
  }
  const auto fit = aggd_fit(xs);
  EXPECT_LT(std::abs(fit.beta_left - fit.beta_right) / fit.beta_right, 1e-9);
  EXPECT_NEAR(fit.mean(), 0.0, 1e-9);
}

TEST(AggdFit, DegenerateInputs) {
  EXPECT_THROW(aggd_fit(std::vector<double>(200, 0.0)), DegenerateFitError);
  EXPECT_THROW(aggd_fit(std::vector<double>(200, 1.0)), DegenerateFitError);
  EXPECT_THROW(aggd_fit(std::vector<double>(50, 1.0)), DomainError);
}

TEST(GgdFit, RecoversShapeAndVariance) {
  Rng rng(5);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = 3.0 * rng.normal();
  const auto fit = ggd_fit(xs);
  EXPECT_NEAR(fit.alpha, 2.0, 0.1);
  EXPECT_NEAR(fit.variance, 9.0, 0.2);
}

TEST(BrisqueFeatures, DeterministicFallbackAndFinite) {
  const auto img = smooth_image(64, 48);
  EXPECT_EQ(brisque_features(img), brisque_features(img));

  const auto flat = brisque_features(GrayImage(32, 32, 90.0));
  for (std::size_t scale = 0; scale < 2; ++scale) {
    const double* f = flat.data() + 18 * scale;
    EXPECT_EQ(f[0], 2.0);
    EXPECT_EQ(f[1], 0.0);
    for (std::size_t o = 0; o < 4; ++o) {
      EXPECT_EQ(f[2 + 4 * o], 2.0);
      EXPECT_EQ(f[3 + 4 * o], 0.0);
      EXPECT_EQ(f[4 + 4 * o], 0.0);
      EXPECT_EQ(f[5 + 4 * o], 0.0);
    }
  }

  const auto noisy = brisque_features(noise_image(64, 64, 128.0, 30.0, 6));
  for (double v : noisy) EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(noisy[1], 0.0);
  EXPECT_GT(noisy[19], 0.0);
}

TEST(QualityScore, LinearAndExternalModes) {
  ScorerConfig flat;
  flat.weights.fill(0.0);
  flat.weights[kQualityFeatureCount] = 50.0;
  EXPECT_EQ(quality_score("v", brisque_features(smooth_image(32, 32)), flat).brisque_like, 50.0);

  ScorerConfig ext;
  ext.mode = ScorerMode::external;
  ext.external["v1"] = 73.5;
  EXPECT_EQ(video_quality("v1", {}, ext).brisque_like, 73.5);
  EXPECT_THROW(video_quality("v2", {}, ext), LookupError);
}

TEST(QualityScore, MonotoneInPositivelyWeightedFeatures) {
  const auto scorer = ScorerConfig::default_linear();
  QualityFeatures f{};
  f.fill(0.1);
  for (std::size_t i = 0; i < kQualityFeatureCount; ++i) {
    if (scorer.weights[i] <= 0) continue;
    auto g = f;
    g[i] += 0.2;
    EXPECT_GT(linear_quality_score(g, scorer), linear_quality_score(f, scorer));
  }
}

TEST(QualityScore, CorruptedFrameScoresHigher) {
  PoseSequence pose;
  for (int i = 0; i < 10; ++i) {
    PoseFrame f;
    f.t = i / 30.0;
    for (auto& p : f.kp) p = {0.5, 0.4};
    f.kp[KeypointSchema::kRightHandFirst] = {0.3 + 0.02 * i, 0.6};
    pose.frames.push_back(f);
  }
  const FrameSpec spec{64, 64, 3, 400.0};
  Rng r1(7), r2(7);
  const auto clean = generate_frames(pose, 0.0, spec, r1);
  const auto dirty = generate_frames(pose, 1.0, spec, r2);
  const auto scorer = ScorerConfig::default_linear();
  for (std::size_t i = 0; i < clean.size(); ++i) {
    EXPECT_GT(linear_quality_score(brisque_features(dirty[i]), scorer),
              linear_quality_score(brisque_features(clean[i]), scorer));
  }
  EXPECT_GT(video_quality("d", dirty, scorer).brisque_like, video_quality("c", clean, scorer).brisque_like);
}

TEST(QualityScore, UniformFrameIndices) {
  EXPECT_EQ(uniform_frame_indices(10, 5), (std::vector<std::size_t>{1, 3, 5, 7, 9}));
  EXPECT_EQ(uniform_frame_indices(3, 5), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(uniform_frame_indices(100, 1), (std::vector<std::size_t>{50}));
  EXPECT_TRUE(uniform_frame_indices(0, 5).empty());
}

TEST(Pgm, MultiFrameRoundTrip) {
  testutil::TempDir dir("pgm");
  std::vector<GrayImage> frames = {smooth_image(20, 17), noise_image(16, 16, 100, 10, 8)};
  for (auto& f : frames) {
    for (auto& p : f.pixels()) p = std::clamp(std::round(p), 0.0, 255.0);
  }
  write_pgm_frames(dir.path() / "v.pgm", frames);
  EXPECT_EQ(read_pgm_frames(dir.path() / "v.pgm"), frames);
  EXPECT_THROW(decode_pgm_stream("P6\n2 2\n255\nxxxx", "mem"), SchemaError);
}
