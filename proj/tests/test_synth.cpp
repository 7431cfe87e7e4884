#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/pose_metrics.hpp"
#include "signbias/stats.hpp"
#include "signbias/synth.hpp"
#include "test_util.hpp"

using namespace signbias;

namespace {

GenConfig quick(std::uint64_t seed) {
  GenConfig g;
  g.seed = seed;
  g.participants = 40;
  g.videos_per_participant = 50;  // 2 000 videos
  g.frames = false;
  return g;
}

struct Gap {
  double diff;
  double se;
};

// Mean per-gloss length z of male minus female videos, with its standard error.
Gap gender_length_gap(const Dataset& d) {
  const auto stats = sign_length_stats(d);
  double sum[2] = {0, 0}, sq[2] = {0, 0}, n[2] = {0, 0};
  for (const auto& v : d.videos()) {
    if (v.is_seed) continue;
    const auto& s = stats.at(v.gloss_id);
    if (s.sd_length_s <= 0) continue;
    const double z = (v.length_s - s.mean_length_s) / s.sd_length_s;
    const auto g = d.participant_of(v).gender;
    if (g == Gender::unspecified) continue;
    sum[g == Gender::male] += z;
    sq[g == Gender::male] += z * z;
    n[g == Gender::male] += 1;
  }
  double var = 0;
  for (int k = 0; k < 2; ++k) {
    const double m = sum[k] / n[k];
    var += (sq[k] / n[k] - m * m) / n[k];
  }
  return {sum[1] / n[1] - sum[0] / n[0], std::sqrt(var)};
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return files;
}

}  // namespace

TEST(Prototype, DeterministicDistinctAndTimed) {
  const auto a = prototype_trajectory(3, 77);
  EXPECT_EQ(a, prototype_trajectory(3, 77));
  const auto b = prototype_trajectory(4, 77);
  EXPECT_GT(discrete_frechet(hand_trajectory(a, Hand::right), hand_trajectory(b, Hand::right)), 1e-6);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_NEAR(a.frames[i].t - a.frames[i - 1].t, 1.0 / 30.0, 1e-12);
  }
  EXPECT_GE(a.duration(), 1.0 - 1.0 / 30.0);
  EXPECT_LE(a.duration(), 3.0);
  EXPECT_EQ(a.frames[0].kp[KeypointSchema::kLeftShoulder], (Point{-0.5, 0.0}));
}

TEST(Generate, NullEffectsGiveNoGenderGap) {
  auto g = quick(101);
  g.gender_length_offset = 0.0;
  const auto d = generate(g).dataset;
  EXPECT_GE(d.size(), 2000u);
  const auto gap = gender_length_gap(d);
  EXPECT_LT(gap.se, 0.06);
  EXPECT_LT(std::abs(gap.diff), 4 * gap.se);
}

TEST(Generate, PlantedGenderOffsetIsRecovered) {
  auto g = quick(102);
  g.gender_length_offset = 0.5;
  const auto gap = gender_length_gap(generate(g).dataset);
  EXPECT_NEAR(gap.diff, 0.5, 4 * gap.se);
}

TEST(Generate, GroundTruthCoversEveryVideo) {
  auto g = quick(103);
  g.participants = 12;
  g.videos_per_participant = 10;
  const auto res = generate(g);
  ASSERT_EQ(res.truth.rows.size(), res.dataset.size());
  for (std::size_t i = 0; i < res.dataset.size(); ++i) {
    EXPECT_EQ(res.truth.rows[i].video_id, res.dataset.videos()[i].video_id);
    EXPECT_GE(res.truth.rows[i].noise_level, 0.0);
  }
  // Seed signer: one video per gloss, all in train.
  std::set<std::string> seeded;
  for (const auto& v : res.dataset.videos()) {
    if (!v.is_seed) continue;
    EXPECT_EQ(v.split, Split::train);
    seeded.insert(v.gloss_id);
  }
  EXPECT_EQ(seeded.size(), g.glosses);
}

TEST(Generate, SplitsAreByParticipant) {
  const auto d = generate(quick(104)).dataset;
  std::map<std::string, std::set<Split>> splits;
  std::map<Split, std::size_t> counts;
  for (const auto& v : d.videos()) {
    splits[v.participant_id].insert(v.split);
    if (!v.is_seed) ++counts[v.split];
  }
  for (const auto& [p, s] : splits) EXPECT_EQ(s.size(), 1u) << p;
  const double total = static_cast<double>(counts[Split::train] + counts[Split::val] + counts[Split::test]);
  EXPECT_NEAR(counts[Split::test] / total, 0.2, 0.06);
}

TEST(Generate, PlantedQualityEffectIsDetectable) {
  // Keypoint noise grows with the quality factor; mean |delta| of the wrist
  // path should rank-correlate with the planted factor.
  auto g = quick(105);
  const auto res = generate(g);
  std::vector<double> q, jitter;
  for (std::size_t i = 0; i < res.dataset.size(); ++i) {
    if (res.dataset.videos()[i].is_seed) continue;
    q.push_back(res.truth.rows[i].noise_level);
    jitter.push_back(signing_speed(normalize_pose(res.dataset.pose(i)), Hand::right));
  }
  const auto r = spearman(q, jitter);
  EXPECT_GT(r.rho, 0.0);
  EXPECT_LT(r.p_value, 0.01);
}

TEST(Generate, DeterministicTreeAndThreadIndependent) {
  auto g = quick(106);
  g.participants = 6;
  g.videos_per_participant = 5;
  g.glosses = 10;
  g.frames = true;
  testutil::TempDir a("gen_a"), b("gen_b");
  generate(g, a.path(), 1, "signbias config_hash=x seed=106");
  generate(g, b.path(), 3, "signbias config_hash=x seed=106");
  const auto ta = read_tree(a.path());
  EXPECT_EQ(ta, read_tree(b.path()));
  EXPECT_TRUE(ta.count("ground_truth.csv"));
  const auto truth = read_ground_truth(a.path() / "ground_truth.csv");
  EXPECT_EQ(truth.rows.size(), load_dataset_dir(a.path()).size());
}

TEST(Generate, InvalidConfigRejected) {
  GenConfig g;
  g.participants = 0;
  EXPECT_THROW(validate(g), UsageError);
  g = GenConfig{};
  g.female_fraction = 1.5;
  EXPECT_THROW(validate(g), UsageError);
  g = GenConfig{};
  g.train_fraction = 0.95;
  EXPECT_THROW(validate(g), UsageError);
  g = GenConfig{};
  g.quality_hand_collapse = 1.5;
  EXPECT_THROW(validate(g), UsageError);
  g = GenConfig{};
  g.gender_variant_sd = -0.1;
  EXPECT_THROW(validate(g), UsageError);
}

namespace {

GenConfig noiseless(std::uint64_t seed) {
  auto g = quick(seed);
  g.participants = 10;
  g.videos_per_participant = 8;
  g.glosses = 8;
  g.base_keypoint_noise = 0.0;
  g.quality_error_coupling = 0.0;
  g.quality_hand_collapse = 0.0;
  g.gender_variant_sd = 0.0;
  return g;
}

Point hand_centroid(const PoseFrame& f, Hand hand) {
  Point c{0, 0};
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    c.x += f.kp[KeypointSchema::hand_first(hand) + k].x / kHandKeypoints;
    c.y += f.kp[KeypointSchema::hand_first(hand) + k].y / kHandKeypoints;
  }
  return c;
}

double hand_spread(const PoseFrame& f, Hand hand) {
  const Point c = hand_centroid(f, hand);
  double s = 0;
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    const auto& p = f.kp[KeypointSchema::hand_first(hand) + k];
    s += std::hypot(p.x - c.x, p.y - c.y);
  }
  return s;
}

}  // namespace

TEST(Generate, HandCollapseScalesWithQuality) {
  auto g = noiseless(108);
  const auto plain = generate(g);
  g.quality_hand_collapse = 0.8;
  const auto collapsed = generate(g);
  ASSERT_EQ(plain.dataset.size(), collapsed.dataset.size());
  for (std::size_t i = 0; i < plain.dataset.size(); ++i) {
    const double q = collapsed.truth.rows[i].quality_factor;
    const auto& a = plain.dataset.pose(i).frames[0];
    const auto& b = collapsed.dataset.pose(i).frames[0];
    EXPECT_NEAR(hand_spread(b, Hand::right) / hand_spread(a, Hand::right), 1.0 - 0.8 * std::min(q, 1.0), 1e-3);
    // The centroid itself does not move.
    EXPECT_NEAR(hand_centroid(a, Hand::left).x, hand_centroid(b, Hand::left).x, 1e-4);
  }
}

TEST(Generate, GenderVariantsMoveHandsInOppositeDirections) {
  auto g = noiseless(109);
  const auto base = generate(g);
  g.gender_variant_sd = 0.05;
  const auto shifted = generate(g);
  // Per gloss, the summed centroid displacement of female and male videos.
  std::map<std::string, Point> female, male;
  for (std::size_t i = 0; i < base.dataset.size(); ++i) {
    const auto& v = base.dataset.videos()[i];
    const auto gender = base.dataset.participant_of(v).gender;
    const Point a = hand_centroid(base.dataset.pose(i).frames[0], Hand::right);
    const Point b = hand_centroid(shifted.dataset.pose(i).frames[0], Hand::right);
    if (v.is_seed || gender == Gender::unspecified) {
      EXPECT_NEAR(a.x, b.x, 1e-4);
      continue;
    }
    auto& acc = gender == Gender::female ? female[v.gloss_id] : male[v.gloss_id];
    acc.x += b.x - a.x;
    acc.y += b.y - a.y;
  }
  std::size_t compared = 0;
  for (const auto& [gloss, f] : female) {
    if (!male.count(gloss)) continue;
    const auto& m = male[gloss];
    EXPECT_LT(f.x * m.x + f.y * m.y, 0.0) << gloss;
    ++compared;
  }
  EXPECT_GT(compared, 4u);
}

TEST(Frames, CleanBaseAndNoiseVariance) {
  PoseSequence pose;
  for (int i = 0; i < 6; ++i) {
    PoseFrame f;
    f.t = i / 30.0;
    for (auto& p : f.kp) p = {0.5, 0.4};
    pose.frames.push_back(f);
  }
  FrameSpec spec{48, 40, 3, 400.0};
  Rng r0(9);
  const auto clean = generate_frames(pose, 0.0, spec, r0);
  ASSERT_EQ(clean.size(), 3u);
  // Static pose and no noise: every frame is the same base image.
  EXPECT_EQ(clean[0], clean[2]);
  EXPECT_EQ(clean[0].width(), 48u);

  const auto residual_var = [&](double q) {
    Rng r(9);
    const auto noisy = generate_frames(pose, q, spec, r);
    double ss = 0, n = 0;
    for (std::size_t i = 0; i < noisy[0].size(); ++i) {
      const double d = noisy[0].pixels()[i] - clean[0].pixels()[i];
      ss += d * d;
      n += 1;
    }
    return ss / n;
  };
  const double v1 = residual_var(0.2), v2 = residual_var(0.8);
  EXPECT_GT(v1, 0.0);
  EXPECT_GT(v2, v1);

  Rng x(5), y(5);
  EXPECT_EQ(generate_frames(pose, 0.5, spec, x), generate_frames(pose, 0.5, spec, y));
}
