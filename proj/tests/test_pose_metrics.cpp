#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "signbias/errors.hpp"
#include "signbias/pose_metrics.hpp"
#include "signbias/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace signbias;

namespace {

using HandPts = std::array<Point, kHandKeypoints>;

HandTrajectory random_curve(Rng& rng, std::size_t n) {
  HandTrajectory c;
  for (std::size_t i = 0; i < n; ++i) {
    HandPts p;
    for (auto& q : p) q = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    c.points.push_back(p);
    c.t.push_back(static_cast<double>(i));
  }
  return c;
}

double naive_distance(const HandPts& a, const HandPts& b) {
  double s = 0;
  for (std::size_t k = 0; k < kHandKeypoints; ++k) s += std::hypot(a[k].x - b[k].x, a[k].y - b[k].y);
  return s / kHandKeypoints;
}

HandTrajectory transformed(const HandTrajectory& c, double scale, Point shift) {
  HandTrajectory out = c;
  for (auto& p : out.points) {
    for (auto& q : p) q = {scale * q.x + shift.x, scale * q.y + shift.y};
  }
  return out;
}

}  // namespace

TEST(NormalizePose, HandGeometry) {
  const auto seq = testutil::make_sequence(1, 30.0, [](std::size_t, std::size_t k) {
    if (k == 0) return Point{0, 0};
    if (k == 1) return Point{2, 0};
    return Point{1, 1};
  });
  const auto n = normalize_pose(seq);
  EXPECT_DOUBLE_EQ(n.frames[0].kp[0].x, -0.5);
  EXPECT_DOUBLE_EQ(n.frames[0].kp[1].x, 0.5);
  EXPECT_DOUBLE_EQ(n.frames[0].kp[5].x, 0.0);
  EXPECT_DOUBLE_EQ(n.frames[0].kp[5].y, 0.5);
}

TEST(NormalizePose, FixedPointIdempotentAndUnitShoulders) {
  const auto walk = testutil::random_walk(20, 30.0, 4);
  EXPECT_EQ(normalize_pose(walk), walk);  // random_walk already has unit centered shoulders
  auto shifted = testutil::make_sequence(10, 30.0, [](std::size_t i, std::size_t k) {
    return Point{3.0 * static_cast<double>(k) + 0.1 * static_cast<double>(i), 2.0 - static_cast<double>(k * k) * 0.01};
  });
  const auto once = normalize_pose(shifted);
  const auto twice = normalize_pose(once);
  for (std::size_t f = 0; f < once.size(); ++f) {
    const auto& kp = once.frames[f].kp;
    EXPECT_NEAR(std::hypot(kp[1].x - kp[0].x, kp[1].y - kp[0].y), 1.0, 1e-9);
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      EXPECT_NEAR(twice.frames[f].kp[k].x, kp[k].x, 1e-12);
      EXPECT_NEAR(twice.frames[f].kp[k].y, kp[k].y, 1e-12);
    }
  }
}

TEST(NormalizePose, CoincidentShouldersReportFrame) {
  auto seq = testutil::random_walk(5, 30.0, 5);
  seq.frames[3].kp[1] = seq.frames[3].kp[0];
  try {
    (void)normalize_pose(seq);
    FAIL() << "expected DegenerateFrameError";
  } catch (const DegenerateFrameError& e) {
    EXPECT_EQ(e.frame_index(), 3u);
  }
}

TEST(SampleAtInterval, CountsAndBoundaries) {
  const auto three_s = testutil::random_walk(91, 30.0, 6);  // 0 .. 3 s
  EXPECT_EQ(sample_at_interval(three_s).size(), 13u);
  const auto short_seq = testutil::random_walk(5, 30.0, 6);
  EXPECT_EQ(sample_at_interval(short_seq, 1.0).size(), 1u);
  const auto quarter = testutil::random_walk(9, 4.0, 7);
  EXPECT_EQ(sample_at_interval(quarter), quarter);
}

TEST(SampleAtInterval, NearestFrameTiesGoEarlier) {
  PoseSequence seq = testutil::random_walk(3, 1.0, 8);
  seq.frames[0].t = 0.0;
  seq.frames[1].t = 0.125;
  seq.frames[2].t = 0.375;  // target 0.25 is equidistant from both
  const auto s = sample_at_interval(seq);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.frames[1].kp, seq.frames[1].kp);
}

TEST(PoseDistance, TranslationAndOracle) {
  const auto a = testutil::random_walk(1, 30.0, 9).frames[0];
  auto b = a;
  for (std::size_t k = KeypointSchema::kRightHandFirst; k < KeypointSchema::kRightHandFirst + kHandKeypoints; ++k) {
    b.kp[k].x += 3.0;
    b.kp[k].y += 4.0;
  }
  EXPECT_DOUBLE_EQ(pose_distance(a, a, Hand::right), 0.0);
  EXPECT_NEAR(pose_distance(a, b, Hand::right), 5.0, 1e-12);
  EXPECT_DOUBLE_EQ(pose_distance(a, b, Hand::left), 0.0);

  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    HandPts p, q;
    for (std::size_t k = 0; k < kHandKeypoints; ++k) {
      p[k] = {rng.normal(), rng.normal()};
      q[k] = {rng.normal(), rng.normal()};
    }
    EXPECT_NEAR(pose_distance(p, q), naive_distance(p, q), 1e-12);
  }
}

TEST(DiscreteFrechet, MatchesCouplingEnumeration) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_curve(rng, 1 + rng.below(6));
    const auto b = random_curve(rng, 1 + rng.below(6));
    ASSERT_EQ(discrete_frechet(a, b), oracle::frechet_by_enumeration(a, b)) << "trial " << trial;
  }
}

TEST(DiscreteFrechet, MetricProperties) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_curve(rng, 2 + rng.below(20));
    const auto b = random_curve(rng, 2 + rng.below(20));
    const double d = discrete_frechet(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_EQ(d, discrete_frechet(b, a));
    EXPECT_EQ(discrete_frechet(a, a), 0.0);
    EXPECT_GE(d, naive_distance(a.points.front(), b.points.front()));
    EXPECT_GE(d, naive_distance(a.points.back(), b.points.back()));
    const Point shift{rng.normal(), rng.normal()};
    EXPECT_NEAR(discrete_frechet(transformed(a, 1.0, shift), transformed(b, 1.0, shift)), d, 1e-12);
    EXPECT_NEAR(discrete_frechet(transformed(a, 2.5, {}), transformed(b, 2.5, {})), 2.5 * d, 1e-12);
  }
}

TEST(DiscreteFrechet, SinglePointsAndEmpty) {
  Rng rng(14);
  const auto a = random_curve(rng, 1);
  const auto b = random_curve(rng, 1);
  EXPECT_DOUBLE_EQ(discrete_frechet(a, b), naive_distance(a.points[0], b.points[0]));
  EXPECT_THROW(discrete_frechet(a, HandTrajectory{}), DomainError);
}

TEST(SeedDivergence, IdentityShiftAndOracle) {
  const auto seed = testutil::random_walk(60, 30.0, 15);
  EXPECT_EQ(seed_divergence(seed, seed, Hand::right), 0.0);
  auto shifted = seed;
  for (auto& f : shifted.frames) {
    for (std::size_t k = 0; k < kHandKeypoints; ++k) f.kp[KeypointSchema::kLeftHandFirst + k].y += 0.1;
  }
  EXPECT_NEAR(seed_divergence(shifted, seed, Hand::left), 0.1, 1e-12);

  const auto video = testutil::random_walk(45, 30.0, 16);
  const auto sv = sample_at_interval(video);
  const auto ss = sample_at_interval(seed);
  const std::size_t m = std::min(sv.size(), ss.size());
  double sum = 0;
  for (std::size_t i = 0; i < m; ++i) sum += pose_distance(sv.frames[i], ss.frames[i], Hand::right);
  EXPECT_NEAR(seed_divergence(video, seed, Hand::right), sum / static_cast<double>(m), 1e-12);
  EXPECT_NEAR(seed_truncation_fraction(seed, video),
              1.0 - static_cast<double>(m) / static_cast<double>(ss.size()), 1e-12);
}

TEST(SigningSpeed, StaticLinearAndOracle) {
  const auto still = testutil::make_sequence(61, 30.0, [](std::size_t, std::size_t k) {
    return Point{static_cast<double>(k), 1.0};
  });
  EXPECT_EQ(signing_speed(still, Hand::right), 0.0);
  const auto moving = testutil::make_sequence(61, 30.0, [](std::size_t i, std::size_t k) {
    return Point{static_cast<double>(k) + 0.4 * static_cast<double>(i) / 30.0, 0.0};
  });
  EXPECT_NEAR(signing_speed(moving, Hand::right), 0.1, 1e-12);

  const auto walk = testutil::random_walk(90, 30.0, 17);
  const auto s = sample_at_interval(walk);
  double sum = 0;
  for (std::size_t i = 1; i < s.size(); ++i) sum += pose_distance(s.frames[i - 1], s.frames[i], Hand::left);
  const double speed = signing_speed(walk, Hand::left);
  EXPECT_NEAR(speed, sum / static_cast<double>(s.size() - 1), 1e-12);
  EXPECT_GT(speed, 0.0);
  EXPECT_THROW(signing_speed(testutil::random_walk(3, 30.0, 1), Hand::left), DomainError);
}

TEST(ZScore, Arithmetic) {
  EXPECT_EQ(zscore(2.0, {2.0, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(zscore(2.5, {2.0, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(zscore(2.5, {2.0, 0.25}), 2.0);
  EXPECT_EQ(zscore(7.0, {2.0, 0.0}), 0.0);
  const auto ms = population_mean_sd({1.0, 3.0});
  EXPECT_DOUBLE_EQ(ms.mean, 2.0);
  EXPECT_DOUBLE_EQ(ms.sd, 1.0);
}

TEST(TrajectoryFeatures, SyntheticDatasetAndCsvRoundTrip) {
  GenConfig g;
  g.participants = 6;
  g.glosses = 5;
  g.videos_per_participant = 4;
  g.frames = false;
  const auto gen = generate(g);
  const auto summary = compute_trajectory_features(gen.dataset, 2);
  ASSERT_EQ(summary.rows.size(), gen.dataset.size());
  EXPECT_EQ(summary.missing_seed, 0u);
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const auto& r = summary.rows[i];
    const auto& v = gen.dataset.videos()[i];
    EXPECT_EQ(r.video_id, v.video_id);
    ASSERT_TRUE(r.seed_div_rh.has_value());
    if (v.is_seed) EXPECT_EQ(*r.seed_div_rh, 0.0);
  }
  testutil::TempDir dir("traj");
  write_trajectory_features(dir.path() / "f.csv", summary.rows, "signbias seed=1");
  const auto back = read_trajectory_features(dir.path() / "f.csv");
  ASSERT_EQ(back.size(), summary.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    auto expected = summary.rows[i];
    expected.seed_truncated_fraction = 0.0;  // not serialized
    EXPECT_EQ(back[i], expected);
  }
}

TEST(TrajectoryFeatures, MissingSeedLeavesDivergenceEmpty) {
  GenConfig g;
  g.participants = 4;
  g.glosses = 3;
  g.videos_per_participant = 3;
  g.frames = false;
  g.seed_signer = false;
  const auto summary = compute_trajectory_features(generate(g).dataset);
  EXPECT_EQ(summary.missing_seed, summary.rows.size());
  for (const auto& r : summary.rows) EXPECT_FALSE(r.seed_div_lh.has_value());
}
