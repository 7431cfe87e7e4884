#include <gtest/gtest.h>

#include "signbias/errors.hpp"
#include "signbias/pose.hpp"
#include "test_util.hpp"

using namespace signbias;

TEST(Pose, JsonlRoundTripIsExact) {
  const auto seq = testutil::random_walk(40, 30.0, 2);
  const auto text = format_pose_jsonl(seq);
  EXPECT_EQ(text.substr(0, text.find('\n')), pose_schema_header());
  EXPECT_EQ(parse_pose_jsonl(text, "mem"), seq);

  testutil::TempDir dir("pose");
  write_pose_file(dir.path() / "a.jsonl", seq);
  EXPECT_EQ(read_pose_file(dir.path() / "a.jsonl"), seq);
}

TEST(Pose, HeaderDeclaresLayout) {
  const auto h = pose_schema_header();
  EXPECT_NE(h.find("pose27-v1"), std::string::npos);
  EXPECT_NE(h.find("\"left_hand\":[7,17]"), std::string::npos);
  EXPECT_NE(h.find("\"right_hand\":[17,27]"), std::string::npos);
}

TEST(Pose, MalformedFramesRejected) {
  const std::string header = pose_schema_header() + "\n";
  EXPECT_THROW(parse_pose_jsonl(header + "{\"t\":0,\"kp\":[[0,0]]}\n", "mem"), SchemaError);
  EXPECT_THROW(parse_pose_jsonl(header + "not json\n", "mem"), SchemaError);
  EXPECT_THROW(parse_pose_jsonl("{\"schema\":\"other\"}\n", "mem"), SchemaError);
}

TEST(Pose, TimestampsMustIncrease) {
  auto seq = testutil::random_walk(5, 30.0, 3);
  EXPECT_NO_THROW(validate_pose_sequence(seq));
  seq.frames[3].t = seq.frames[2].t;
  EXPECT_THROW(validate_pose_sequence(seq), DomainError);
  EXPECT_THROW(parse_pose_jsonl(format_pose_jsonl(seq), "mem"), DomainError);
}

TEST(Pose, HandTrajectoryPicksBlocks) {
  const auto seq = testutil::make_sequence(3, 30.0, [](std::size_t i, std::size_t k) {
    return Point{static_cast<double>(k), static_cast<double>(i)};
  });
  const auto lh = hand_trajectory(seq, Hand::left);
  const auto rh = hand_trajectory(seq, Hand::right);
  ASSERT_EQ(lh.size(), 3u);
  EXPECT_EQ(lh.points[0][0].x, 7.0);
  EXPECT_EQ(lh.points[0][9].x, 16.0);
  EXPECT_EQ(rh.points[2][0].x, 17.0);
  EXPECT_EQ(rh.points[2][0].y, 2.0);
  EXPECT_DOUBLE_EQ(rh.t[1], 1.0 / 30.0);
}
