#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signbias {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr std::size_t kNumKeypoints = 27;
inline constexpr std::size_t kHandKeypoints = 10;

using Keypoints = std::array<Point, kNumKeypoints>;

enum class Hand { left, right };

std::string_view to_string(Hand hand) noexcept;

// Fixed 27-point layout ("pose27-v1"):
//   0 left shoulder, 1 right shoulder, 2 nose, 3 left eye, 4 right eye,
//   5 left elbow, 6 right elbow, 7..16 left hand (wrist first),
//   17..26 right hand (wrist first).
struct KeypointSchema {
  static constexpr std::string_view kName = "pose27-v1";
  static constexpr std::size_t kLeftShoulder = 0;
  static constexpr std::size_t kRightShoulder = 1;
  static constexpr std::size_t kLeftHandFirst = 7;
  static constexpr std::size_t kRightHandFirst = 17;

  static constexpr std::size_t hand_first(Hand hand) noexcept {
    return hand == Hand::left ? kLeftHandFirst : kRightHandFirst;
  }
};

struct PoseFrame {
  double t = 0.0;
  Keypoints kp{};
  friend bool operator==(const PoseFrame&, const PoseFrame&) = default;
};

struct PoseSequence {
  std::vector<PoseFrame> frames;

  bool empty() const noexcept { return frames.empty(); }
  std::size_t size() const noexcept { return frames.size(); }
  double duration() const noexcept {
    return frames.size() < 2 ? 0.0 : frames.back().t - frames.front().t;
  }
  friend bool operator==(const PoseSequence&, const PoseSequence&) = default;
};

// One hand's keypoints over time, extracted from a PoseSequence.
struct HandTrajectory {
  Hand hand = Hand::right;
  std::vector<double> t;
  std::vector<std::array<Point, kHandKeypoints>> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

HandTrajectory hand_trajectory(const PoseSequence& seq, Hand hand);

// Throws DomainError when timestamps are not strictly increasing.
void validate_pose_sequence(const PoseSequence& seq, std::string_view context = {});

// JSON Lines pose file: a {"schema": ...} header line, then one
// {"t": seconds, "kp": [[x, y] x 27]} object per frame.
PoseSequence read_pose_file(const std::filesystem::path& path);
PoseSequence parse_pose_jsonl(std::string_view text, std::string_view source);
std::string pose_schema_header();
std::string format_pose_jsonl(const PoseSequence& seq);
void write_pose_file(const std::filesystem::path& path, const PoseSequence& seq);

}  // namespace signbias
