#include "signbias/pose.hpp"

#include <json.hpp>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

std::string_view to_string(Hand hand) noexcept {
  return hand == Hand::left ? "left" : "right";
}

HandTrajectory hand_trajectory(const PoseSequence& seq, Hand hand) {
  HandTrajectory traj;
  traj.hand = hand;
  traj.t.reserve(seq.size());
  traj.points.reserve(seq.size());
  const std::size_t first = KeypointSchema::hand_first(hand);
  for (const auto& frame : seq.frames) {
    traj.t.push_back(frame.t);
    std::array<Point, kHandKeypoints> pts{};
    for (std::size_t k = 0; k < kHandKeypoints; ++k) pts[k] = frame.kp[first + k];
    traj.points.push_back(pts);
  }
  return traj;
}

void validate_pose_sequence(const PoseSequence& seq, std::string_view context) {
  for (std::size_t i = 1; i < seq.frames.size(); ++i) {
    if (!(seq.frames[i].t > seq.frames[i - 1].t)) {
      throw DomainError(std::string(context) + ": timestamps not strictly increasing at frame " +
                        std::to_string(i));
    }
  }
}

std::string pose_schema_header() {
  nlohmann::ordered_json header;
  header["schema"] = std::string(KeypointSchema::kName);
  header["keypoints"] = kNumKeypoints;
  header["shoulders"] = {KeypointSchema::kLeftShoulder, KeypointSchema::kRightShoulder};
  header["left_hand"] = {KeypointSchema::kLeftHandFirst,
                         KeypointSchema::kLeftHandFirst + kHandKeypoints};
  header["right_hand"] = {KeypointSchema::kRightHandFirst,
                          KeypointSchema::kRightHandFirst + kHandKeypoints};
  return header.dump();
}

std::string format_pose_jsonl(const PoseSequence& seq) {
  std::string out = pose_schema_header();
  out.push_back('\n');
  out.reserve(out.size() + seq.size() * 480);
  for (const auto& frame : seq.frames) {
    out += "{\"t\":";
    out += format_double(frame.t);
    out += ",\"kp\":[";
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      if (k) out.push_back(',');
      out.push_back('[');
      out += format_double(frame.kp[k].x);
      out.push_back(',');
      out += format_double(frame.kp[k].y);
      out.push_back(']');
    }
    out += "]}\n";
  }
  return out;
}

void write_pose_file(const std::filesystem::path& path, const PoseSequence& seq) {
  write_text_file(path, format_pose_jsonl(seq));
}

namespace {

void check_header(const nlohmann::json& header, std::string_view source) {
  const auto schema = header.find("schema");
  if (schema == header.end() || !schema->is_string()) {
    throw SchemaError(std::string(source) + ": first line must be a {\"schema\": ...} header");
  }
  if (schema->get<std::string>() != KeypointSchema::kName) {
    throw SchemaError(std::string(source) + ": unsupported pose schema '" +
                      schema->get<std::string>() + "'");
  }
  const auto check_range = [&](const char* key, std::size_t first) {
    auto it = header.find(key);
    if (it == header.end()) return;
    if (!it->is_array() || it->size() != 2 || (*it)[0].get<std::size_t>() != first ||
        (*it)[1].get<std::size_t>() != first + kHandKeypoints) {
      throw SchemaError(std::string(source) + ": '" + key + "' block does not match " +
                        std::string(KeypointSchema::kName));
    }
  };
  check_range("left_hand", KeypointSchema::kLeftHandFirst);
  check_range("right_hand", KeypointSchema::kRightHandFirst);
}

}  // namespace

PoseSequence parse_pose_jsonl(std::string_view text, std::string_view source) {
  PoseSequence seq;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line == "\r") continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                        ": invalid JSON: " + e.what());
    }
    if (!have_header) {
      check_header(obj, source);
      have_header = true;
      continue;
    }
    const auto t = obj.find("t");
    const auto kp = obj.find("kp");
    if (t == obj.end() || !t->is_number() || kp == obj.end() || !kp->is_array()) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                        ": frame needs numeric 't' and array 'kp'");
    }
    if (kp->size() != kNumKeypoints) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(kNumKeypoints) + " keypoints, got " +
                        std::to_string(kp->size()));
    }
    PoseFrame frame;
    frame.t = t->get<double>();
    for (std::size_t k = 0; k < kNumKeypoints; ++k) {
      const auto& pt = (*kp)[k];
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                          ": keypoint " + std::to_string(k) + " must be [x, y]");
      }
      frame.kp[k] = {pt[0].get<double>(), pt[1].get<double>()};
    }
    seq.frames.push_back(frame);
  }
  if (!have_header) throw SchemaError(std::string(source) + ": empty pose file");
  validate_pose_sequence(seq, source);
  return seq;
}

PoseSequence read_pose_file(const std::filesystem::path& path) {
  return parse_pose_jsonl(read_text_file(path), path.string());
}

}  // namespace signbias
