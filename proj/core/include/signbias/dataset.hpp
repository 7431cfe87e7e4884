#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "signbias/pose.hpp"

namespace signbias {

enum class Gender { female, male, unspecified };
enum class Region { northeast, midwest, south, west, unspecified };
enum class Split { train, val, test };

std::string_view to_string(Gender g) noexcept;
std::string_view to_string(Region r) noexcept;
std::string_view to_string(Split s) noexcept;
Gender parse_gender(std::string_view text);
Region parse_region(std::string_view text);
Split parse_split(std::string_view text);

struct Participant {
  std::string participant_id;
  Gender gender = Gender::unspecified;
  std::optional<int> age_decade;  // 20, 30, ..., 70
  Region region = Region::unspecified;
  std::optional<int> asl_level;  // 1..7
  friend bool operator==(const Participant&, const Participant&) = default;
};

struct SignEntry {
  std::string gloss_id;
  double frequency = 1.0;  // 1..7
  double iconicity = 1.0;  // 1..7
  int phonological_complexity = 0;  // 0..7
  int neighborhood_density = 0;
  std::string lexical_class;
  int num_morphemes = 1;
  std::string iconicity_type;
  friend bool operator==(const SignEntry&, const SignEntry&) = default;
};

struct VideoRecord {
  std::string video_id;
  std::string participant_id;
  std::string gloss_id;
  Split split = Split::train;
  double length_s = 0.0;
  std::string pose_file;  // relative to the poses directory
  std::optional<std::string> skin_tone_label;
  bool is_seed = false;
  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct SignLengthStats {
  std::string gloss_id;
  double mean_length_s = 0.0;
  double sd_length_s = 0.0;  // population SD; 0 for single-video glosses
  std::size_t count = 0;
  bool single_video() const noexcept { return count == 1; }
};

// Immutable after construction. Tables are kept in input order; lookups go
// through id -> index maps built once by the constructor, which also checks
// every invariant (unique ids, referential integrity, value ranges).
class Dataset {
 public:
  Dataset() = default;
  // Throws SchemaError / IntegrityError. `poses` is either empty or parallel
  // to `videos`.
  Dataset(std::vector<Participant> participants, std::vector<SignEntry> signs,
          std::vector<VideoRecord> videos, std::vector<PoseSequence> poses = {});

  const std::vector<Participant>& participants() const noexcept { return participants_; }
  const std::vector<SignEntry>& signs() const noexcept { return signs_; }
  const std::vector<VideoRecord>& videos() const noexcept { return videos_; }
  bool has_poses() const noexcept { return !poses_.empty() || videos_.empty(); }
  const PoseSequence& pose(std::size_t video_index) const;

  const Participant& participant(std::string_view id) const;
  const SignEntry& sign(std::string_view gloss_id) const;
  const Participant& participant_of(const VideoRecord& v) const { return participant(v.participant_id); }
  const SignEntry& sign_of(const VideoRecord& v) const { return sign(v.gloss_id); }
  std::optional<std::size_t> video_index(std::string_view video_id) const;
  bool has_seed_videos() const noexcept { return has_seed_; }
  // Index of the seed-signer video for a gloss, if any.
  std::optional<std::size_t> seed_video(std::string_view gloss_id) const;

  std::size_t size() const noexcept { return videos_.size(); }
  bool empty() const noexcept { return videos_.empty(); }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.participants_ == b.participants_ && a.signs_ == b.signs_ &&
           a.videos_ == b.videos_ && a.poses_ == b.poses_;
  }

 private:
  std::vector<Participant> participants_;
  std::vector<SignEntry> signs_;
  std::vector<VideoRecord> videos_;
  std::vector<PoseSequence> poses_;
  std::unordered_map<std::string, std::size_t> participant_index_;
  std::unordered_map<std::string, std::size_t> sign_index_;
  std::unordered_map<std::string, std::size_t> video_index_;
  std::unordered_map<std::string, std::size_t> seed_index_;
  bool has_seed_ = false;
};

// Standard file names inside a dataset directory.
struct DatasetLayout {
  static constexpr std::string_view kManifest = "manifest.csv";
  static constexpr std::string_view kParticipants = "participants.csv";
  static constexpr std::string_view kLexicon = "lexicon.csv";
  static constexpr std::string_view kPoses = "poses";
  static constexpr std::string_view kFrames = "frames";
  static constexpr std::string_view kGroundTruth = "ground_truth.csv";
};

struct LoadOptions {
  bool load_poses = true;
  unsigned threads = 1;
};

// Reads the manifest plus participants.csv / lexicon.csv from the manifest's
// directory, and every pose file from poses_dir.
Dataset load_manifest(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& poses_dir, const LoadOptions& opts = {});
Dataset load_dataset_dir(const std::filesystem::path& dir, const LoadOptions& opts = {});

// Writes manifest/participants/lexicon CSVs and, when poses are present, one
// pose file per video into dir/poses.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                   std::string_view provenance = {});

// Ordered by gloss_id.
std::map<std::string, SignLengthStats> sign_length_stats(const Dataset& dataset);

// Demographic / video attributes usable for grouping.
enum class Attribute { gender, age_decade, region, asl_level, skin_tone_label, participant_id };

std::string_view to_string(Attribute a) noexcept;
Attribute parse_attribute(std::string_view text);
// String value of an attribute for one video; nullopt when unspecified.
std::optional<std::string> attribute_value(const Dataset& dataset, const VideoRecord& video,
                                           Attribute attribute);

// Videos whose participant/video attribute equals `value`, with participant
// and sign tables pruned to referenced entries. Empty result is not an error.
Dataset restrict_to_group(const Dataset& dataset, Attribute attribute, std::string_view value);

}  // namespace signbias
