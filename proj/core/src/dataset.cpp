#include "signbias/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/log.hpp"
#include "signbias/parallel.hpp"

namespace signbias {

std::string_view to_string(Gender g) noexcept {
  switch (g) {
    case Gender::female: return "female";
    case Gender::male: return "male";
    case Gender::unspecified: break;
  }
  return "";
}

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::northeast: return "northeast";
    case Region::midwest: return "midwest";
    case Region::south: return "south";
    case Region::west: return "west";
    case Region::unspecified: break;
  }
  return "";
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Gender parse_gender(std::string_view text) {
  if (text == "female") return Gender::female;
  if (text == "male") return Gender::male;
  if (text.empty() || text == "unspecified") return Gender::unspecified;
  throw SchemaError("gender: unknown value '" + std::string(text) + "'");
}

Region parse_region(std::string_view text) {
  if (text == "northeast") return Region::northeast;
  if (text == "midwest") return Region::midwest;
  if (text == "south") return Region::south;
  if (text == "west") return Region::west;
  if (text.empty() || text == "unspecified") return Region::unspecified;
  throw SchemaError("region: unknown value '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "val") return Split::val;
  if (text == "test") return Split::test;
  throw SchemaError("split: unknown value '" + std::string(text) + "'");
}

std::string_view to_string(Attribute a) noexcept {
  switch (a) {
    case Attribute::gender: return "gender";
    case Attribute::age_decade: return "age_decade";
    case Attribute::region: return "region";
    case Attribute::asl_level: return "asl_level";
    case Attribute::skin_tone_label: return "skin_tone_label";
    case Attribute::participant_id: return "participant_id";
  }
  return "gender";
}

Attribute parse_attribute(std::string_view text) {
  for (auto a : {Attribute::gender, Attribute::age_decade, Attribute::region,
                 Attribute::asl_level, Attribute::skin_tone_label, Attribute::participant_id}) {
    if (to_string(a) == text) return a;
  }
  throw UsageError("unknown attribute '" + std::string(text) + "'");
}

Dataset::Dataset(std::vector<Participant> participants, std::vector<SignEntry> signs,
                 std::vector<VideoRecord> videos, std::vector<PoseSequence> poses)
    : participants_(std::move(participants)),
      signs_(std::move(signs)),
      videos_(std::move(videos)),
      poses_(std::move(poses)) {
  if (!poses_.empty() && poses_.size() != videos_.size()) {
    throw IntegrityError("pose table size does not match video table");
  }
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    const auto& p = participants_[i];
    if (p.participant_id.empty()) throw SchemaError("participant with empty participant_id");
    if (!participant_index_.emplace(p.participant_id, i).second) {
      throw IntegrityError("duplicate participant_id '" + p.participant_id + "'");
    }
    if (p.asl_level && (*p.asl_level < 1 || *p.asl_level > 7)) {
      throw SchemaError("participant '" + p.participant_id + "': asl_level " +
                        std::to_string(*p.asl_level) + " outside [1,7]");
    }
    if (p.age_decade && (*p.age_decade < 20 || *p.age_decade > 70 || *p.age_decade % 10 != 0)) {
      throw SchemaError("participant '" + p.participant_id + "': age_decade " +
                        std::to_string(*p.age_decade) + " not in {20,...,70}");
    }
  }
  for (std::size_t i = 0; i < signs_.size(); ++i) {
    const auto& s = signs_[i];
    if (s.gloss_id.empty()) throw SchemaError("sign with empty gloss_id");
    if (!sign_index_.emplace(s.gloss_id, i).second) {
      throw IntegrityError("duplicate gloss_id '" + s.gloss_id + "'");
    }
    if (!(s.frequency >= 1.0 && s.frequency <= 7.0) || !(s.iconicity >= 1.0 && s.iconicity <= 7.0)) {
      throw SchemaError("sign '" + s.gloss_id + "': frequency/iconicity outside [1,7]");
    }
    if (s.phonological_complexity < 0 || s.phonological_complexity > 7) {
      throw SchemaError("sign '" + s.gloss_id + "': phonological_complexity outside [0,7]");
    }
    if (s.neighborhood_density < 0) {
      throw SchemaError("sign '" + s.gloss_id + "': negative neighborhood_density");
    }
    if (s.num_morphemes < 1) {
      throw SchemaError("sign '" + s.gloss_id + "': num_morphemes must be positive");
    }
  }
  std::set<std::string> dangling;
  std::unordered_map<std::string, int> seeds_per_gloss;
  for (std::size_t i = 0; i < videos_.size(); ++i) {
    const auto& v = videos_[i];
    if (v.video_id.empty()) throw SchemaError("video with empty video_id");
    if (!video_index_.emplace(v.video_id, i).second) {
      throw IntegrityError("duplicate video_id '" + v.video_id + "'");
    }
    if (!participant_index_.contains(v.participant_id)) dangling.insert(v.participant_id);
    if (!sign_index_.contains(v.gloss_id)) dangling.insert(v.gloss_id);
    if (!(v.length_s > 0.0) || !std::isfinite(v.length_s)) {
      throw SchemaError("video '" + v.video_id + "': length_s must be positive");
    }
    if (v.is_seed) {
      has_seed_ = true;
      if (++seeds_per_gloss[v.gloss_id] > 1) {
        throw IntegrityError("gloss '" + v.gloss_id + "' has more than one seed video");
      }
      seed_index_.emplace(v.gloss_id, i);
    }
  }
  if (!dangling.empty()) {
    std::string msg = "videos reference unknown participant/gloss ids:";
    for (const auto& id : dangling) msg += " " + id;
    throw IntegrityError(msg);
  }
  if (!poses_.empty()) {
    for (std::size_t i = 0; i < videos_.size(); ++i) {
      const auto& seq = poses_[i];
      if (seq.size() < 2) continue;
      const double span = seq.duration();
      const double dt = span / static_cast<double>(seq.size() - 1);
      if (std::abs(videos_[i].length_s - span) > dt + 1e-6) {
        throw IntegrityError("video '" + videos_[i].video_id + "': length_s " +
                             format_double(videos_[i].length_s) +
                             " inconsistent with pose timestamps (span " + format_double(span) + ")");
      }
    }
  }
}

const PoseSequence& Dataset::pose(std::size_t video_index) const {
  if (video_index >= poses_.size()) {
    throw LookupError("no pose data loaded for video index " + std::to_string(video_index));
  }
  return poses_[video_index];
}

const Participant& Dataset::participant(std::string_view id) const {
  auto it = participant_index_.find(std::string(id));
  if (it == participant_index_.end()) throw LookupError("unknown participant '" + std::string(id) + "'");
  return participants_[it->second];
}

const SignEntry& Dataset::sign(std::string_view gloss_id) const {
  auto it = sign_index_.find(std::string(gloss_id));
  if (it == sign_index_.end()) throw LookupError("unknown gloss '" + std::string(gloss_id) + "'");
  return signs_[it->second];
}

std::optional<std::size_t> Dataset::video_index(std::string_view video_id) const {
  auto it = video_index_.find(std::string(video_id));
  if (it == video_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dataset::seed_video(std::string_view gloss_id) const {
  auto it = seed_index_.find(std::string(gloss_id));
  if (it == seed_index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string ctx(const std::string& file, std::size_t row, std::string_view col) {
  return file + " row " + std::to_string(row + 1) + " column '" + std::string(col) + "'";
}

std::vector<Participant> read_participants(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::string name = path.filename().string();
  const auto c_id = table.column("participant_id");
  const auto c_gender = table.column("gender");
  const auto c_age = table.column("age_decade");
  const auto c_region = table.column("region");
  const auto c_level = table.column("asl_level");
  std::vector<Participant> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    Participant p;
    p.participant_id = row[c_id];
    try {
      p.gender = parse_gender(row[c_gender]);
      p.region = parse_region(row[c_region]);
    } catch (const SchemaError& e) {
      throw SchemaError(name + " row " + std::to_string(r + 1) + ": " + e.what());
    }
    p.age_decade = parse_optional_int(row[c_age], ctx(name, r, "age_decade"));
    p.asl_level = parse_optional_int(row[c_level], ctx(name, r, "asl_level"));
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SignEntry> read_lexicon(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::string name = path.filename().string();
  const auto c_id = table.column("gloss_id");
  const auto c_freq = table.column("frequency");
  const auto c_icon = table.column("iconicity");
  const auto c_cplx = table.column("phonological_complexity");
  const auto c_dens = table.column("neighborhood_density");
  const auto c_class = table.column("lexical_class");
  const auto c_morph = table.column("num_morphemes");
  const auto c_itype = table.column("iconicity_type");
  std::vector<SignEntry> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    SignEntry s;
    s.gloss_id = row[c_id];
    s.frequency = parse_double(row[c_freq], ctx(name, r, "frequency"));
    s.iconicity = parse_double(row[c_icon], ctx(name, r, "iconicity"));
    s.phonological_complexity =
        static_cast<int>(parse_int(row[c_cplx], ctx(name, r, "phonological_complexity")));
    s.neighborhood_density =
        static_cast<int>(parse_int(row[c_dens], ctx(name, r, "neighborhood_density")));
    s.lexical_class = row[c_class];
    s.num_morphemes = static_cast<int>(parse_int(row[c_morph], ctx(name, r, "num_morphemes")));
    s.iconicity_type = row[c_itype];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<VideoRecord> read_manifest_rows(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const std::string name = path.filename().string();
  const auto c_vid = table.column("video_id");
  const auto c_pid = table.column("participant_id");
  const auto c_gloss = table.column("gloss_id");
  const auto c_split = table.column("split");
  const auto c_len = table.column("length_s");
  const auto c_pose = table.column("pose_file");
  const auto c_skin = table.column("skin_tone_label");
  const auto c_seed = table.column("is_seed");
  std::vector<VideoRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    VideoRecord v;
    v.video_id = row[c_vid];
    v.participant_id = row[c_pid];
    v.gloss_id = row[c_gloss];
    try {
      v.split = parse_split(row[c_split]);
    } catch (const SchemaError& e) {
      throw SchemaError(ctx(name, r, "split") + ": " + e.what());
    }
    v.length_s = parse_double(row[c_len], ctx(name, r, "length_s"));
    v.pose_file = row[c_pose];
    if (!row[c_skin].empty()) v.skin_tone_label = row[c_skin];
    v.is_seed = parse_bool(row[c_seed], ctx(name, r, "is_seed"));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

Dataset load_manifest(const std::filesystem::path& manifest_path,
                      const std::filesystem::path& poses_dir, const LoadOptions& opts) {
  const auto dir = manifest_path.parent_path();
  auto participants = read_participants(dir / DatasetLayout::kParticipants);
  auto signs = read_lexicon(dir / DatasetLayout::kLexicon);
  auto videos = read_manifest_rows(manifest_path);
  std::vector<PoseSequence> poses;
  if (opts.load_poses && !videos.empty()) {
    poses.resize(videos.size());
    parallel_for(videos.size(), opts.threads, [&](std::size_t i) {
      try {
        poses[i] = read_pose_file(poses_dir / videos[i].pose_file);
      } catch (const Error& e) {
        throw IoError("video '" + videos[i].video_id + "': " + e.what());
      }
    });
  }
  return Dataset(std::move(participants), std::move(signs), std::move(videos), std::move(poses));
}

Dataset load_dataset_dir(const std::filesystem::path& dir, const LoadOptions& opts) {
  return load_manifest(dir / DatasetLayout::kManifest, dir / DatasetLayout::kPoses, opts);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                   std::string_view provenance) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  {
    CsvWriter w(dir / DatasetLayout::kParticipants,
                {"participant_id", "gender", "age_decade", "region", "asl_level"}, provenance);
    for (const auto& p : dataset.participants()) {
      w.write_row({p.participant_id, std::string(to_string(p.gender)), format_optional(p.age_decade),
                   std::string(to_string(p.region)), format_optional(p.asl_level)});
    }
    w.close();
  }
  {
    CsvWriter w(dir / DatasetLayout::kLexicon,
                {"gloss_id", "frequency", "iconicity", "phonological_complexity",
                 "neighborhood_density", "lexical_class", "num_morphemes", "iconicity_type"},
                provenance);
    for (const auto& s : dataset.signs()) {
      w.write_row({s.gloss_id, format_double(s.frequency), format_double(s.iconicity),
                   std::to_string(s.phonological_complexity),
                   std::to_string(s.neighborhood_density), s.lexical_class,
                   std::to_string(s.num_morphemes), s.iconicity_type});
    }
    w.close();
  }
  {
    CsvWriter w(dir / DatasetLayout::kManifest,
                {"video_id", "participant_id", "gloss_id", "split", "length_s", "pose_file",
                 "skin_tone_label", "is_seed"},
                provenance);
    for (const auto& v : dataset.videos()) {
      w.write_row({v.video_id, v.participant_id, v.gloss_id, std::string(to_string(v.split)),
                   format_double(v.length_s), v.pose_file, v.skin_tone_label.value_or(""),
                   v.is_seed ? "1" : "0"});
    }
    w.close();
  }
  if (dataset.has_poses() && !dataset.empty()) {
    const auto pose_dir = dir / DatasetLayout::kPoses;
    std::filesystem::create_directories(pose_dir, ec);
    if (ec) throw IoError("cannot create '" + pose_dir.string() + "': " + ec.message());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto target = pose_dir / dataset.videos()[i].pose_file;
      std::filesystem::create_directories(target.parent_path(), ec);
      write_pose_file(target, dataset.pose(i));
    }
  }
}

std::map<std::string, SignLengthStats> sign_length_stats(const Dataset& dataset) {
  // Welford accumulation; population variance at the end.
  struct Acc {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& v : dataset.videos()) {
    auto& a = acc[v.gloss_id];
    ++a.n;
    const double delta = v.length_s - a.mean;
    a.mean += delta / static_cast<double>(a.n);
    a.m2 += delta * (v.length_s - a.mean);
  }
  std::map<std::string, SignLengthStats> out;
  for (const auto& [gloss, a] : acc) {
    SignLengthStats s;
    s.gloss_id = gloss;
    s.count = a.n;
    s.mean_length_s = a.mean;
    s.sd_length_s = a.n > 1 ? std::sqrt(std::max(0.0, a.m2 / static_cast<double>(a.n))) : 0.0;
    out.emplace(gloss, s);
  }
  return out;
}

std::optional<std::string> attribute_value(const Dataset& dataset, const VideoRecord& video,
                                           Attribute attribute) {
  switch (attribute) {
    case Attribute::skin_tone_label:
      return video.skin_tone_label;
    case Attribute::participant_id:
      return video.participant_id;
    default:
      break;
  }
  const auto& p = dataset.participant_of(video);
  switch (attribute) {
    case Attribute::gender:
      if (p.gender == Gender::unspecified) return std::nullopt;
      return std::string(to_string(p.gender));
    case Attribute::region:
      if (p.region == Region::unspecified) return std::nullopt;
      return std::string(to_string(p.region));
    case Attribute::age_decade:
      if (!p.age_decade) return std::nullopt;
      return std::to_string(*p.age_decade);
    case Attribute::asl_level:
      if (!p.asl_level) return std::nullopt;
      return std::to_string(*p.asl_level);
    default:
      return std::nullopt;
  }
}

Dataset restrict_to_group(const Dataset& dataset, Attribute attribute, std::string_view value) {
  std::vector<VideoRecord> videos;
  std::vector<PoseSequence> poses;
  std::set<std::string> used_participants;
  std::set<std::string> used_glosses;
  const bool with_poses = dataset.has_poses() && !dataset.empty();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& v = dataset.videos()[i];
    const auto attr = attribute_value(dataset, v, attribute);
    if (!attr || *attr != value) continue;
    videos.push_back(v);
    if (with_poses) poses.push_back(dataset.pose(i));
    used_participants.insert(v.participant_id);
    used_glosses.insert(v.gloss_id);
  }
  if (videos.empty()) {
    log_warning("restrict_to_group(" + std::string(to_string(attribute)) + "=" +
                std::string(value) + ") matched no videos");
  }
  std::vector<Participant> participants;
  for (const auto& p : dataset.participants()) {
    if (used_participants.contains(p.participant_id)) participants.push_back(p);
  }
  std::vector<SignEntry> signs;
  for (const auto& s : dataset.signs()) {
    if (used_glosses.contains(s.gloss_id)) signs.push_back(s);
  }
  return Dataset(std::move(participants), std::move(signs), std::move(videos), std::move(poses));
}

}  // namespace signbias
