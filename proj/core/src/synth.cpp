#include "signbias/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/parallel.hpp"

namespace signbias {

namespace {

constexpr double kFps = 30.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrist-relative hand template (right hand; the left hand mirrors x).
constexpr std::array<Point, kHandKeypoints> kHandTemplate = {{
    {0.00, 0.00},   {0.06, -0.07}, {0.09, -0.15}, {0.03, -0.13}, {0.04, -0.23},
    {-0.01, -0.14}, {-0.01, -0.25}, {-0.05, -0.13}, {-0.07, -0.21}, {-0.09, -0.05},
}};

double quantize(double v) { return std::round(v * 1e5) / 1e5; }

Point hand_point(const GlossPrototype::HandMotion& m, double u, std::size_t k, bool mirror) {
  double cx = m.base.x, cy = m.base.y;
  for (const auto& c : m.components) {
    cx += c.amp_x * std::sin(kTwoPi * c.freq * u + c.phase_x);
    cy += c.amp_y * std::sin(kTwoPi * c.freq * u + c.phase_y);
  }
  const double ang = m.shape_angle + m.shape_swing * std::sin(kTwoPi * m.shape_freq * u);
  Point off{kHandTemplate[k].x + m.shape_jitter[k].x, kHandTemplate[k].y + m.shape_jitter[k].y};
  if (mirror) off.x = -off.x;
  const double c = std::cos(ang), s = std::sin(ang);
  return {cx + c * off.x - s * off.y, cy + s * off.x + c * off.y};
}

void fill_body(Keypoints& kp) {
  kp[0] = {-0.5, 0.0};
  kp[1] = {0.5, 0.0};
  kp[2] = {0.0, -0.9};
  kp[3] = {-0.15, -1.05};
  kp[4] = {0.15, -1.05};
  const Point lw = kp[KeypointSchema::kLeftHandFirst];
  const Point rw = kp[KeypointSchema::kRightHandFirst];
  kp[5] = {0.5 * (kp[0].x + lw.x) - 0.2, 0.5 * (kp[0].y + lw.y) + 0.2};
  kp[6] = {0.5 * (kp[1].x + rw.x) + 0.2, 0.5 * (kp[1].y + rw.y) + 0.2};
}

GlossPrototype::HandMotion make_motion(Rng& rng, Point base) {
  GlossPrototype::HandMotion m;
  m.base = {base.x + rng.uniform(-0.15, 0.15), base.y + rng.uniform(-0.3, 0.3)};
  const auto k = 2 + rng.below(3);  // 2..4 components
  for (std::size_t i = 0; i < k; ++i) {
    m.components.push_back({rng.uniform(0.04, 0.22), rng.uniform(0.04, 0.22), rng.uniform(0.5, 2.0),
                            rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)});
  }
  m.shape_angle = rng.uniform(-0.8, 0.8);
  m.shape_swing = rng.uniform(0.0, 0.6);
  m.shape_freq = rng.uniform(0.5, 1.5);
  for (auto& j : m.shape_jitter) j = {rng.normal(0.0, 0.03), rng.normal(0.0, 0.03)};
  return m;
}

struct Camera {
  Point center;   // shoulder midpoint in image units
  double scale;   // shoulder distance in image units
};

Keypoints to_image(const Keypoints& norm, const Camera& cam) {
  Keypoints out{};
  for (std::size_t k = 0; k < kNumKeypoints; ++k) {
    out[k] = {quantize(cam.center.x + cam.scale * norm[k].x), quantize(cam.center.y + cam.scale * norm[k].y)};
  }
  return out;
}

const char* const kLexicalClasses[] = {"Noun", "Verb", "Adjective", "Adverb", "Minor"};
const char* const kIconicityTypes[] = {"arbitrary", "pantomimic", "perceptual", "metaphorical"};
const char* const kSkinTones[] = {"type_1_2", "type_3_4", "type_5_6"};

std::string padded(const char* prefix, std::size_t i, int width) {
  std::string num = std::to_string(i);
  if (static_cast<int>(num.size()) < width) num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
  return prefix + num;
}

}  // namespace

void validate(const GenConfig& cfg) {
  if (cfg.participants < 1 || cfg.glosses < 1 || cfg.videos_per_participant < 1) {
    throw UsageError("generator counts must be >= 1");
  }
  if (cfg.videos_per_participant > cfg.glosses) {
    throw UsageError("videos_per_participant cannot exceed the gloss count (one video per gloss per participant)");
  }
  if (cfg.female_fraction < 0 || cfg.unspecified_gender_fraction < 0 ||
      cfg.female_fraction + cfg.unspecified_gender_fraction > 1.0) {
    throw UsageError("gender mix fractions must be non-negative and sum to <= 1");
  }
  if (cfg.length_cv < 0 || cfg.quality_error_coupling < 0 || cfg.base_keypoint_noise < 0 ||
      cfg.quality_video_jitter < 0 || cfg.style_sd < 0 || cfg.speed_variance < 0 ||
      cfg.frame_noise_variance < 0 || cfg.female_quality_shift < 0 || cfg.gender_variant_sd < 0) {
    throw UsageError("coupling strengths and spreads must be >= 0");
  }
  if (cfg.length_content_coupling < 0 || cfg.length_content_coupling > 1) {
    throw UsageError("length_content_coupling must be in [0, 1]");
  }
  if (cfg.quality_hand_collapse < 0 || cfg.quality_hand_collapse > 1) {
    throw UsageError("quality_hand_collapse must be in [0, 1]");
  }
  if (cfg.quality_factor_min < 0 || cfg.quality_factor_max < cfg.quality_factor_min) {
    throw UsageError("quality factor range must satisfy 0 <= min <= max");
  }
  if (cfg.train_fraction <= 0 || cfg.val_fraction < 0 || cfg.train_fraction + cfg.val_fraction >= 1.0) {
    throw UsageError("split fractions must leave a non-empty test split");
  }
  if (cfg.frames && (cfg.frame_width < 16 || cfg.frame_height < 16 || cfg.frames_per_video < 1)) {
    throw UsageError("frames must be at least 16x16 with >= 1 frame per video");
  }
}

Keypoints GlossPrototype::rest_pose() {
  GlossPrototype::HandMotion rest;
  rest.base = {0.0, 0.0};
  Keypoints kp{};
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    const Point l = hand_point(rest, 0.0, k, true);
    const Point r = hand_point(rest, 0.0, k, false);
    kp[KeypointSchema::kLeftHandFirst + k] = {l.x - 0.45, l.y + 1.55};
    kp[KeypointSchema::kRightHandFirst + k] = {r.x + 0.45, r.y + 1.55};
  }
  fill_body(kp);
  return kp;
}

Keypoints GlossPrototype::at(double u) const {
  Keypoints kp = rest_pose();
  for (std::size_t k = 0; k < kHandKeypoints; ++k) {
    kp[KeypointSchema::kRightHandFirst + k] = hand_point(right, u, k, false);
    if (two_handed) kp[KeypointSchema::kLeftHandFirst + k] = hand_point(left, u, k, true);
  }
  fill_body(kp);
  return kp;
}

GlossPrototype make_prototype(Rng& rng) {
  GlossPrototype p;
  p.duration_s = rng.uniform(1.0, 3.0);
  p.two_handed = rng.uniform() < 0.55;
  p.right = make_motion(rng, {0.35, 0.7});
  p.left = make_motion(rng, {-0.35, 0.7});
  return p;
}

PoseSequence prototype_trajectory(const GlossPrototype& proto) {
  const auto n = static_cast<std::size_t>(std::llround(proto.duration_s * kFps)) + 1;
  PoseSequence seq;
  seq.frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PoseFrame f;
    f.t = static_cast<double>(i) / kFps;
    f.kp = proto.at(static_cast<double>(i) / static_cast<double>(n - 1));
    seq.frames.push_back(f);
  }
  return seq;
}

PoseSequence prototype_trajectory(std::size_t gloss_index, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "gloss", gloss_index));
  return prototype_trajectory(make_prototype(rng));
}

std::vector<GrayImage> generate_frames(const PoseSequence& image_space_pose, double quality_factor,
                                       const FrameSpec& spec, Rng& rng) {
  std::vector<GrayImage> frames;
  if (image_space_pose.empty()) return frames;
  const double gx = rng.uniform(-1.0, 1.0);
  const double gy = rng.uniform(-1.0, 1.0);
  const double base = rng.uniform(70.0, 130.0);
  const double noise_sd = std::sqrt(std::max(0.0, quality_factor) * spec.noise_variance);
  const auto w = static_cast<double>(spec.width);
  const auto h = static_cast<double>(spec.height);
  for (std::size_t f = 0; f < spec.count; ++f) {
    const std::size_t src = spec.count == 1 ? 0 : f * (image_space_pose.size() - 1) / (spec.count - 1);
    const Point wrist = image_space_pose.frames[src].kp[KeypointSchema::kRightHandFirst];
    const Point torso = image_space_pose.frames[src].kp[KeypointSchema::kLeftShoulder];
    GrayImage img(spec.width, spec.height);
    for (std::size_t y = 0; y < spec.height; ++y) {
      for (std::size_t x = 0; x < spec.width; ++x) {
        const double fx = static_cast<double>(x) / w;
        const double fy = static_cast<double>(y) / h;
        double v = base + 40.0 * (gx * fx + gy * fy);
        const double dh = (fx - wrist.x) * (fx - wrist.x) + (fy - wrist.y) * (fy - wrist.y);
        v += 70.0 * std::exp(-dh / (2.0 * 0.004));
        const double dt = (fx - torso.x - 0.1) * (fx - torso.x - 0.1) + (fy - torso.y - 0.15) * (fy - torso.y - 0.15);
        v -= 45.0 * std::exp(-dt / (2.0 * 0.02));
        if (noise_sd > 0.0) v += noise_sd * rng.normal();
        img.at(y, x) = std::clamp(std::round(v), 0.0, 255.0);
      }
    }
    frames.push_back(std::move(img));
  }
  return frames;
}

GenerationResult generate(const GenConfig& cfg, const std::filesystem::path& out_dir, unsigned threads,
                          const std::string& provenance) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, "gen"));

  // Lexicon and prototypes.
  std::vector<SignEntry> signs;
  std::vector<GlossPrototype> prototypes;
  for (std::size_t g = 0; g < cfg.glosses; ++g) {
    SignEntry s;
    s.gloss_id = padded("G", g + 1, 3);
    s.frequency = std::round(rng.uniform(1.0, 7.0) * 100.0) / 100.0;
    s.iconicity = std::round(rng.uniform(1.0, 7.0) * 100.0) / 100.0;
    s.phonological_complexity = static_cast<int>(rng.below(8));
    s.neighborhood_density = static_cast<int>(rng.below(40));
    s.lexical_class = kLexicalClasses[rng.below(5)];
    s.num_morphemes = 1 + static_cast<int>(rng.below(3));
    s.iconicity_type = kIconicityTypes[rng.below(4)];
    signs.push_back(std::move(s));
    Rng proto_rng(derive_seed(cfg.seed, "gloss", g));
    prototypes.push_back(make_prototype(proto_rng));
  }

  // Participants with demographics, recording quality and signing style.
  struct ParticipantTraits {
    double quality = 0.0;
    Point style_left, style_right;
    double signing_scale = 1.0;
    Camera camera{};
    Split split = Split::train;
  };
  std::vector<Participant> participants;
  std::vector<ParticipantTraits> traits;
  for (std::size_t p = 0; p < cfg.participants; ++p) {
    Participant part;
    part.participant_id = padded("P", p + 1, 3);
    const double ug = rng.uniform();
    part.gender = ug < cfg.female_fraction ? Gender::female
                  : ug < cfg.female_fraction + cfg.unspecified_gender_fraction ? Gender::unspecified
                                                                               : Gender::male;
    if (rng.uniform() >= cfg.unspecified_age_fraction) {
      const double total = std::accumulate(cfg.age_mix.begin(), cfg.age_mix.end(), 0.0);
      double ua = rng.uniform() * total;
      std::size_t d = 0;
      while (d + 1 < cfg.age_mix.size() && ua >= cfg.age_mix[d]) ua -= cfg.age_mix[d++];
      part.age_decade = 20 + 10 * static_cast<int>(d);
    } else {
      (void)rng.uniform();
    }
    part.region = static_cast<Region>(rng.below(4));
    part.asl_level = 3 + static_cast<int>(rng.below(5));
    ParticipantTraits t;
    t.quality = rng.uniform(cfg.quality_factor_min, cfg.quality_factor_max) +
                (part.gender == Gender::female ? cfg.female_quality_shift : 0.0);
    t.style_left = {rng.normal(0.0, cfg.style_sd), rng.normal(0.0, cfg.style_sd)};
    t.style_right = {rng.normal(0.0, cfg.style_sd), rng.normal(0.0, cfg.style_sd)};
    t.signing_scale = rng.uniform(0.92, 1.08);
    t.camera = {{rng.uniform(0.45, 0.55), rng.uniform(0.3, 0.4)}, rng.uniform(0.17, 0.23)};
    participants.push_back(std::move(part));
    traits.push_back(t);
  }
  std::vector<std::string> skin_tone(cfg.participants);
  for (auto& s : skin_tone) s = kSkinTones[rng.below(3)];

  // Participant-level split, stratified by gender so every split sees both.
  for (auto gender : {Gender::female, Gender::male, Gender::unspecified}) {
    std::vector<std::size_t> members;
    for (std::size_t p = 0; p < participants.size(); ++p) {
      if (participants[p].gender == gender) members.push_back(p);
    }
    for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
    const double test_fraction = 1.0 - cfg.train_fraction - cfg.val_fraction;
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    const auto n_val = static_cast<std::size_t>(std::llround(cfg.val_fraction * static_cast<double>(members.size())));
    for (std::size_t i = 0; i < members.size(); ++i) {
      traits[members[i]].split = i < n_test ? Split::test : i < n_test + n_val ? Split::val : Split::train;
    }
  }

  // Video plan: each participant signs a random subset of glosses.
  struct VideoPlan {
    std::size_t participant;  // index, or npos for the seed signer
    std::size_t gloss;
  };
  constexpr std::size_t kSeedSigner = static_cast<std::size_t>(-1);
  std::vector<VideoPlan> plan;
  if (cfg.seed_signer) {
    for (std::size_t g = 0; g < cfg.glosses; ++g) plan.push_back({kSeedSigner, g});
  }
  for (std::size_t p = 0; p < cfg.participants; ++p) {
    std::vector<std::size_t> glosses(cfg.glosses);
    std::iota(glosses.begin(), glosses.end(), 0);
    for (std::size_t i = 0; i < cfg.videos_per_participant; ++i) {
      std::swap(glosses[i], glosses[i + rng.below(glosses.size() - i)]);
    }
    std::vector<std::size_t> chosen(glosses.begin(), glosses.begin() + static_cast<long>(cfg.videos_per_participant));
    std::sort(chosen.begin(), chosen.end());
    for (auto g : chosen) plan.push_back({p, g});
  }

  const std::size_t n = plan.size();
  std::vector<VideoRecord> videos(n);
  std::vector<PoseSequence> poses(n);
  GroundTruth truth;
  truth.rows.resize(n);
  const bool write = !out_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / DatasetLayout::kPoses, ec);
    if (!ec && cfg.frames) std::filesystem::create_directories(out_dir / DatasetLayout::kFrames, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());
  }

  if (cfg.seed_signer) {
    Participant seed;
    seed.participant_id = "SEED";
    seed.asl_level = 7;
    participants.push_back(seed);
  }

  // Per-sign gendered variant: female signers shift the hands by +d, male by -d.
  std::vector<std::array<Point, 2>> variant(prototypes.size());
  if (cfg.gender_variant_sd > 0) {
    for (std::size_t g = 0; g < variant.size(); ++g) {
      Rng rv(derive_seed(cfg.seed, "variant", g));
      for (auto& d : variant[g]) d = {rv.normal(0.0, cfg.gender_variant_sd), rv.normal(0.0, cfg.gender_variant_sd)};
    }
  }

  parallel_for(n, threads, [&](std::size_t i) {
    Rng vr(derive_seed(cfg.seed, "video", i));
    const auto& vp = plan[i];
    const auto& proto = prototypes[vp.gloss];
    const bool is_seed = vp.participant == kSeedSigner;
    VideoRecord& v = videos[i];
    GroundTruthRow& gt = truth.rows[i];
    v.gloss_id = signs[vp.gloss].gloss_id;
    v.is_seed = is_seed;
    if (is_seed) {
      v.video_id = "seed_" + v.gloss_id;
      v.participant_id = "SEED";
      v.split = Split::train;
    } else {
      v.video_id = padded("V", i + 1, 5);
      v.participant_id = participants[vp.participant].participant_id;
      v.split = traits[vp.participant].split;
      v.skin_tone_label = skin_tone[vp.participant];
    }
    v.pose_file = v.video_id + ".jsonl";

    double raw_z = 0.0, quality = 0.0, noise = 0.0;
    Camera cam{{0.5, 0.35}, 0.2};
    Point style_l{}, style_r{};
    double scale = 1.0, warp = 0.0, keep = 1.0;
    if (!is_seed) {
      const auto& part = participants[vp.participant];
      const auto& tr = traits[vp.participant];
      raw_z = vr.normal();
      if (part.gender == Gender::male) raw_z += 0.5 * cfg.gender_length_offset;
      if (part.gender == Gender::female) raw_z -= 0.5 * cfg.gender_length_offset;
      if (part.age_decade) raw_z += cfg.age_length_slope * (static_cast<double>(*part.age_decade) - 45.0) / 10.0;
      quality = tr.quality * std::exp(cfg.quality_video_jitter * vr.normal());
      noise = cfg.base_keypoint_noise + cfg.quality_error_coupling * quality;
      cam = tr.camera;
      cam.center.x += vr.normal(0.0, 0.005);
      cam.center.y += vr.normal(0.0, 0.005);
      style_l = tr.style_left;
      style_r = tr.style_right;
      const double side = part.gender == Gender::female ? 1.0 : part.gender == Gender::male ? -1.0 : 0.0;
      style_l = {style_l.x + side * variant[vp.gloss][0].x, style_l.y + side * variant[vp.gloss][0].y};
      style_r = {style_r.x + side * variant[vp.gloss][1].x, style_r.y + side * variant[vp.gloss][1].y};
      scale = tr.signing_scale;
      warp = vr.uniform(-cfg.speed_variance, cfg.speed_variance);
      keep = 1.0 - cfg.quality_hand_collapse * std::min(quality, 1.0);
    } else {
      // The seed signer records with the best participant setup.
      (void)vr.normal();
      quality = cfg.quality_factor_min * std::exp(cfg.quality_video_jitter * vr.normal());
      noise = cfg.base_keypoint_noise + cfg.quality_error_coupling * quality;
      keep = 1.0 - cfg.quality_hand_collapse * std::min(quality, 1.0);
    }
    gt.video_id = v.video_id;
    gt.planted_length_z = raw_z;
    gt.quality_factor = quality;
    gt.noise_level = noise;

    // Duration change is split between tempo and content (holds / clipping).
    const double nominal = proto.duration_s;
    const double duration = std::max(0.3 * nominal, nominal * (1.0 + cfg.length_cv * raw_z));
    const double delta = duration - nominal;
    double hold = 0.0, phase_end = 1.0;
    if (delta > 0.0) {
      hold = cfg.length_content_coupling * delta;
    } else {
      phase_end = std::max(0.4, 1.0 - cfg.length_content_coupling * (-delta) / nominal);
    }
    const double sign_time = duration - hold;
    const auto frames = static_cast<std::size_t>(std::llround(duration * kFps)) + 1;
    const Keypoints rest = GlossPrototype::rest_pose();
    const Keypoints first = proto.at(0.0);
    const Keypoints last = proto.at(phase_end);
    PoseSequence& seq = poses[i];
    seq.frames.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
      const double t = static_cast<double>(f) / kFps;
      Keypoints norm;
      const double lead = 0.5 * hold;
      if (t < lead || t > lead + sign_time) {
        // Rest holds blend toward the first/last sign frame.
        const bool before = t < lead;
        const double gap = before ? lead - t : t - lead - sign_time;
        const double blend = std::exp(-gap / 0.15);
        const Keypoints& edge = before ? first : last;
        for (std::size_t k = 0; k < kNumKeypoints; ++k) {
          norm[k] = {rest[k].x + blend * (edge[k].x - rest[k].x), rest[k].y + blend * (edge[k].y - rest[k].y)};
        }
      } else {
        double u = sign_time > 0 ? (t - lead) / sign_time : 0.0;
        u = std::clamp(u + warp * std::sin(std::numbers::pi * u), 0.0, 1.0);
        norm = proto.at(u * phase_end);
      }
      for (std::size_t k = 0; k < kHandKeypoints; ++k) {
        auto& l = norm[KeypointSchema::kLeftHandFirst + k];
        auto& r = norm[KeypointSchema::kRightHandFirst + k];
        l = {scale * l.x + style_l.x, scale * l.y + style_l.y};
        r = {scale * r.x + style_r.x, scale * r.y + style_r.y};
      }
      if (keep < 1.0) {
        for (std::size_t first_kp : {KeypointSchema::kLeftHandFirst, KeypointSchema::kRightHandFirst}) {
          Point c{0.0, 0.0};
          for (std::size_t k = 0; k < kHandKeypoints; ++k) {
            c.x += norm[first_kp + k].x / kHandKeypoints;
            c.y += norm[first_kp + k].y / kHandKeypoints;
          }
          for (std::size_t k = 0; k < kHandKeypoints; ++k) {
            auto& p = norm[first_kp + k];
            p = {c.x + keep * (p.x - c.x), c.y + keep * (p.y - c.y)};
          }
        }
      }
      if (noise > 0.0) {
        for (auto& p : norm) {
          p.x += noise * vr.normal();
          p.y += noise * vr.normal();
        }
      }
      PoseFrame pf;
      pf.t = t;
      pf.kp = to_image(norm, cam);
      seq.frames.push_back(pf);
    }
    v.length_s = seq.duration();

    if (write) {
      write_pose_file(out_dir / DatasetLayout::kPoses / v.pose_file, seq);
      if (cfg.frames) {
        Rng fr(derive_seed(cfg.seed, "frames", i));
        const FrameSpec spec{cfg.frame_width, cfg.frame_height, cfg.frames_per_video, cfg.frame_noise_variance};
        write_pgm_frames(out_dir / DatasetLayout::kFrames / (v.video_id + ".pgm"),
                         generate_frames(seq, quality, spec, fr));
      }
    }
  });

  GenerationResult result{Dataset(std::move(participants), std::move(signs), std::move(videos), std::move(poses)),
                          std::move(truth)};
  if (write) {
    // Pose files are already on disk; write the tables only.
    const Dataset tables(result.dataset.participants(), result.dataset.signs(), result.dataset.videos());
    write_dataset(tables, out_dir, provenance);
    write_ground_truth(out_dir / DatasetLayout::kGroundTruth, result.truth, provenance);
  }
  return result;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth,
                        std::string_view provenance) {
  CsvWriter w(path, {"video_id", "noise_level", "planted_length_z", "quality_factor"}, provenance);
  for (const auto& r : truth.rows) {
    w.write_row({r.video_id, format_double(r.noise_level), format_double(r.planted_length_z),
                 format_double(r.quality_factor)});
  }
  w.close();
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_id = table.column("video_id");
  const auto c_noise = table.column("noise_level");
  const auto c_z = table.column("planted_length_z");
  const auto c_q = table.column("quality_factor");
  GroundTruth gt;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string cx = path.filename().string() + " row " + std::to_string(r + 1);
    gt.rows.push_back({row[c_id], parse_double(row[c_noise], cx), parse_double(row[c_z], cx),
                       parse_double(row[c_q], cx)});
  }
  return gt;
}

}  // namespace signbias
