#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "signbias/dataset.hpp"
#include "signbias/errors.hpp"
#include "signbias/synth.hpp"
#include "test_util.hpp"

using namespace signbias;

namespace {

std::vector<Participant> two_participants() {
  Participant a;
  a.participant_id = "P1";
  a.gender = Gender::female;
  a.age_decade = 30;
  a.asl_level = 6;
  Participant b;
  b.participant_id = "P2";
  b.gender = Gender::male;
  b.region = Region::west;
  return {a, b};
}

std::vector<SignEntry> two_signs() {
  SignEntry s1;
  s1.gloss_id = "HELLO";
  s1.lexical_class = "Noun";
  SignEntry s2;
  s2.gloss_id = "BOOK";
  s2.lexical_class = "Verb";
  return {s1, s2};
}

VideoRecord video(const std::string& id, const std::string& p, const std::string& g, double len,
                  Split split = Split::train) {
  VideoRecord v;
  v.video_id = id;
  v.participant_id = p;
  v.gloss_id = g;
  v.length_s = len;
  v.split = split;
  v.pose_file = id + ".jsonl";
  return v;
}

GenConfig small_gen(std::uint64_t seed = 3) {
  GenConfig g;
  g.seed = seed;
  g.participants = 10;
  g.glosses = 8;
  g.videos_per_participant = 6;
  g.frames = false;
  return g;
}

}  // namespace

TEST(Dataset, EmptyManifestIsValid) {
  const Dataset d(two_participants(), two_signs(), {});
  EXPECT_TRUE(d.empty());
  EXPECT_TRUE(sign_length_stats(d).empty());
}

TEST(Dataset, UnknownParticipantListed) {
  try {
    Dataset d(two_participants(), two_signs(), {video("v1", "P99", "HELLO", 1.0)});
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("P99"), std::string::npos);
  }
}

TEST(Dataset, InvariantViolationsRejected) {
  auto ps = two_participants();
  ps[0].asl_level = 9;
  EXPECT_THROW(Dataset(ps, two_signs(), {}), SchemaError);
  ps = two_participants();
  ps[1].age_decade = 35;
  EXPECT_THROW(Dataset(ps, two_signs(), {}), SchemaError);
  ps = two_participants();
  ps[1].participant_id = "P1";
  EXPECT_THROW(Dataset(ps, two_signs(), {}), IntegrityError);
  auto ss = two_signs();
  ss[0].iconicity = 8.0;
  EXPECT_THROW(Dataset(two_participants(), ss, {}), SchemaError);
  EXPECT_THROW(Dataset(two_participants(), two_signs(), {video("v1", "P1", "HELLO", 0.0)}), SchemaError);
  EXPECT_THROW(Dataset(two_participants(), two_signs(),
                       {video("v1", "P1", "HELLO", 1.0), video("v1", "P2", "HELLO", 1.0)}),
               IntegrityError);
  auto s1 = video("s1", "P1", "HELLO", 1.0);
  auto s2 = video("s2", "P2", "HELLO", 1.0);
  s1.is_seed = s2.is_seed = true;
  EXPECT_THROW(Dataset(two_participants(), two_signs(), {s1, s2}), IntegrityError);
}

TEST(Dataset, PoseSpanMustMatchLength) {
  const auto seq = testutil::random_walk(31, 30.0, 1);  // spans 1 s
  EXPECT_NO_THROW(Dataset(two_participants(), two_signs(), {video("v1", "P1", "HELLO", 1.0)}, {seq}));
  EXPECT_THROW(Dataset(two_participants(), two_signs(), {video("v1", "P1", "HELLO", 2.0)}, {seq}),
               IntegrityError);
}

TEST(SignLengthStats, HandArithmetic) {
  const Dataset d(two_participants(), two_signs(),
                  {video("a", "P1", "HELLO", 2.0), video("b", "P2", "HELLO", 2.0), video("c", "P1", "HELLO", 2.0),
                   video("d", "P1", "BOOK", 1.0), video("e", "P2", "BOOK", 3.0)});
  const auto stats = sign_length_stats(d);
  EXPECT_DOUBLE_EQ(stats.at("HELLO").mean_length_s, 2.0);
  EXPECT_DOUBLE_EQ(stats.at("HELLO").sd_length_s, 0.0);
  EXPECT_DOUBLE_EQ(stats.at("BOOK").mean_length_s, 2.0);
  EXPECT_DOUBLE_EQ(stats.at("BOOK").sd_length_s, 1.0);
  EXPECT_EQ(stats.at("BOOK").count, 2u);
}

TEST(SignLengthStats, MatchesTwoPassOracleOnSyntheticData) {
  const auto gen = generate(small_gen());
  const auto stats = sign_length_stats(gen.dataset);
  std::map<std::string, std::vector<double>> by_gloss;
  for (const auto& v : gen.dataset.videos()) by_gloss[v.gloss_id].push_back(v.length_s);
  ASSERT_EQ(stats.size(), by_gloss.size());
  for (const auto& [g, xs] : by_gloss) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size()));
    const auto& s = stats.at(g);
    EXPECT_EQ(s.count, xs.size());
    EXPECT_NEAR(s.mean_length_s, mean, 1e-12);
    EXPECT_NEAR(s.sd_length_s, sd, 1e-12);
    EXPECT_GE(s.mean_length_s, *std::min_element(xs.begin(), xs.end()) - 1e-12);
    EXPECT_LE(s.mean_length_s, *std::max_element(xs.begin(), xs.end()) + 1e-12);
  }
}

TEST(Dataset, WriteAndLoadRoundTrip) {
  testutil::TempDir dir("dataset_rt");
  const auto gen = generate(small_gen(), dir.path());
  const auto loaded = load_dataset_dir(dir.path());
  EXPECT_TRUE(loaded == gen.dataset);

  testutil::TempDir dir2("dataset_rt2");
  write_dataset(loaded, dir2.path(), "signbias test");
  const auto again = load_dataset_dir(dir2.path());
  EXPECT_TRUE(again == loaded);
  const auto tables_only = load_dataset_dir(dir2.path(), {false, 1});
  EXPECT_EQ(tables_only.videos(), loaded.videos());
  EXPECT_THROW((void)tables_only.pose(0), LookupError);
}

TEST(Dataset, MissingPoseFileNamesVideo) {
  testutil::TempDir dir("dataset_missing");
  const auto gen = generate(small_gen(), dir.path());
  const auto victim = gen.dataset.videos()[4];
  std::filesystem::remove(dir.path() / "poses" / victim.pose_file);
  try {
    (void)load_dataset_dir(dir.path());
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(victim.video_id), std::string::npos);
  }
}

TEST(RestrictToGroup, IdempotentAndCommutative) {
  const auto d = generate(small_gen(5)).dataset;
  const auto f = restrict_to_group(d, Attribute::gender, "female");
  EXPECT_TRUE(restrict_to_group(f, Attribute::gender, "female") == f);
  for (const auto& v : f.videos()) EXPECT_EQ(f.participant_of(v).gender, Gender::female);

  const auto ab = restrict_to_group(restrict_to_group(d, Attribute::gender, "female"), Attribute::region, "south");
  const auto ba = restrict_to_group(restrict_to_group(d, Attribute::region, "south"), Attribute::gender, "female");
  EXPECT_TRUE(ab == ba);

  const auto none = restrict_to_group(d, Attribute::gender, "nonexistent");
  EXPECT_TRUE(none.empty());
}

TEST(RestrictToGroup, CountsMatchGeneratorLabels) {
  auto g = small_gen(8);
  g.participants = 30;
  const auto d = generate(g).dataset;
  std::size_t female = 0;
  for (const auto& v : d.videos()) female += d.participant_of(v).gender == Gender::female;
  EXPECT_EQ(restrict_to_group(d, Attribute::gender, "female").size(), female);
  EXPECT_GT(female, 0u);
}

TEST(Attributes, ValuesAndParsing) {
  const Dataset d(two_participants(), two_signs(), {video("a", "P1", "HELLO", 1.0), video("b", "P2", "BOOK", 1.0)});
  EXPECT_EQ(attribute_value(d, d.videos()[0], Attribute::gender), "female");
  EXPECT_EQ(attribute_value(d, d.videos()[0], Attribute::age_decade), "30");
  EXPECT_FALSE(attribute_value(d, d.videos()[1], Attribute::age_decade).has_value());
  EXPECT_FALSE(attribute_value(d, d.videos()[0], Attribute::region).has_value());
  EXPECT_EQ(attribute_value(d, d.videos()[1], Attribute::participant_id), "P2");
  EXPECT_EQ(parse_attribute("skin_tone_label"), Attribute::skin_tone_label);
  EXPECT_THROW(parse_attribute("height"), UsageError);
  EXPECT_THROW(parse_gender("other"), SchemaError);
}
