#include <gtest/gtest.h>

#include <cstdlib>
#include <map>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"
#include "signbias/pipeline.hpp"
#include "test_util.hpp"

using namespace signbias;

namespace {

RunConfig small_run(const std::filesystem::path& out, std::uint64_t seed = 4) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.out = out;
  cfg.generator.participants = 12;
  cfg.generator.glosses = 10;
  cfg.generator.videos_per_participant = 8;
  cfg.generator.frame_width = 32;
  cfg.generator.frame_height = 32;
  cfg.generator.frames_per_video = 2;
  cfg.scorer.frames_per_video = 2;
  cfg.train.epochs = 5;
  return cfg;
}

std::map<std::string, std::string> outputs(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".csv" || ext == ".json")) {
      files[std::filesystem::relative(e.path(), root).string()] = read_text_file(e.path());
    }
  }
  return files;
}

}  // namespace

TEST(Pipeline, SynthFeaturesTrainAudit) {
  testutil::TempDir dir("pipe");
  const auto cfg = small_run(dir.path());
  const auto gen = run_synth(cfg);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "dataset" / "ground_truth.csv"));

  const auto f = run_features(cfg, false);
  EXPECT_EQ(f.videos, gen.dataset.size());
  EXPECT_EQ(f.trajectory_computed, gen.dataset.size());
  EXPECT_EQ(f.quality_computed, gen.dataset.size());

  const auto again = run_features(cfg, false);
  EXPECT_EQ(again.trajectory_computed, 0u);
  EXPECT_EQ(again.quality_computed, 0u);
  EXPECT_EQ(run_features(cfg, true).trajectory_computed, gen.dataset.size());

  const auto data = prepare_data(cfg);
  const auto t = run_train(cfg, "quality_low", data);
  EXPECT_EQ(t.label, "quality_low");
  EXPECT_GT(t.test_videos, 0u);
  const auto preds = read_predictions(t.predictions);
  EXPECT_EQ(preds.size(), t.test_videos);
  for (const auto& [id, ranked] : preds) EXPECT_EQ(ranked.size(), 10u);

  const auto weights = read_csv(dir.path() / "train" / "quality_low" / "weights.csv");
  EXPECT_EQ(weights.rows.size(), t.train_videos);
  ASSERT_FALSE(weights.comments.empty());
  EXPECT_NE(weights.comments[0].find("config_hash="), std::string::npos);

  const auto report = run_audit(cfg, data, t.predictions, dir.path() / "audit" / "quality_low", "quality_low");
  const auto audit_dir = dir.path() / "audit" / "quality_low";
  for (const char* name : {"report.json", "groups.csv", "parity.csv", "buckets.csv", "correlations.csv",
                           "mi_ranking.csv", "demographics.csv", "histograms.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(audit_dir / name)) << name;
  }
  const auto j = nlohmann::ordered_json::parse(read_text_file(audit_dir / "report.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"summary", "groups", "buckets", "correlations", "mi_ranking", "metadata"}));
  EXPECT_EQ(j["metadata"]["seed"], 4);
  EXPECT_EQ(j["metadata"]["config_hash"], config_hash(cfg));
  EXPECT_EQ(j["summary"]["evaluated"], t.test_videos);
  EXPECT_EQ(report_json(report), read_text_file(audit_dir / "report.json"));
}

TEST(Pipeline, GroupSubsetTrainsOnOneGroup) {
  testutil::TempDir dir("pipe_subset");
  auto cfg = small_run(dir.path());
  run_synth(cfg);
  run_features(cfg, false);
  const auto data = prepare_data(cfg);
  const auto t = run_train(cfg, "group_subset_male", data);
  EXPECT_EQ(t.label, "group_subset_male");
  std::size_t male_train = 0;
  for (const auto& v : data.dataset.videos()) {
    male_train += v.split == Split::train && data.dataset.participant_of(v).gender == Gender::male;
  }
  EXPECT_EQ(t.train_videos, male_train);
  EXPECT_THROW(run_train(cfg, "group_subset_nobody", data), UsageError);
  EXPECT_THROW(run_train(cfg, "bogus", data), UsageError);
}

TEST(Pipeline, ExperimentIsDeterministic) {
  testutil::TempDir a("exp_a"), b("exp_b");
  auto ca = small_run(a.path(), 9);
  auto cb = small_run(b.path(), 9);
  cb.threads = 2;
  const auto ra = run_experiment(ca, false);
  run_experiment(cb, false);
  EXPECT_EQ(ra.rows.size(), 7u);
  const auto oa = outputs(a.path()), ob = outputs(b.path());
  EXPECT_EQ(oa, ob);
  EXPECT_TRUE(oa.count("experiment/comparison.csv"));
  EXPECT_TRUE(oa.count("experiment/comparison.json"));
}

TEST(Pipeline, MissingFeaturesIsUsageError) {
  testutil::TempDir dir("pipe_nofeat");
  const auto cfg = small_run(dir.path());
  run_synth(cfg);
  const auto data = prepare_data(cfg);
  EXPECT_THROW(run_train(cfg, "quality_low", data), UsageError);
  EXPECT_THROW(run_train(cfg, "video_length", data), UsageError);
}

#ifdef SIGNBIAS_TOOL_PATH
namespace {

int run_tool(const std::string& args) {
  const std::string cmd = std::string(SIGNBIAS_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodesAndPrecedence) {
  testutil::TempDir dir("cli");
  const auto cfg_path = dir.path() / "run.toml";
  write_text_file(cfg_path,
                  "seed = 5\n[generator]\nparticipants = 6\nglosses = 5\nvideos_per_participant = 3\n"
                  "frames = false\n");
  const std::string out = (dir.path() / "out").string();

  EXPECT_EQ(run_tool("synth --config " + cfg_path.string() + " --out " + out + " --seed 7"), 0);
  const auto truth = read_csv(dir.path() / "out" / "dataset" / "ground_truth.csv");
  ASSERT_FALSE(truth.comments.empty());
  EXPECT_NE(truth.comments[0].find("seed=7"), std::string::npos);

  EXPECT_EQ(run_tool("synth --config " + cfg_path.string() + " --out " + out), 0);
  EXPECT_NE(read_csv(dir.path() / "out" / "dataset" / "ground_truth.csv").comments[0].find("seed=5"),
            std::string::npos);

  const auto bad = dir.path() / "bad.toml";
  write_text_file(bad, "[generator]\nno_such_key = 1\n");
  EXPECT_EQ(run_tool("synth --config " + bad.string() + " --out " + out), 2);
  EXPECT_EQ(run_tool("frobnicate"), 2);
  EXPECT_EQ(run_tool("audit --out " + out), 2);

  const auto empty_preds = dir.path() / "empty.csv";
  write_text_file(empty_preds, "video_id,rank,gloss\n");
  EXPECT_EQ(run_tool("audit --config " + cfg_path.string() + " --out " + out + " --predictions " +
                     empty_preds.string()),
            2);

  const auto garbled = dir.path() / "garbled.csv";
  write_text_file(garbled, "video_id,rank\nx,1\n");
  EXPECT_EQ(run_tool("audit --config " + cfg_path.string() + " --out " + out + " --predictions " +
                     garbled.string()),
            3);
  EXPECT_EQ(run_tool("features --config " + cfg_path.string() + " --out " + out + " --dataset " +
                     (dir.path() / "missing").string()),
            4);
}
#endif
