// signbias: synthetic ISLR bias audits and resampling experiments.
//
// Settings come from built-in defaults, then the --config file, then flags;
// later sources win.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "signbias/config.hpp"
#include "signbias/errors.hpp"
#include "signbias/pipeline.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> dataset;
  std::optional<unsigned> threads;
  bool force = false;
};

signbias::RunConfig resolve(const GlobalFlags& f) {
  signbias::RunConfig cfg;
  if (!f.config.empty()) cfg = signbias::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.dataset) cfg.dataset = *f.dataset;
  if (f.threads) cfg.threads = *f.threads;
  if (cfg.threads == 0) cfg.threads = 1;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bias audits and weighted-resampling experiments for pose-based sign recognition"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", SIGNBIAS_VERSION);

  GlobalFlags flags;
  app.add_option("--config", flags.config, "TOML-style config file")->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "master seed");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--dataset", flags.dataset, "existing dataset directory (default <out>/dataset)");
  app.add_option("--threads", flags.threads, "worker threads");
  app.add_flag("--force", flags.force, "recompute outputs that already exist");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  auto* features = app.add_subcommand("features", "extract trajectory and quality features");
  auto* train = app.add_subcommand("train", "train the classifier under a sampling strategy");
  std::string strategy;
  train->add_option("--strategy", strategy,
                    "uniform | video_length | video_length_group | quality_high | quality_low | group_subset");
  auto* audit = app.add_subcommand("audit", "audit a predictions file");
  std::string predictions;
  audit->add_option("--predictions", predictions, "predictions CSV (video_id,rank,gloss)")
      ->required()
      ->check(CLI::ExistingFile);
  auto* experiment = app.add_subcommand("experiment", "synth, features, every strategy, audits, comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every parse failure is a usage error.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const auto cfg = resolve(flags);
    if (synth->parsed()) return signbias::cmd_synth(cfg, std::cout);
    if (features->parsed()) return signbias::cmd_features(cfg, flags.force, std::cout);
    if (train->parsed()) {
      return signbias::cmd_train(cfg, strategy.empty() ? std::string(signbias::to_string(cfg.sampler.strategy)) : strategy,
                                 std::cout);
    }
    if (audit->parsed()) return signbias::cmd_audit(cfg, predictions, std::cout);
    if (experiment->parsed()) return signbias::cmd_experiment(cfg, flags.force, std::cout);
  } catch (const signbias::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const signbias::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 3;
  } catch (const signbias::IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 3;
  } catch (const signbias::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
