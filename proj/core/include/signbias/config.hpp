#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "signbias/classifier.hpp"
#include "signbias/dataset.hpp"
#include "signbias/quality.hpp"
#include "signbias/sampler.hpp"
#include "signbias/synth.hpp"

namespace signbias {

// Parsed value of a minimal TOML subset: strings, booleans, numbers and
// one-level arrays of those. Numbers keep their source text so that 64-bit
// integers survive.
struct ConfigValue {
  enum class Kind { string, boolean, number, array };
  Kind kind = Kind::string;
  std::string text;
  std::vector<ConfigValue> items;
  int line = 0;
};

// "section.key" -> value; top-level keys have no prefix.
using ConfigTable = std::map<std::string, ConfigValue, std::less<>>;

// Supports comments, [section] headers, key = value, basic "..." strings with
// \" \\ \n \t escapes, true/false, integers, floats and arrays that may span
// lines. Throws UsageError with the line number on anything else.
ConfigTable parse_config_table(std::string_view text, std::string_view source = "<config>");

struct SamplerOptions {
  Strategy strategy = Strategy::uniform;
  Attribute group_attribute = Attribute::gender;
  std::string group_value = "female";
  std::size_t epoch_size = 0;
};

struct AuditOptions {
  Attribute attribute = Attribute::gender;
  std::string parity_group = "female";
  std::string reference_group = "male";
  std::size_t mi_bins = 10;
  std::size_t histogram_bins = 20;
  Split split = Split::test;
};

struct ExperimentOptions {
  std::vector<std::string> strategies = {"uniform", "video_length", "video_length_group",
                                         "quality_high", "quality_low", "group_subset"};
  std::vector<std::string> subset_values = {"female", "male"};
};

struct RunConfig {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::filesystem::path out = "signbias_out";
  std::filesystem::path dataset;  // empty: <out>/dataset
  bool quality_features = true;
  std::filesystem::path external_scores;  // quality table for external mode

  GenConfig generator;
  ScorerConfig scorer = ScorerConfig::default_linear();
  SamplerOptions sampler;
  TrainConfig train;
  AuditOptions audit;
  ExperimentOptions experiment;

  std::filesystem::path dataset_dir() const { return dataset.empty() ? out / "dataset" : dataset; }
};

// Applies table entries over `base`; unknown keys and type mismatches throw
// UsageError naming the key.
RunConfig apply_config(const ConfigTable& table, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Derives the generator, sampler and training seeds from the master seed
// through named streams.
void derive_component_seeds(RunConfig& cfg);

// Canonical text of every setting that affects outputs (paths and thread
// count excluded), in a fixed order; the hash is FNV-1a 64 over it.
std::string canonical_config(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);
// "signbias config_hash=<hex> seed=<n>", written as the first line of CSVs.
std::string provenance_line(const RunConfig& cfg);

}  // namespace signbias
