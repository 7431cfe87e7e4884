#include "signbias/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

namespace {

using Kind = ConfigValue::Kind;

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  ConfigTable run() {
    ConfigTable table;
    std::string section;
    while (true) {
      skip_blank_lines();
      if (pos_ >= text_.size()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        section = read_key();
        skip_spaces();
        expect(']');
        end_of_line();
        continue;
      }
      const int key_line = line_;
      std::string key = read_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      ConfigValue value = read_value(false);
      value.line = key_line;
      end_of_line();
      const std::string full = section.empty() ? key : section + "." + key;
      if (!table.emplace(full, std::move(value)).second) fail("duplicate key '" + full + "'");
    }
    return table;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw UsageError(std::string(source_) + ":" + std::to_string(line_) + ": " + what);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (peek() == ' ' || peek() == '\t' || peek() == '\r') ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (pos_ < text_.size()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        ++pos_;
        ++line_;
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (pos_ >= text_.size()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
    ++line_;
  }

  std::string read_key() {
    const auto start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' || peek() == '.') ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  ConfigValue read_value(bool in_array) {
    ConfigValue v;
    v.line = line_;
    const char c = peek();
    if (c == '"') {
      v.kind = Kind::string;
      ++pos_;
      while (true) {
        if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
        char ch = text_[pos_++];
        if (ch == '"') break;
        if (ch == '\\') {
          const char e = text_[pos_++];
          switch (e) {
            case '"': ch = '"'; break;
            case '\\': ch = '\\'; break;
            case 'n': ch = '\n'; break;
            case 't': ch = '\t'; break;
            default: fail(std::string("unsupported escape \\") + e);
          }
        }
        v.text.push_back(ch);
      }
      return v;
    }
    if (c == '[') {
      if (in_array) fail("nested arrays are not supported");
      v.kind = Kind::array;
      ++pos_;
      while (true) {
        skip_blank_lines();
        if (peek() == ']') {
          ++pos_;
          return v;
        }
        v.items.push_back(read_value(true));
        skip_blank_lines();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    }
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' &&
           peek() != ']' && peek() != '#') {
      ++pos_;
    }
    v.text = std::string(text_.substr(start, pos_ - start));
    if (v.text == "true" || v.text == "false") {
      v.kind = Kind::boolean;
    } else if (!v.text.empty()) {
      v.kind = Kind::number;
      std::string cleaned;
      for (char ch : v.text) {
        if (ch != '_') cleaned.push_back(ch);
      }
      double d = 0;
      const auto* b = cleaned.data();
      const auto [p, ec] = std::from_chars(b + (cleaned[0] == '+' ? 1 : 0), b + cleaned.size(), d);
      if (ec != std::errc{} || p != b + cleaned.size()) fail("invalid value '" + v.text + "'");
      v.text = cleaned;
    } else {
      fail("missing value");
    }
    return v;
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Reader {
 public:
  explicit Reader(const ConfigTable& table) : table_(table) {}

  const ConfigValue* find(std::string_view key) {
    auto it = table_.find(key);
    if (it == table_.end()) return nullptr;
    used_.emplace(key);
    return &it->second;
  }

  [[noreturn]] static void bad(std::string_view key, const ConfigValue& v, std::string_view expected) {
    throw UsageError("config key '" + std::string(key) + "' (line " + std::to_string(v.line) + "): expected " +
                     std::string(expected));
  }

  static double as_double(std::string_view key, const ConfigValue& v) {
    if (v.kind != Kind::number) bad(key, v, "a number");
    double d = 0;
    const auto* b = v.text.data() + (v.text[0] == '+' ? 1 : 0);
    std::from_chars(b, v.text.data() + v.text.size(), d);
    return d;
  }

  void real(std::string_view key, double& out) {
    if (const auto* v = find(key)) out = as_double(key, *v);
  }

  template <typename Int>
  void integer(std::string_view key, Int& out) {
    const auto* v = find(key);
    if (!v) return;
    if (v->kind != Kind::number) bad(key, *v, "an integer");
    Int value{};
    const auto* b = v->text.data() + (v->text[0] == '+' ? 1 : 0);
    const auto [p, ec] = std::from_chars(b, v->text.data() + v->text.size(), value);
    if (ec != std::errc{} || p != v->text.data() + v->text.size()) bad(key, *v, "a non-negative integer in range");
    out = value;
  }

  void boolean(std::string_view key, bool& out) {
    const auto* v = find(key);
    if (!v) return;
    if (v->kind != Kind::boolean) bad(key, *v, "true or false");
    out = v->text == "true";
  }

  bool string(std::string_view key, std::string& out) {
    const auto* v = find(key);
    if (!v) return false;
    if (v->kind != Kind::string) bad(key, *v, "a string");
    out = v->text;
    return true;
  }

  void path(std::string_view key, std::filesystem::path& out) {
    std::string s;
    if (string(key, s)) out = s;
  }

  bool reals(std::string_view key, std::vector<double>& out) {
    const auto* v = find(key);
    if (!v) return false;
    if (v->kind != Kind::array) bad(key, *v, "an array of numbers");
    out.clear();
    for (const auto& item : v->items) out.push_back(as_double(key, item));
    return true;
  }

  void strings(std::string_view key, std::vector<std::string>& out) {
    const auto* v = find(key);
    if (!v) return;
    if (v->kind != Kind::array) bad(key, *v, "an array of strings");
    out.clear();
    for (const auto& item : v->items) {
      if (item.kind != Kind::string) bad(key, item, "an array of strings");
      out.push_back(item.text);
    }
  }

  void check_all_used() const {
    for (const auto& [key, v] : table_) {
      if (!used_.count(key)) {
        throw UsageError("unknown config key '" + key + "' (line " + std::to_string(v.line) + ")");
      }
    }
  }

 private:
  const ConfigTable& table_;
  std::set<std::string, std::less<>> used_;
};

std::string fmt(double v) { return format_double(v); }

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out + "\"";
}

template <typename Range, typename F>
std::string array_of(const Range& r, F&& f) {
  std::string out = "[";
  bool first = true;
  for (const auto& x : r) {
    if (!first) out += ", ";
    first = false;
    out += f(x);
  }
  return out + "]";
}

}  // namespace

ConfigTable parse_config_table(std::string_view text, std::string_view source) {
  return Parser(text, source).run();
}

RunConfig apply_config(const ConfigTable& table, RunConfig cfg) {
  Reader r(table);
  r.integer("seed", cfg.seed);
  r.integer("threads", cfg.threads);
  r.path("out", cfg.out);
  r.path("dataset", cfg.dataset);

  auto& g = cfg.generator;
  r.integer("generator.participants", g.participants);
  r.real("generator.female_fraction", g.female_fraction);
  r.real("generator.unspecified_gender_fraction", g.unspecified_gender_fraction);
  std::vector<double> ages;
  if (r.reals("generator.age_mix", ages)) {
    if (ages.size() != g.age_mix.size()) throw UsageError("config key 'generator.age_mix': expected 6 values");
    std::copy(ages.begin(), ages.end(), g.age_mix.begin());
  }
  r.real("generator.unspecified_age_fraction", g.unspecified_age_fraction);
  r.integer("generator.glosses", g.glosses);
  r.integer("generator.videos_per_participant", g.videos_per_participant);
  r.boolean("generator.seed_signer", g.seed_signer);
  r.real("generator.gender_length_offset", g.gender_length_offset);
  r.real("generator.age_length_slope", g.age_length_slope);
  r.real("generator.length_cv", g.length_cv);
  r.real("generator.length_content_coupling", g.length_content_coupling);
  r.real("generator.quality_factor_min", g.quality_factor_min);
  r.real("generator.quality_factor_max", g.quality_factor_max);
  r.real("generator.female_quality_shift", g.female_quality_shift);
  r.real("generator.quality_video_jitter", g.quality_video_jitter);
  r.real("generator.base_keypoint_noise", g.base_keypoint_noise);
  r.real("generator.quality_error_coupling", g.quality_error_coupling);
  r.real("generator.quality_hand_collapse", g.quality_hand_collapse);
  r.real("generator.style_sd", g.style_sd);
  r.real("generator.gender_variant_sd", g.gender_variant_sd);
  r.real("generator.speed_variance", g.speed_variance);
  r.boolean("generator.frames", g.frames);
  r.integer("generator.frame_width", g.frame_width);
  r.integer("generator.frame_height", g.frame_height);
  r.integer("generator.frames_per_video", g.frames_per_video);
  r.real("generator.frame_noise_variance", g.frame_noise_variance);
  r.real("generator.train_fraction", g.train_fraction);
  r.real("generator.val_fraction", g.val_fraction);

  r.boolean("features.quality", cfg.quality_features);

  std::string text;
  if (r.string("quality.mode", text)) {
    if (text == "linear") {
      cfg.scorer.mode = ScorerMode::linear;
    } else if (text == "external") {
      cfg.scorer.mode = ScorerMode::external;
    } else {
      throw UsageError("config key 'quality.mode': expected \"linear\" or \"external\"");
    }
  }
  std::vector<double> weights;
  if (r.reals("quality.weights", weights)) {
    if (weights.size() != cfg.scorer.weights.size()) {
      throw UsageError("config key 'quality.weights': expected 37 values (36 weights, then the bias)");
    }
    std::copy(weights.begin(), weights.end(), cfg.scorer.weights.begin());
  }
  r.integer("quality.frames_per_video", cfg.scorer.frames_per_video);
  r.path("quality.external_scores", cfg.external_scores);

  if (r.string("sampler.strategy", text)) cfg.sampler.strategy = parse_strategy(text);
  if (r.string("sampler.group_attribute", text)) cfg.sampler.group_attribute = parse_attribute(text);
  r.string("sampler.group_value", cfg.sampler.group_value);
  r.integer("sampler.epoch_size", cfg.sampler.epoch_size);

  auto& t = cfg.train;
  r.real("train.learning_rate", t.learning_rate);
  r.integer("train.batch_size", t.batch_size);
  r.integer("train.epochs", t.epochs);
  r.real("train.l2", t.l2);
  r.boolean("train.augment", t.augment);
  r.real("train.shear_range", t.augmentation.shear_range);
  r.real("train.rotation_deg", t.augmentation.rotation_deg);
  r.boolean("train.horizontal_flip", t.augmentation.horizontal_flip);
  r.integer("train.frame_cap", t.frame_cap);

  if (r.string("audit.attribute", text)) cfg.audit.attribute = parse_attribute(text);
  r.string("audit.parity_group", cfg.audit.parity_group);
  r.string("audit.reference_group", cfg.audit.reference_group);
  r.integer("audit.mi_bins", cfg.audit.mi_bins);
  r.integer("audit.histogram_bins", cfg.audit.histogram_bins);
  if (r.string("audit.split", text)) cfg.audit.split = parse_split(text);

  r.strings("experiment.strategies", cfg.experiment.strategies);
  r.strings("experiment.subset_values", cfg.experiment.subset_values);

  r.check_all_used();

  if (cfg.train.batch_size == 0) throw UsageError("train.batch_size must be >= 1");
  if (cfg.train.frame_cap < 2) throw UsageError("train.frame_cap must be >= 2");
  if (cfg.audit.mi_bins < 2) throw UsageError("audit.mi_bins must be >= 2");
  if (cfg.audit.histogram_bins < 1) throw UsageError("audit.histogram_bins must be >= 1");
  if (cfg.scorer.frames_per_video < 1) throw UsageError("quality.frames_per_video must be >= 1");
  for (const auto& s : cfg.experiment.strategies) {
    if (s != "group_subset") parse_strategy(s);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  const auto text = read_text_file(path);
  return apply_config(parse_config_table(text, path.string()), std::move(base));
}

void derive_component_seeds(RunConfig& cfg) {
  cfg.generator.seed = derive_seed(cfg.seed, "gen");
  cfg.train.seed = derive_seed(cfg.seed, "train");
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream o;
  const auto& g = cfg.generator;
  o << "seed = " << cfg.seed << "\n";
  o << "[generator]\n"
    << "participants = " << g.participants << "\n"
    << "female_fraction = " << fmt(g.female_fraction) << "\n"
    << "unspecified_gender_fraction = " << fmt(g.unspecified_gender_fraction) << "\n"
    << "age_mix = " << array_of(g.age_mix, fmt) << "\n"
    << "unspecified_age_fraction = " << fmt(g.unspecified_age_fraction) << "\n"
    << "glosses = " << g.glosses << "\n"
    << "videos_per_participant = " << g.videos_per_participant << "\n"
    << "seed_signer = " << (g.seed_signer ? "true" : "false") << "\n"
    << "gender_length_offset = " << fmt(g.gender_length_offset) << "\n"
    << "age_length_slope = " << fmt(g.age_length_slope) << "\n"
    << "length_cv = " << fmt(g.length_cv) << "\n"
    << "length_content_coupling = " << fmt(g.length_content_coupling) << "\n"
    << "quality_factor_min = " << fmt(g.quality_factor_min) << "\n"
    << "quality_factor_max = " << fmt(g.quality_factor_max) << "\n"
    << "female_quality_shift = " << fmt(g.female_quality_shift) << "\n"
    << "quality_video_jitter = " << fmt(g.quality_video_jitter) << "\n"
    << "base_keypoint_noise = " << fmt(g.base_keypoint_noise) << "\n"
    << "quality_error_coupling = " << fmt(g.quality_error_coupling) << "\n"
    << "quality_hand_collapse = " << fmt(g.quality_hand_collapse) << "\n"
    << "style_sd = " << fmt(g.style_sd) << "\n"
    << "gender_variant_sd = " << fmt(g.gender_variant_sd) << "\n"
    << "speed_variance = " << fmt(g.speed_variance) << "\n"
    << "frames = " << (g.frames ? "true" : "false") << "\n"
    << "frame_width = " << g.frame_width << "\n"
    << "frame_height = " << g.frame_height << "\n"
    << "frames_per_video = " << g.frames_per_video << "\n"
    << "frame_noise_variance = " << fmt(g.frame_noise_variance) << "\n"
    << "train_fraction = " << fmt(g.train_fraction) << "\n"
    << "val_fraction = " << fmt(g.val_fraction) << "\n";
  o << "[features]\nquality = " << (cfg.quality_features ? "true" : "false") << "\n";
  o << "[quality]\nmode = " << (cfg.scorer.mode == ScorerMode::linear ? "\"linear\"" : "\"external\"") << "\n"
    << "weights = " << array_of(cfg.scorer.weights, fmt) << "\n"
    << "frames_per_video = " << cfg.scorer.frames_per_video << "\n";
  o << "[sampler]\nstrategy = " << quoted(to_string(cfg.sampler.strategy)) << "\n"
    << "group_attribute = " << quoted(to_string(cfg.sampler.group_attribute)) << "\n"
    << "group_value = " << quoted(cfg.sampler.group_value) << "\n"
    << "epoch_size = " << cfg.sampler.epoch_size << "\n";
  const auto& t = cfg.train;
  o << "[train]\nlearning_rate = " << fmt(t.learning_rate) << "\n"
    << "batch_size = " << t.batch_size << "\n"
    << "epochs = " << t.epochs << "\n"
    << "l2 = " << fmt(t.l2) << "\n"
    << "augment = " << (t.augment ? "true" : "false") << "\n"
    << "shear_range = " << fmt(t.augmentation.shear_range) << "\n"
    << "rotation_deg = " << fmt(t.augmentation.rotation_deg) << "\n"
    << "horizontal_flip = " << (t.augmentation.horizontal_flip ? "true" : "false") << "\n"
    << "frame_cap = " << t.frame_cap << "\n";
  o << "[audit]\nattribute = " << quoted(to_string(cfg.audit.attribute)) << "\n"
    << "parity_group = " << quoted(cfg.audit.parity_group) << "\n"
    << "reference_group = " << quoted(cfg.audit.reference_group) << "\n"
    << "mi_bins = " << cfg.audit.mi_bins << "\n"
    << "histogram_bins = " << cfg.audit.histogram_bins << "\n"
    << "split = " << quoted(to_string(cfg.audit.split)) << "\n";
  o << "[experiment]\nstrategies = " << array_of(cfg.experiment.strategies, quoted) << "\n"
    << "subset_values = " << array_of(cfg.experiment.subset_values, quoted) << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_line(const RunConfig& cfg) {
  return "signbias config_hash=" + config_hash(cfg) + " seed=" + std::to_string(cfg.seed);
}

}  // namespace signbias
