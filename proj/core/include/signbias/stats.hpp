#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "signbias/dataset.hpp"

namespace signbias {

struct EvalOutcome {
  std::string video_id;
  std::vector<std::string> ranked_labels;  // best first, no duplicates
  std::string true_gloss;
  bool top1 = false;
  bool top5 = false;
  bool top10 = false;

  // Rank (1-based) of the true gloss, 0 if absent.
  std::size_t true_rank() const;
};

// Fills the top-k flags from the ranking.
EvalOutcome make_outcome(std::string video_id, std::vector<std::string> ranked_labels,
                         std::string true_gloss);

// Fraction of outcomes whose true gloss is among the first k labels. Throws
// DomainError on an empty set or k == 0.
double topk_accuracy(std::span<const EvalOutcome> outcomes, std::size_t k);

struct AccuracyTriple {
  std::size_t n = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  double top10 = 0.0;
};

AccuracyTriple accuracy_triple(std::span<const EvalOutcome> outcomes);

// Ratio of a group's accuracy to a reference group's; nullopt ("undefined
// parity") when the reference accuracy is 0.
std::optional<double> parity(double group_acc, double reference_acc);

struct GroupRow {
  std::string value;
  AccuracyTriple acc;
};

struct GroupReport {
  Attribute attribute = Attribute::gender;
  std::vector<GroupRow> rows;  // sorted by value
  AccuracyTriple unspecified;  // videos lacking the attribute
  std::string parity_group;
  std::string reference_group;
  std::optional<double> parity;  // top-1 parity_group / reference_group
};

// Outcomes are matched to dataset videos by video_id; unknown ids throw
// IntegrityError.
GroupReport group_metrics(std::span<const EvalOutcome> outcomes, const Dataset& dataset,
                          Attribute attribute, std::string_view parity_group = "female",
                          std::string_view reference_group = "male");

struct BucketRow {
  std::string label;
  double lo = 0.0;  // inclusive, -inf for the first bucket
  double hi = 0.0;  // exclusive, +inf for the last bucket
  AccuracyTriple acc;
};

struct BucketTable {
  std::vector<double> edges;
  std::vector<BucketRow> rows;
  std::size_t skipped_nonfinite = 0;
};

inline const std::vector<double>& default_z_edges() {
  static const std::vector<double> edges = {-2.0, -1.0, 0.0, 1.0, 2.0};
  return edges;
}

// Half-open buckets (-inf, e0), [e0, e1), ..., [e_last, inf). z is parallel to
// outcomes; non-finite z values are skipped and counted.
BucketTable bucket_accuracy(std::span<const double> z, std::span<const EvalOutcome> outcomes,
                            const std::vector<double>& edges = default_z_edges());

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool defined = true;  // false when either input is constant
};

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks; two-sided p from Student's t with
// n - 2 degrees of freedom. Throws DomainError for n < 3 or length mismatch.
CorrelationResult spearman(std::span<const double> x, std::span<const double> y);

struct PermutationPValues {
  double two_sided = 1.0;  // P(|S| >= |S_obs|)
  double lower = 1.0;      // P(S <= S_obs)
  double upper = 1.0;      // P(S >= S_obs)
  std::size_t permutations = 0;
};

// Exact null distribution of Spearman's statistic by enumerating all n!
// pairings (n <= 12). Tie-aware: uses the observed average ranks.
PermutationPValues spearman_exact_p(std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kMaxExactPermutationN = 12;

// Plug-in mutual information (nats) between two discrete codings.
double mutual_information_discrete(std::span<const int> a, std::span<const int> b);

// Quantile binning into at most `bins` cells; equal values share a cell.
std::vector<int> quantile_bin(std::span<const double> values, std::size_t bins);

// MI between a continuous feature (quantile-binned) and a discrete outcome
// coding (0/1 correctness). A feature with a single distinct value yields 0.
double mutual_information(std::span<const double> feature, std::span<const int> correct,
                          std::size_t bins = 10);
double mutual_information_categorical(std::span<const std::string> feature,
                                      std::span<const int> correct);

enum class FeatureKind { numeric, categorical };

// One per-video feature; missing entries are skipped by the MI estimate.
struct FeatureColumn {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::optional<double>> numeric;
  std::vector<std::optional<std::string>> categorical;
};

struct MiEntry {
  std::string feature;
  double mi = 0.0;
  std::size_t n = 0;
};

// MI of every column against correctness, sorted descending (name breaks
// ties). Every name in `required` must be present or SchemaError names it.
std::vector<MiEntry> mi_ranking(const std::vector<FeatureColumn>& columns,
                                std::span<const int> correct, std::size_t bins = 10,
                                const std::vector<std::string>& required = {});

struct ValueCount {
  std::string value;
  std::size_t count = 0;
  double percent = 0.0;  // of participants with the attribute specified
};

struct AttributeSummary {
  Attribute attribute = Attribute::gender;
  std::vector<ValueCount> values;
  std::size_t unspecified = 0;
  std::size_t total = 0;
};

// Participant counts per value for gender, age_decade, region and asl_level.
std::vector<AttributeSummary> demographics_summary(const Dataset& dataset);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

// Equal-width bins over the observed range; the maximum lands in the last bin.
Histogram feature_histogram(std::span<const double> values, std::size_t bins);

}  // namespace signbias
