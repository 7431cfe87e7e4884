#include "signbias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include <boost/math/distributions/students_t.hpp>

#include "signbias/errors.hpp"

namespace signbias {

std::size_t EvalOutcome::true_rank() const {
  for (std::size_t i = 0; i < ranked_labels.size(); ++i) {
    if (ranked_labels[i] == true_gloss) return i + 1;
  }
  return 0;
}

EvalOutcome make_outcome(std::string video_id, std::vector<std::string> ranked_labels,
                         std::string true_gloss) {
  EvalOutcome o;
  o.video_id = std::move(video_id);
  o.ranked_labels = std::move(ranked_labels);
  o.true_gloss = std::move(true_gloss);
  const auto rank = o.true_rank();
  o.top1 = rank >= 1 && rank <= 1;
  o.top5 = rank >= 1 && rank <= 5;
  o.top10 = rank >= 1 && rank <= 10;
  return o;
}

double topk_accuracy(std::span<const EvalOutcome> outcomes, std::size_t k) {
  if (outcomes.empty()) throw DomainError("topk_accuracy: empty outcome set");
  if (k == 0) throw DomainError("topk_accuracy: k must be >= 1");
  std::size_t hits = 0;
  for (const auto& o : outcomes) {
    const auto rank = o.true_rank();
    if (rank >= 1 && rank <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

AccuracyTriple accuracy_triple(std::span<const EvalOutcome> outcomes) {
  AccuracyTriple t;
  t.n = outcomes.size();
  if (t.n == 0) return t;
  std::size_t h1 = 0, h5 = 0, h10 = 0;
  for (const auto& o : outcomes) {
    h1 += o.top1;
    h5 += o.top5;
    h10 += o.top10;
  }
  const double n = static_cast<double>(t.n);
  t.top1 = static_cast<double>(h1) / n;
  t.top5 = static_cast<double>(h5) / n;
  t.top10 = static_cast<double>(h10) / n;
  return t;
}

std::optional<double> parity(double group_acc, double reference_acc) {
  if (!(reference_acc > 0.0)) return std::nullopt;
  return group_acc / reference_acc;
}

GroupReport group_metrics(std::span<const EvalOutcome> outcomes, const Dataset& dataset,
                          Attribute attribute, std::string_view parity_group,
                          std::string_view reference_group) {
  std::map<std::string, std::vector<EvalOutcome>> groups;
  std::vector<EvalOutcome> unspecified;
  for (const auto& o : outcomes) {
    const auto idx = dataset.video_index(o.video_id);
    if (!idx) throw IntegrityError("outcome references unknown video_id '" + o.video_id + "'");
    const auto value = attribute_value(dataset, dataset.videos()[*idx], attribute);
    if (value) {
      groups[*value].push_back(o);
    } else {
      unspecified.push_back(o);
    }
  }
  GroupReport report;
  report.attribute = attribute;
  report.parity_group = parity_group;
  report.reference_group = reference_group;
  for (const auto& [value, members] : groups) {
    report.rows.push_back({value, accuracy_triple(members)});
  }
  report.unspecified = accuracy_triple(unspecified);
  const auto find = [&](std::string_view v) -> const GroupRow* {
    for (const auto& r : report.rows) {
      if (r.value == v) return &r;
    }
    return nullptr;
  };
  const auto* g = find(parity_group);
  const auto* ref = find(reference_group);
  if (g && ref) report.parity = parity(g->acc.top1, ref->acc.top1);
  return report;
}

BucketTable bucket_accuracy(std::span<const double> z, std::span<const EvalOutcome> outcomes,
                            const std::vector<double>& edges) {
  if (z.size() != outcomes.size()) throw DomainError("bucket_accuracy: z and outcomes differ in length");
  if (!std::is_sorted(edges.begin(), edges.end())) throw DomainError("bucket_accuracy: edges must be sorted");
  BucketTable table;
  table.edges = edges;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<EvalOutcome>> members(edges.size() + 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) {
      ++table.skipped_nonfinite;
      continue;
    }
    const auto b = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), z[i]) - edges.begin());
    members[b].push_back(outcomes[i]);
  }
  const auto fmt = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  for (std::size_t b = 0; b <= edges.size(); ++b) {
    BucketRow row;
    row.lo = b == 0 ? -inf : edges[b - 1];
    row.hi = b == edges.size() ? inf : edges[b];
    if (b == 0) {
      row.label = "z<" + fmt(row.hi);
    } else if (b == edges.size()) {
      row.label = "z>=" + fmt(row.lo);
    } else {
      row.label = fmt(row.lo) + "<=z<" + fmt(row.hi);
    }
    row.acc = accuracy_triple(members[b]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean of (i+1 .. j+1).
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(std::span<const double> a, std::span<const double> b, bool& defined) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    defined = false;
    return std::numeric_limits<double>::quiet_NaN();
  }
  defined = true;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

CorrelationResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman: length mismatch");
  if (x.size() < 3) throw DomainError("spearman: need n >= 3");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("spearman: non-finite input");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  CorrelationResult res;
  res.n = x.size();
  res.rho = pearson(rx, ry, res.defined);
  if (!res.defined) {
    res.p_value = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  const double dof = static_cast<double>(res.n - 2);
  const double denom = (1.0 - res.rho) * (1.0 + res.rho);
  if (denom <= 0.0) {
    res.p_value = 0.0;
    return res;
  }
  const double t = res.rho * std::sqrt(dof / denom);
  boost::math::students_t_distribution<double> dist(dof);
  res.p_value = std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
  return res;
}

PermutationPValues spearman_exact_p(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("spearman_exact_p: length mismatch");
  const std::size_t n = x.size();
  if (n < 2 || n > kMaxExactPermutationN) {
    throw DomainError("spearman_exact_p: n must be in [2, 12]");
  }
  // Doubled, centred average ranks are integers, so the statistic
  // S = sum cx_i * cy_pi(i) is exact.
  const auto to_centered = [n](const std::vector<double>& r) {
    std::vector<std::int64_t> c(n);
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = static_cast<std::int64_t>(std::llround(2.0 * r[i])) - static_cast<std::int64_t>(n + 1);
    }
    return c;
  };
  const auto cx = to_centered(average_ranks(x));
  auto cy = to_centered(average_ranks(y));
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += cx[i] * cy[i];
  const std::int64_t s_obs = s;
  const std::int64_t abs_obs = s_obs < 0 ? -s_obs : s_obs;

  std::uint64_t total = 0, ge_abs = 0, le = 0, ge = 0;
  const auto tally = [&] {
    ++total;
    if ((s < 0 ? -s : s) >= abs_obs) ++ge_abs;
    if (s <= s_obs) ++le;
    if (s >= s_obs) ++ge;
  };
  // Heap's algorithm, iterative; each swap updates S in O(1).
  std::vector<std::size_t> counter(n, 0);
  tally();
  std::size_t i = 1;
  while (i < n) {
    if (counter[i] < i) {
      const std::size_t a = (i % 2 == 0) ? 0 : counter[i];
      const std::size_t b = i;
      s += (cx[a] - cx[b]) * (cy[b] - cy[a]);
      std::swap(cy[a], cy[b]);
      tally();
      ++counter[i];
      i = 1;
    } else {
      counter[i] = 0;
      ++i;
    }
  }
  PermutationPValues p;
  p.permutations = total;
  const double t = static_cast<double>(total);
  p.two_sided = static_cast<double>(ge_abs) / t;
  p.lower = static_cast<double>(le) / t;
  p.upper = static_cast<double>(ge) / t;
  return p;
}

double mutual_information_discrete(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw DomainError("mutual_information: length mismatch");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::map<int, std::size_t> ca, cb;
  std::map<std::pair<int, int>, std::size_t> cab;
  for (std::size_t i = 0; i < n; ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++cab[{a[i], b[i]}];
  }
  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (const auto& [key, c] : cab) {
    const double pxy = static_cast<double>(c) / dn;
    const double px = static_cast<double>(ca[key.first]) / dn;
    const double py = static_cast<double>(cb[key.second]) / dn;
    mi += pxy * std::log(pxy / (px * py));
  }
  return std::max(0.0, mi);
}

std::vector<int> quantile_bin(std::span<const double> values, std::size_t bins) {
  const std::size_t n = values.size();
  std::vector<int> codes(n, 0);
  if (n == 0 || bins <= 1) return codes;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (std::size_t k = 1; k < bins; ++k) {
    const double e = sorted[k * n / bins];
    if (e > sorted.front() && (edges.empty() || e > edges.back())) edges.push_back(e);
  }
  // Cell c holds values in [edges[c-1], edges[c]).
  for (std::size_t i = 0; i < n; ++i) {
    codes[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), values[i]) - edges.begin());
  }
  return codes;
}

double mutual_information(std::span<const double> feature, std::span<const int> correct,
                          std::size_t bins) {
  if (feature.size() != correct.size()) throw DomainError("mutual_information: length mismatch");
  if (feature.empty()) return 0.0;
  const auto [mn, mx] = std::minmax_element(feature.begin(), feature.end());
  if (*mn == *mx) return 0.0;
  const auto codes = quantile_bin(feature, bins);
  return mutual_information_discrete(codes, correct);
}

double mutual_information_categorical(std::span<const std::string> feature,
                                      std::span<const int> correct) {
  if (feature.size() != correct.size()) throw DomainError("mutual_information: length mismatch");
  std::map<std::string, int> ids;
  std::vector<int> codes(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    codes[i] = ids.emplace(feature[i], static_cast<int>(ids.size())).first->second;
  }
  return mutual_information_discrete(codes, correct);
}

std::vector<MiEntry> mi_ranking(const std::vector<FeatureColumn>& columns,
                                std::span<const int> correct, std::size_t bins,
                                const std::vector<std::string>& required) {
  for (const auto& name : required) {
    const bool found = std::any_of(columns.begin(), columns.end(),
                                   [&](const FeatureColumn& c) { return c.name == name; });
    if (!found) throw SchemaError("mi_ranking: missing feature column '" + name + "'");
  }
  std::vector<MiEntry> out;
  for (const auto& col : columns) {
    MiEntry e;
    e.feature = col.name;
    if (col.kind == FeatureKind::numeric) {
      if (col.numeric.size() != correct.size()) {
        throw DomainError("mi_ranking: column '" + col.name + "' length mismatch");
      }
      std::vector<double> vals;
      std::vector<int> corr;
      for (std::size_t i = 0; i < correct.size(); ++i) {
        if (col.numeric[i] && std::isfinite(*col.numeric[i])) {
          vals.push_back(*col.numeric[i]);
          corr.push_back(correct[i]);
        }
      }
      e.n = vals.size();
      e.mi = mutual_information(vals, corr, bins);
    } else {
      if (col.categorical.size() != correct.size()) {
        throw DomainError("mi_ranking: column '" + col.name + "' length mismatch");
      }
      std::vector<std::string> vals;
      std::vector<int> corr;
      for (std::size_t i = 0; i < correct.size(); ++i) {
        if (col.categorical[i]) {
          vals.push_back(*col.categorical[i]);
          corr.push_back(correct[i]);
        }
      }
      e.n = vals.size();
      e.mi = mutual_information_categorical(vals, corr);
    }
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const MiEntry& a, const MiEntry& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    return a.feature < b.feature;
  });
  return out;
}

std::vector<AttributeSummary> demographics_summary(const Dataset& dataset) {
  std::vector<AttributeSummary> out;
  const auto summarize = [&](Attribute attr, auto value_of) {
    AttributeSummary s;
    s.attribute = attr;
    std::map<std::string, std::size_t> counts;
    for (const auto& p : dataset.participants()) {
      ++s.total;
      std::optional<std::string> v = value_of(p);
      if (v) {
        ++counts[*v];
      } else {
        ++s.unspecified;
      }
    }
    const std::size_t specified = s.total - s.unspecified;
    for (const auto& [v, c] : counts) {
      s.values.push_back({v, c, specified ? 100.0 * static_cast<double>(c) / static_cast<double>(specified) : 0.0});
    }
    out.push_back(std::move(s));
  };
  summarize(Attribute::gender, [](const Participant& p) -> std::optional<std::string> {
    if (p.gender == Gender::unspecified) return std::nullopt;
    return std::string(to_string(p.gender));
  });
  summarize(Attribute::age_decade, [](const Participant& p) -> std::optional<std::string> {
    if (!p.age_decade) return std::nullopt;
    return std::to_string(*p.age_decade);
  });
  summarize(Attribute::region, [](const Participant& p) -> std::optional<std::string> {
    if (p.region == Region::unspecified) return std::nullopt;
    return std::string(to_string(p.region));
  });
  summarize(Attribute::asl_level, [](const Participant& p) -> std::optional<std::string> {
    if (!p.asl_level) return std::nullopt;
    return std::to_string(*p.asl_level);
  });
  return out;
}

Histogram feature_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw DomainError("feature_histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = 0;
    if (width > 0.0) {
      b = static_cast<std::size_t>(std::floor((v - h.lo) / width));
      b = std::min(b, bins - 1);
    }
    ++h.counts[b];
  }
  return h;
}

}  // namespace signbias
