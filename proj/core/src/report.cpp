#include "signbias/report.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "signbias/csv.hpp"
#include "signbias/errors.hpp"

namespace signbias {

namespace {

using ojson = nlohmann::ordered_json;

ojson opt(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

ojson num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ojson triple(const AccuracyTriple& t) {
  ojson j;
  j["n"] = t.n;
  j["top1"] = t.top1;
  j["top5"] = t.top5;
  j["top10"] = t.top10;
  return j;
}

std::string bound_text(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return format_double(v);
}

std::vector<std::string> triple_fields(const AccuracyTriple& t) {
  return {std::to_string(t.n), format_double(t.top1), format_double(t.top5), format_double(t.top10)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

AuditReport build_audit(const Dataset& dataset, const std::vector<EvalOutcome>& outcomes,
                        const FeatureTable& features, const QualityTable& quality,
                        const AuditOptions& options, AuditMetadata metadata) {
  if (outcomes.empty()) throw UsageError("audit: no predictions to evaluate");
  AuditReport report;
  report.metadata = std::move(metadata);
  report.evaluated = outcomes.size();
  report.overall = accuracy_triple(outcomes);

  const std::size_t n = outcomes.size();
  std::vector<const VideoRecord*> videos(n);
  std::vector<const TrajectoryFeatureRow*> feats(n, nullptr);
  std::vector<std::optional<double>> qual(n);
  std::vector<int> correct(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = dataset.video_index(outcomes[i].video_id);
    if (!idx) throw IntegrityError("predictions reference unknown video_id '" + outcomes[i].video_id + "'");
    videos[i] = &dataset.videos()[*idx];
    if (auto it = features.find(outcomes[i].video_id); it != features.end()) {
      feats[i] = &it->second;
    } else {
      ++report.missing_features;
    }
    if (auto it = quality.find(outcomes[i].video_id); it != quality.end()) {
      qual[i] = it->second;
    } else {
      ++report.missing_quality;
    }
    correct[i] = outcomes[i].top1 ? 1 : 0;
  }

  for (auto attr : {Attribute::gender, Attribute::age_decade, Attribute::region, Attribute::asl_level,
                    Attribute::skin_tone_label, Attribute::participant_id}) {
    if (attr == options.attribute) {
      report.groups.push_back(group_metrics(outcomes, dataset, attr, options.parity_group, options.reference_group));
    } else {
      report.groups.push_back(group_metrics(outcomes, dataset, attr, "", ""));
    }
  }
  // The configured attribute leads.
  std::stable_partition(report.groups.begin(), report.groups.end(),
                        [&](const GroupReport& g) { return g.attribute == options.attribute; });

  // Numeric per-video features, missing entries as nullopt.
  const auto feature_of = [&](auto getter) {
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (feats[i]) out[i] = getter(*feats[i]);
    }
    return out;
  };
  const auto sign_of = [&](auto getter) {
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = getter(dataset.sign(videos[i]->gloss_id));
    return out;
  };
  const auto length_z = feature_of([](const TrajectoryFeatureRow& r) -> std::optional<double> { return r.length_z; });
  const auto speed_z_lh = feature_of([](const TrajectoryFeatureRow& r) { return r.speed_z_lh; });
  const auto speed_z_rh = feature_of([](const TrajectoryFeatureRow& r) { return r.speed_z_rh; });
  const auto seed_lh = feature_of([](const TrajectoryFeatureRow& r) { return r.seed_div_lh; });
  const auto seed_rh = feature_of([](const TrajectoryFeatureRow& r) { return r.seed_div_rh; });
  const auto abs_of = [](std::vector<std::optional<double>> v) {
    for (auto& x : v) {
      if (x) x = std::abs(*x);
    }
    return v;
  };
  const auto frequency = sign_of([](const SignEntry& s) -> std::optional<double> { return s.frequency; });
  const auto iconicity = sign_of([](const SignEntry& s) -> std::optional<double> { return s.iconicity; });
  const auto complexity = sign_of([](const SignEntry& s) -> std::optional<double> { return s.phonological_complexity; });
  const auto density = sign_of([](const SignEntry& s) -> std::optional<double> { return s.neighborhood_density; });
  const auto morphemes = sign_of([](const SignEntry& s) -> std::optional<double> { return s.num_morphemes; });

  const auto bucket = [&](const std::string& name, const std::vector<std::optional<double>>& z) {
    std::vector<double> zs;
    std::vector<EvalOutcome> os;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i]) {
        zs.push_back(*z[i]);
        os.push_back(outcomes[i]);
      }
    }
    report.buckets.push_back({name, bucket_accuracy(zs, os)});
  };
  bucket("length_z", length_z);
  bucket("speed_z_lh", speed_z_lh);
  bucket("speed_z_rh", speed_z_rh);

  const auto correlate = [&](const std::string& name, const std::vector<std::optional<double>>& x) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] && std::isfinite(*x[i])) {
        xs.push_back(*x[i]);
        ys.push_back(correct[i]);
      }
    }
    CorrelationResult r;
    r.n = xs.size();
    if (xs.size() >= 3) {
      r = spearman(xs, ys);
    } else {
      r.defined = false;
    }
    report.correlations.push_back({name, r});
  };
  correlate("quality_score", qual);
  correlate("frequency", frequency);
  correlate("iconicity", iconicity);
  correlate("phonological_complexity", complexity);
  correlate("neighborhood_density", density);
  correlate("seed_divergence_lh", seed_lh);
  correlate("seed_divergence_rh", seed_rh);
  correlate("abs_length_z", abs_of(length_z));

  std::vector<FeatureColumn> columns;
  const auto numeric = [&](const std::string& name, std::vector<std::optional<double>> v) {
    FeatureColumn c;
    c.name = name;
    c.kind = FeatureKind::numeric;
    c.numeric = std::move(v);
    columns.push_back(std::move(c));
  };
  const auto categorical = [&](const std::string& name, auto value_of) {
    FeatureColumn c;
    c.name = name;
    c.kind = FeatureKind::categorical;
    c.categorical.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.categorical[i] = value_of(*videos[i]);
    columns.push_back(std::move(c));
  };
  numeric("quality_score", qual);
  numeric("seed_divergence_lh", seed_lh);
  numeric("seed_divergence_rh", seed_rh);
  numeric("abs_speed_z_lh", abs_of(speed_z_lh));
  numeric("abs_speed_z_rh", abs_of(speed_z_rh));
  numeric("abs_length_z", abs_of(length_z));
  numeric("iconicity", iconicity);
  numeric("frequency", frequency);
  numeric("phonological_complexity", complexity);
  numeric("neighborhood_density", density);
  numeric("num_morphemes", morphemes);
  categorical("lexical_class", [&](const VideoRecord& v) -> std::optional<std::string> {
    return dataset.sign(v.gloss_id).lexical_class;
  });
  categorical("iconicity_type", [&](const VideoRecord& v) -> std::optional<std::string> {
    return dataset.sign(v.gloss_id).iconicity_type;
  });
  for (auto attr : {Attribute::asl_level, Attribute::region, Attribute::gender, Attribute::age_decade}) {
    categorical(std::string(to_string(attr)),
                [&](const VideoRecord& v) { return attribute_value(dataset, v, attr); });
  }
  report.mi_ranking = mi_ranking(columns, correct, options.mi_bins);

  report.demographics = demographics_summary(dataset);

  const auto histogram = [&](const std::string& name, const std::vector<std::optional<double>>& x) {
    std::vector<double> xs;
    for (const auto& v : x) {
      if (v && std::isfinite(*v)) xs.push_back(*v);
    }
    report.histograms.push_back({name, feature_histogram(xs, options.histogram_bins)});
  };
  histogram("quality_score", qual);
  histogram("length_z", length_z);
  histogram("frequency", frequency);
  histogram("iconicity", iconicity);
  return report;
}

std::string report_json(const AuditReport& r) {
  ojson root;
  ojson summary;
  summary["strategy"] = r.metadata.strategy;
  summary["split"] = r.metadata.split;
  summary["evaluated"] = r.evaluated;
  summary["top1"] = r.overall.top1;
  summary["top5"] = r.overall.top5;
  summary["top10"] = r.overall.top10;
  std::optional<double> headline;
  if (!r.groups.empty()) headline = r.groups.front().parity;
  summary["parity"] = opt(headline);
  summary["missing_features"] = r.missing_features;
  summary["missing_quality"] = r.missing_quality;
  ojson demo = ojson::array();
  for (const auto& a : r.demographics) {
    ojson d;
    d["attribute"] = to_string(a.attribute);
    d["total"] = a.total;
    d["unspecified"] = a.unspecified;
    ojson values = ojson::array();
    for (const auto& v : a.values) {
      values.push_back({{"value", v.value}, {"count", v.count}, {"percent", v.percent}});
    }
    d["values"] = std::move(values);
    demo.push_back(std::move(d));
  }
  summary["demographics"] = std::move(demo);
  ojson hists = ojson::array();
  for (const auto& h : r.histograms) {
    hists.push_back({{"feature", h.feature},
                     {"lo", h.histogram.lo},
                     {"hi", h.histogram.hi},
                     {"counts", h.histogram.counts}});
  }
  summary["histograms"] = std::move(hists);
  root["summary"] = std::move(summary);

  ojson groups = ojson::array();
  for (const auto& g : r.groups) {
    ojson j;
    j["attribute"] = to_string(g.attribute);
    ojson rows = ojson::array();
    for (const auto& row : g.rows) {
      ojson rj;
      rj["value"] = row.value;
      rj.update(triple(row.acc));
      rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    j["unspecified"] = triple(g.unspecified);
    j["parity_group"] = g.parity_group;
    j["reference_group"] = g.reference_group;
    j["parity"] = opt(g.parity);
    groups.push_back(std::move(j));
  }
  root["groups"] = std::move(groups);

  ojson buckets = ojson::array();
  for (const auto& b : r.buckets) {
    ojson j;
    j["feature"] = b.feature;
    j["edges"] = b.table.edges;
    j["skipped_nonfinite"] = b.table.skipped_nonfinite;
    ojson rows = ojson::array();
    for (const auto& row : b.table.rows) {
      ojson rj;
      rj["label"] = row.label;
      rj["lo"] = num(row.lo);
      rj["hi"] = num(row.hi);
      rj.update(triple(row.acc));
      rows.push_back(std::move(rj));
    }
    j["rows"] = std::move(rows);
    buckets.push_back(std::move(j));
  }
  root["buckets"] = std::move(buckets);

  ojson corr = ojson::array();
  for (const auto& c : r.correlations) {
    ojson j;
    j["feature"] = c.feature;
    j["target"] = "top1_correct";
    j["n"] = c.result.n;
    j["defined"] = c.result.defined;
    j["rho"] = c.result.defined ? num(c.result.rho) : ojson(nullptr);
    j["p_value"] = c.result.defined ? num(c.result.p_value) : ojson(nullptr);
    corr.push_back(std::move(j));
  }
  root["correlations"] = std::move(corr);

  ojson mi = ojson::array();
  for (const auto& e : r.mi_ranking) {
    mi.push_back({{"feature", e.feature}, {"mi_nats", e.mi}, {"n", e.n}});
  }
  root["mi_ranking"] = std::move(mi);

  ojson meta;
  meta["config_hash"] = r.metadata.config_hash;
  meta["seed"] = r.metadata.seed;
  meta["versions"] = {{"signbias", SIGNBIAS_VERSION}, {"report_schema", kReportSchemaVersion}};
  meta["mi_bins"] = r.metadata.mi_bins;
  meta["quality_scorer"] = r.metadata.scorer_mode;
  meta["quality_frames_per_video"] = r.metadata.quality_frames_per_video;
  root["metadata"] = std::move(meta);
  return root.dump(2) + "\n";
}

void write_audit(const std::filesystem::path& dir, const AuditReport& r, std::string_view provenance) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text_file(dir / "report.json", report_json(r));

  {
    CsvWriter w(dir / "groups.csv", {"attribute", "value", "n", "top1", "top5", "top10"}, provenance);
    for (const auto& g : r.groups) {
      for (const auto& row : g.rows) {
        w.write_row(concat({std::string(to_string(g.attribute)), row.value}, triple_fields(row.acc)));
      }
      if (g.unspecified.n > 0) {
        w.write_row(concat({std::string(to_string(g.attribute)), ""}, triple_fields(g.unspecified)));
      }
    }
    w.close();
  }
  {
    CsvWriter w(dir / "parity.csv", {"attribute", "parity_group", "reference_group", "overall_top1", "parity"},
                provenance);
    if (!r.groups.empty()) {
      const auto& g = r.groups.front();
      w.write_row({std::string(to_string(g.attribute)), g.parity_group, g.reference_group,
                   format_double(r.overall.top1), g.parity ? format_double(*g.parity) : ""});
    }
    w.close();
  }
  {
    CsvWriter w(dir / "buckets.csv", {"feature", "bucket", "lo", "hi", "n", "top1", "top5", "top10"}, provenance);
    for (const auto& b : r.buckets) {
      for (const auto& row : b.table.rows) {
        w.write_row(concat({b.feature, row.label, bound_text(row.lo), bound_text(row.hi)}, triple_fields(row.acc)));
      }
    }
    w.close();
  }
  {
    CsvWriter w(dir / "correlations.csv", {"feature", "target", "n", "rho", "p_value"}, provenance);
    for (const auto& c : r.correlations) {
      w.write_row({c.feature, "top1_correct", std::to_string(c.result.n),
                   c.result.defined ? format_double(c.result.rho) : "",
                   c.result.defined ? format_double(c.result.p_value) : ""});
    }
    w.close();
  }
  {
    CsvWriter w(dir / "mi_ranking.csv", {"rank", "feature", "mi_nats", "n"}, provenance);
    std::size_t rank = 1;
    for (const auto& e : r.mi_ranking) {
      w.write_row({std::to_string(rank++), e.feature, format_double(e.mi), std::to_string(e.n)});
    }
    w.close();
  }
  {
    CsvWriter w(dir / "demographics.csv", {"attribute", "value", "count", "percent"}, provenance);
    for (const auto& a : r.demographics) {
      for (const auto& v : a.values) {
        w.write_row({std::string(to_string(a.attribute)), v.value, std::to_string(v.count), format_double(v.percent)});
      }
      w.write_row({std::string(to_string(a.attribute)), "", std::to_string(a.unspecified), ""});
    }
    w.close();
  }
  {
    CsvWriter w(dir / "histograms.csv", {"feature", "bin", "lo", "hi", "count"}, provenance);
    for (const auto& h : r.histograms) {
      const auto bins = h.histogram.counts.size();
      const double width = bins ? (h.histogram.hi - h.histogram.lo) / static_cast<double>(bins) : 0.0;
      for (std::size_t b = 0; b < bins; ++b) {
        const double lo = h.histogram.lo + width * static_cast<double>(b);
        const double hi = b + 1 == bins ? h.histogram.hi : lo + width;
        w.write_row({h.feature, std::to_string(b), format_double(lo), format_double(hi),
                     std::to_string(h.histogram.counts[b])});
      }
    }
    w.close();
  }
}

void write_predictions(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::vector<std::string>>>& ranked,
                       std::string_view provenance) {
  CsvWriter w(path, {"video_id", "rank", "gloss"}, provenance);
  for (const auto& [video, labels] : ranked) {
    for (std::size_t k = 0; k < labels.size(); ++k) w.write_row({video, std::to_string(k + 1), labels[k]});
  }
  w.close();
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_predictions(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto c_id = table.column("video_id");
  const auto c_rank = table.column("rank");
  const auto c_gloss = table.column("gloss");
  if (table.rows.empty()) throw UsageError("predictions file '" + path.string() + "' has no rows");
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string cx = path.filename().string() + " row " + std::to_string(r + 1);
    const auto rank = parse_int(row[c_rank], cx);
    auto [it, inserted] = index.emplace(row[c_id], out.size());
    if (inserted) out.push_back({row[c_id], {}});
    auto& labels = out[it->second].second;
    if (rank != static_cast<std::int64_t>(labels.size()) + 1) {
      throw SchemaError(cx + ": ranks for '" + row[c_id] + "' must run 1, 2, ... in order");
    }
    labels.push_back(row[c_gloss]);
  }
  return out;
}

std::vector<EvalOutcome> outcomes_from_predictions(
    const Dataset& dataset, const std::vector<std::pair<std::string, std::vector<std::string>>>& ranked) {
  std::vector<EvalOutcome> out;
  out.reserve(ranked.size());
  for (const auto& [video, labels] : ranked) {
    const auto idx = dataset.video_index(video);
    if (!idx) throw IntegrityError("predictions reference unknown video_id '" + video + "'");
    out.push_back(make_outcome(video, labels, dataset.videos()[*idx].gloss_id));
  }
  return out;
}

}  // namespace signbias
