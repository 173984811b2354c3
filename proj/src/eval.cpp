#include "likefarm/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "jsonl.hpp"
#include "likefarm/error.hpp"

namespace likefarm {

namespace {

using detail::Json;

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Markdown table with every column padded to its widest cell.
std::string markdown_table(const std::vector<std::string>& header,
                           const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = std::max<std::size_t>(3, header[c].size());
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells, bool left_first) {
    out << '|';
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string pad(width[c] - cells[c].size(), ' ');
      out << ' ' << (c == 0 && left_first ? cells[c] + pad : pad + cells[c]) << " |";
    }
    out << '\n';
  };
  emit(header, true);
  out << '|';
  for (std::size_t c = 0; c < header.size(); ++c) {
    out << (c == 0 ? ' ' + std::string(width[c], '-') + " |" : ' ' + std::string(width[c] - 1, '-') + ": |");
  }
  out << '\n';
  for (const auto& row : rows) emit(row, true);
  return out.str();
}

std::string pct(int value) { return std::to_string(value) + "%"; }

std::filesystem::path markdown_path(const std::filesystem::path& path) {
  std::filesystem::path md = path;
  md.replace_extension(".md");
  return md;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = detail::open_for_write(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

std::uint64_t mix(std::uint64_t h, std::string_view field) {
  h = detail::fnv1a(field, h);
  return detail::fnv1a(std::string_view("\x1f", 1), h);
}

std::uint64_t mix(std::uint64_t h, std::int64_t v) { return mix(h, std::to_string(v)); }

}  // namespace

Metrics metrics_from(const ConfusionCounts& c) {
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return m;
}

int percent_half_up(std::size_t num, std::size_t den) {
  if (den == 0) return 0;
  return static_cast<int>((200 * num + den) / (2 * den));
}

Percentages percentages(const ConfusionCounts& c) {
  return {percent_half_up(c.tp, c.tp + c.fp), percent_half_up(c.tp, c.tp + c.fn),
          percent_half_up(c.tp + c.tn, c.total()), percent_half_up(2 * c.tp, 2 * c.tp + c.fp + c.fn)};
}

Evaluation compute_metrics(std::span<const LabelKind> predictions, std::span<const LabelKind> truth) {
  if (predictions.size() != truth.size()) {
    throw InvalidArgument("compute_metrics: " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(truth.size()) + " labels");
  }
  Evaluation e;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == LabelKind::Unknown) throw InvalidArgument("compute_metrics: unknown truth label");
    const bool actual = truth[i] == LabelKind::Farm;
    const bool predicted = predictions[i] == LabelKind::Farm;
    if (predicted && actual) ++e.counts.tp;
    else if (predicted) ++e.counts.fp;
    else if (actual) ++e.counts.fn;
    else ++e.counts.tn;
  }
  e.metrics = metrics_from(e.counts);
  return e;
}

TrainTestSplit split(std::span<const FeatureVector> vectors, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0,1)");
  }
  std::vector<std::size_t> farm;
  std::vector<std::size_t> base;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    switch (vectors[i].label.kind) {
      case LabelKind::Farm: farm.push_back(i); break;
      case LabelKind::Baseline: base.push_back(i); break;
      case LabelKind::Unknown: throw InvalidArgument("split: vector " + vectors[i].user + " has no label");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(vectors.size(), false);
  for (auto* cls : {&farm, &base}) {
    const char* name = cls == &farm ? "farm" : "baseline";
    if (cls->size() < 2) {
      throw InvalidArgument(std::string("split: the ") + name + " class needs at least 2 members");
    }
    std::shuffle(cls->begin(), cls->end(), rng);
    auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(cls->size())));
    take = std::clamp<std::size_t>(take, 1, cls->size() - 1);
    for (std::size_t k = 0; k < take; ++k) in_train[(*cls)[k]] = true;
  }
  TrainTestSplit s;
  for (std::size_t i = 0; i < vectors.size(); ++i) (in_train[i] ? s.train : s.test).push_back(vectors[i]);
  return s;
}

std::string_view to_string(Population population) {
  return population == Population::All ? "all" : "english";
}

std::vector<FeatureVector> select_population(std::span<const FeatureVector> vectors, Population population) {
  std::vector<FeatureVector> out;
  for (const FeatureVector& v : vectors) {
    if (population == Population::All || v.english_ratio > 0.0) out.push_back(v);
  }
  return out;
}

std::vector<FeatureVector> campaign_vectors(std::span<const FeatureVector> vectors, std::string_view campaign) {
  std::vector<FeatureVector> out;
  for (const FeatureVector& v : vectors) {
    if (v.label.is_baseline() || (v.label.is_farm() && v.label.campaign == campaign)) out.push_back(v);
  }
  return out;
}

std::vector<CurvePoint> incremental_feature_curve(std::span<const FeatureVector> vectors,
                                                  const std::vector<std::size_t>& feature_order,
                                                  const CurveConfig& config, std::uint64_t seed) {
  std::vector<std::size_t> sorted(feature_order);
  std::sort(sorted.begin(), sorted.end());
  if (sorted != all_feature_indices()) {
    throw InvalidArgument("feature order must be a permutation of the " + std::to_string(kFeatureCount) +
                          " features");
  }
  const TrainTestSplit s = split(vectors, config.train_fraction, seed);
  std::vector<LabelKind> truth;
  for (const FeatureVector& v : s.test) truth.push_back(v.label.kind);

  std::vector<CurvePoint> curve;
  for (std::size_t j = 1; j <= feature_order.size(); ++j) {
    // Feature sets are trained in canonical column order so the full prefix
    // reproduces the all-features model exactly.
    SvmOptions options;
    options.features.assign(feature_order.begin(), feature_order.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(options.features.begin(), options.features.end());
    options.tolerance = config.tolerance;
    const SvmModel model = train_svm(s.train, config.params, options);
    std::vector<LabelKind> predicted;
    for (const FeatureVector& v : s.test) predicted.push_back(predict(model, v));
    curve.push_back({j, feature_order[j - 1], compute_metrics(predicted, truth).metrics.f1});
  }
  return curve;
}

void export_scatter(const BipartiteGraph& graph, const ClusterAssignment& assignment,
                    const std::vector<LabelKind>& cluster_labels,
                    const std::unordered_map<std::string, Label>& truth,
                    const std::filesystem::path& path) {
  if (cluster_labels.size() != assignment.k) {
    throw InvalidArgument("export_scatter: expected one label per cluster");
  }
  auto band_order = [](const std::vector<std::string>& ids, const std::vector<std::size_t>& cluster) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return cluster[a] != cluster[b] ? cluster[a] < cluster[b] : ids[a] < ids[b];
    });
    std::vector<std::size_t> position(ids.size());
    for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = p;
    return position;
  };
  std::unordered_map<std::string, std::size_t> user_slot;
  for (std::size_t i = 0; i < assignment.user_ids.size(); ++i) user_slot[assignment.user_ids[i]] = i;
  std::unordered_map<std::string, std::size_t> page_slot;
  for (std::size_t i = 0; i < assignment.page_ids.size(); ++i) page_slot[assignment.page_ids[i]] = i;
  const auto user_pos = band_order(assignment.user_ids, assignment.user_cluster);
  const auto page_pos = band_order(assignment.page_ids, assignment.page_cluster);

  struct Row {
    std::size_t user;
    std::size_t page;
    const char* outcome;
  };
  std::vector<Row> rows;
  for (std::size_t u = 0; u < graph.n_users(); ++u) {
    const auto us = user_slot.find(graph.user_ids()[u]);
    if (us == user_slot.end()) throw ReferenceError("user " + graph.user_ids()[u] + " is not in the assignment");
    const auto t = truth.find(graph.user_ids()[u]);
    const bool actual = t != truth.end() && t->second.is_farm();
    const bool predicted = cluster_labels[assignment.user_cluster[us->second]] == LabelKind::Farm;
    const char* outcome = predicted ? (actual ? "TP" : "FP") : (actual ? "FN" : "TN");
    for (auto p : graph.pages_of(u)) {
      const auto ps = page_slot.find(graph.page_ids()[p]);
      if (ps == page_slot.end()) throw ReferenceError("page " + graph.page_ids()[p] + " is not in the assignment");
      rows.push_back({user_pos[us->second], page_pos[ps->second], outcome});
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.user != b.user ? a.user < b.user : a.page < b.page; });
  std::ostringstream out;
  out << "user_index,page_index,outcome\n";
  for (const Row& r : rows) out << r.user << ',' << r.page << ',' << r.outcome << '\n';
  write_text(path, out.str());
}

void export_report(const std::vector<RunRecord>& runs, const std::filesystem::path& path) {
  std::ostringstream csv;
  csv << "campaign,total,training,testing,tp,fp,tn,fn,precision,recall,accuracy,f1\n";
  std::vector<std::vector<std::string>> rows;
  for (const RunRecord& r : runs) {
    const Metrics m = metrics_from(r.counts);
    const Percentages p = percentages(r.counts);
    csv << r.campaign << ',' << r.total << ',' << r.training << ',' << r.testing << ',' << r.counts.tp << ','
        << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn << ',' << format_real(m.precision) << ','
        << format_real(m.recall) << ',' << format_real(m.accuracy) << ',' << format_real(m.f1) << '\n';
    rows.push_back({r.campaign, std::to_string(r.total), std::to_string(r.training), std::to_string(r.testing),
                    std::to_string(r.counts.tp), std::to_string(r.counts.fp), std::to_string(r.counts.tn),
                    std::to_string(r.counts.fn), pct(p.precision), pct(p.recall), pct(p.accuracy), pct(p.f1)});
  }
  write_text(path, csv.str());
  write_text(markdown_path(path),
             markdown_table({"Campaign", "Total", "Training", "Testing", "TP", "FP", "TN", "FN", "Precision",
                             "Recall", "Accuracy", "F1"},
                            rows));
}

std::vector<RunRecord> read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<RunRecord> runs;
  std::string line;
  std::size_t line_no = 0;
  auto count = [&](const std::string& cell) {
    std::size_t v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad count \"" + cell + "\"");
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 12) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 12 columns");
    }
    RunRecord r;
    r.campaign = cells[0];
    r.total = count(cells[1]);
    r.training = count(cells[2]);
    r.testing = count(cells[3]);
    r.counts = {count(cells[4]), count(cells[5]), count(cells[6]), count(cells[7])};
    runs.push_back(std::move(r));
  }
  return runs;
}

void export_cocluster_report(const std::vector<CoclusterRecord>& records, const std::filesystem::path& path) {
  std::ostringstream csv;
  csv << "campaign,tp,fp,tn,fn,precision,recall,f1\n";
  std::vector<std::vector<std::string>> rows;
  for (const CoclusterRecord& r : records) {
    const Metrics m = metrics_from(r.counts);
    const Percentages p = percentages(r.counts);
    csv << r.campaign << ',' << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.tn << ',' << r.counts.fn
        << ',' << format_real(m.precision) << ',' << format_real(m.recall) << ',' << format_real(m.f1) << '\n';
    rows.push_back({r.campaign, std::to_string(r.counts.tp), std::to_string(r.counts.fp),
                    std::to_string(r.counts.tn), std::to_string(r.counts.fn), pct(p.precision), pct(p.recall),
                    pct(p.f1)});
  }
  write_text(path, csv.str());
  write_text(markdown_path(path),
             markdown_table({"Campaign", "TP", "FP", "TN", "FN", "Precision", "Recall", "F1"}, rows));
}

void export_comparison_report(const ComparisonTable& table, const std::filesystem::path& path) {
  std::ostringstream csv;
  csv << "campaign";
  for (const auto& c : table.classifiers) csv << ',' << c;
  csv << '\n';
  std::vector<std::vector<std::string>> rows;
  for (const auto& [campaign, f1s] : table.rows) {
    if (f1s.size() != table.classifiers.size()) {
      throw InvalidArgument("comparison row " + campaign + " has the wrong number of columns");
    }
    csv << campaign;
    std::vector<std::string> row{campaign};
    for (double f : f1s) {
      csv << ',' << format_real(f);
      row.push_back(pct(static_cast<int>(std::floor(100.0 * f + 0.5))));
    }
    csv << '\n';
    rows.push_back(std::move(row));
  }
  std::vector<std::string> header{"Campaign"};
  header.insert(header.end(), table.classifiers.begin(), table.classifiers.end());
  write_text(path, csv.str());
  write_text(markdown_path(path), markdown_table(header, rows));
}

void export_curves(const std::vector<CurveRecord>& curves, const std::filesystem::path& path) {
  std::ostringstream csv;
  csv << "campaign,group,prefix_length,added_feature,f1\n";
  for (const CurveRecord& c : curves) {
    for (const CurvePoint& p : c.points) {
      csv << c.campaign << ',' << c.group << ',' << p.prefix_length << ',' << kFeatureNames[p.added_feature]
          << ',' << format_real(p.f1) << '\n';
    }
  }
  write_text(path, csv.str());
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  Json hyper = Json::object();
  for (const auto& [k, v] : m.hyperparams) hyper[k] = v;
  Json metrics = Json::object();
  for (const auto& [k, v] : m.metrics) metrics[k] = v;
  Json config;
  try {
    config = Json::parse(m.config_json);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("manifest config is not JSON: ") + e.what());
  }
  const Json j{{"command", m.command},
               {"tool_version", m.tool_version},
               {"seed", m.seed},
               {"config_hash", m.config_hash},
               {"dataset_fingerprint", m.dataset_fingerprint},
               {"classifier", m.classifier},
               {"hyperparams", hyper},
               {"metrics", metrics},
               {"config", config},
               {"outputs", m.outputs}};
  write_text(path, j.dump(2) + "\n");
}

std::string fingerprint(std::string_view bytes) { return detail::hex64(detail::fnv1a(bytes)); }

std::string dataset_fingerprint(const Dataset& d) {
  std::uint64_t h = detail::fnv1a("likefarm-dataset");
  h = mix(h, static_cast<std::int64_t>(d.accounts().size()));
  for (const Account& a : d.accounts()) {
    h = mix(mix(h, a.id), a.label.to_string());
    h = mix(h, a.english_ratio_cache ? format_real(*a.english_ratio_cache) : std::string("-"));
  }
  h = mix(h, static_cast<std::int64_t>(d.posts().size()));
  for (const Post& p : d.posts()) {
    h = mix(mix(h, p.author), to_string(p.kind));
    h = mix(mix(mix(h, p.text), p.n_comments), p.n_likes);
    h = mix(mix(h, static_cast<std::int64_t>(p.is_shared)), p.timestamp);
  }
  h = mix(h, static_cast<std::int64_t>(d.likes().size()));
  for (const LikeEvent& l : d.likes()) h = mix(mix(mix(h, l.user), l.page), l.timestamp);
  h = mix(h, static_cast<std::int64_t>(d.pages().size()));
  for (const Page& p : d.pages()) h = mix(mix(h, p.id), p.popularity);
  return detail::hex64(h);
}

std::string file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fingerprint(buf.str());
}

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace likefarm
