#include "likefarm/pipeline.hpp"

#include "jsonl.hpp"
#include "likefarm/error.hpp"
#include "parallel.hpp"

namespace likefarm {

namespace {

using detail::Json;

constexpr std::array<BaselineKind, 5> kBaselines = {BaselineKind::DecisionTree, BaselineKind::AdaBoost,
                                                    BaselineKind::KNN, BaselineKind::RandomForest,
                                                    BaselineKind::NaiveBayes};

Evaluation evaluate_on(const Model& model, const std::vector<FeatureVector>& test) {
  std::vector<LabelKind> predicted;
  std::vector<LabelKind> truth;
  for (const FeatureVector& v : test) {
    predicted.push_back(predict(model, v));
    truth.push_back(v.label.kind);
  }
  return compute_metrics(predicted, truth);
}

std::size_t farm_count(const std::vector<FeatureVector>& vectors) {
  std::size_t n = 0;
  for (const FeatureVector& v : vectors) n += v.label.is_farm() ? 1 : 0;
  return n;
}

struct SvmRun {
  RunRecord record;
  SvmHyperParams params;
  TrainTestSplit split;
};

// Table rows count campaign users only.
SvmRun svm_run(const std::vector<FeatureVector>& vectors, std::string_view campaign,
               const std::vector<std::size_t>& features, const PipelineConfig& config) {
  SvmRun run;
  run.split = split(vectors, config.train_fraction, config.seed);
  GridSpec grid = config.grid;
  grid.seed = config.seed;
  SvmOptions options;
  options.features = features;
  options.tolerance = config.tolerance;
  const GridSearchResult g = grid_search(run.split.train, grid, options);
  run.params = g.best;
  run.record.campaign = std::string(campaign);
  run.record.training = farm_count(run.split.train);
  run.record.testing = farm_count(run.split.test);
  run.record.total = run.record.training + run.record.testing;
  run.record.counts = evaluate_on(g.model, run.split.test).counts;
  return run;
}

Json grid_json(const GridSpec& g) {
  return Json{{"gammas", g.gammas}, {"nus", g.nus}, {"folds", g.folds}};
}

void write_report_manifest(const PipelineConfig& config, const PipelineResult& result,
                           const std::filesystem::path& out, const std::string& name,
                           const std::string& classifier,
                           std::vector<std::pair<std::string, double>> hyperparams,
                           std::vector<std::pair<std::string, double>> metrics,
                           std::vector<std::string> outputs) {
  RunManifest m;
  m.command = "reproduce";
  m.tool_version = std::string(kToolVersion);
  m.seed = config.seed;
  m.config_json = to_json(config);
  m.config_hash = fingerprint(m.config_json);
  m.dataset_fingerprint = result.dataset_fingerprint;
  m.classifier = classifier;
  m.hyperparams = std::move(hyperparams);
  m.metrics = std::move(metrics);
  m.outputs = std::move(outputs);
  write_manifest(m, out / (name + ".manifest.json"));
}

std::vector<std::pair<std::string, double>> f1_metrics(const std::vector<RunRecord>& runs) {
  std::vector<std::pair<std::string, double>> out;
  for (const RunRecord& r : runs) {
    const Metrics m = metrics_from(r.counts);
    out.emplace_back(r.campaign + ".precision", m.precision);
    out.emplace_back(r.campaign + ".recall", m.recall);
    out.emplace_back(r.campaign + ".accuracy", m.accuracy);
    out.emplace_back(r.campaign + ".f1", m.f1);
  }
  return out;
}

}  // namespace

BipartiteGraph campaign_graph(const Dataset& dataset, std::string_view campaign,
                              std::size_t min_user_degree, std::size_t min_page_degree) {
  std::vector<LikeEvent> likes;
  for (const LikeEvent& l : dataset.likes()) {
    const Account* a = dataset.find_account(l.user);
    if (a == nullptr) continue;
    if (a->label.is_baseline() || (a->label.is_farm() && a->label.campaign == campaign)) likes.push_back(l);
  }
  return build_bipartite(likes, min_user_degree, min_page_degree);
}

std::unordered_map<std::string, Label> ground_truth(const Dataset& dataset) {
  std::unordered_map<std::string, Label> truth;
  for (const Account& a : dataset.accounts()) truth.emplace(a.id, a.label);
  return truth;
}

ConfusionCounts cocluster_counts(const ClusterAssignment& assignment,
                                 const std::vector<LabelKind>& cluster_labels,
                                 const std::unordered_map<std::string, Label>& truth) {
  std::vector<LabelKind> predicted;
  std::vector<LabelKind> actual;
  for (std::size_t i = 0; i < assignment.user_ids.size(); ++i) {
    const auto t = truth.find(assignment.user_ids[i]);
    if (t == truth.end() || !t->second.is_known()) continue;
    predicted.push_back(cluster_labels[assignment.user_cluster[i]]);
    actual.push_back(t->second.kind);
  }
  return compute_metrics(predicted, actual).counts;
}

std::string to_json(const PipelineConfig& c) {
  const Json j{{"seed", c.seed},
               {"cocluster",
                Json{{"k", c.cocluster.k},
                     {"n_singular_vectors", c.cocluster.n_singular_vectors},
                     {"kmeans_restarts", c.cocluster.kmeans_restarts},
                     {"kmeans_max_iters", c.cocluster.kmeans_max_iters}}},
               {"min_user_degree", c.min_user_degree},
               {"min_page_degree", c.min_page_degree},
               {"train_fraction", c.train_fraction},
               {"grid", grid_json(c.grid)},
               {"tolerance", c.tolerance},
               {"baseline",
                Json{{"boosting_rounds", c.baseline.boosting_rounds},
                     {"neighbors", c.baseline.neighbors},
                     {"trees", c.baseline.trees},
                     {"variance_floor", c.baseline.variance_floor}}},
               {"generator", Json::parse(likefarm::to_json(c.generator))}};
  return j.dump();
}

CampaignResult run_campaign(const Dataset& dataset, const std::vector<FeatureVector>& vectors,
                            std::string_view campaign, const PipelineConfig& config,
                            const std::filesystem::path& scatter_path) {
  CampaignResult r;
  r.campaign = std::string(campaign);

  const auto truth = ground_truth(dataset);
  const BipartiteGraph graph = campaign_graph(dataset, campaign, config.min_user_degree, config.min_page_degree);
  CoclusterConfig cc = config.cocluster;
  cc.seed = config.seed;
  const ClusterAssignment assignment = cocluster(graph, cc);
  const std::vector<LabelKind> labels = label_clusters(assignment, truth);
  r.cocluster = {r.campaign, cocluster_counts(assignment, labels, truth)};
  if (!scatter_path.empty()) export_scatter(graph, assignment, labels, truth, scatter_path);

  const std::vector<FeatureVector> all = campaign_vectors(vectors, campaign);
  const std::vector<FeatureVector> english = select_population(all, Population::EnglishOnly);

  SvmRun combined = svm_run(all, campaign, all_feature_indices(), config);
  r.combined = combined.record;
  r.combined_params = combined.params;
  SvmRun nonlex = svm_run(all, campaign, nonlexical_feature_indices(), config);
  r.nonlexical = nonlex.record;
  r.nonlexical_params = nonlex.params;
  SvmRun lex = svm_run(english, campaign, lexical_feature_indices(), config);
  r.lexical = lex.record;
  r.lexical_params = lex.params;

  r.classifier_f1.emplace_back("svm", metrics_from(r.combined.counts).f1);
  BaselineParams bp = config.baseline;
  bp.seed = config.seed;
  for (BaselineKind kind : kBaselines) {
    const Model m = train_baseline(kind, combined.split.train, bp);
    r.classifier_f1.emplace_back(std::string(to_string(kind)), evaluate_on(m, combined.split.test).metrics.f1);
  }

  CurveConfig curve;
  curve.params = r.combined_params;
  curve.train_fraction = config.train_fraction;
  curve.tolerance = config.tolerance;
  r.lexical_first_curve = incremental_feature_curve(all, all_feature_indices(), curve, config.seed);
  std::vector<std::size_t> order = nonlexical_feature_indices();
  for (std::size_t f : lexical_feature_indices()) order.push_back(f);
  r.nonlexical_first_curve = incremental_feature_curve(all, order, curve, config.seed);
  return r;
}

PipelineResult reproduce(const PipelineConfig& config, const std::filesystem::path& out) {
  GenConfig gen = config.generator;
  gen.seed = config.seed;
  const Dataset dataset = generate(gen);
  const std::vector<FeatureVector> vectors = extract_features(dataset);

  PipelineResult result;
  result.dataset_fingerprint = dataset_fingerprint(dataset);
  const std::vector<std::string> campaigns = dataset.campaigns();
  result.campaigns.resize(campaigns.size());
  std::vector<std::size_t> slots(campaigns.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  detail::run_parallel(slots, config.jobs, [&](std::size_t i) {
    result.campaigns[i] =
        run_campaign(dataset, vectors, campaigns[i], config, out / ("fig1_scatter_" + campaigns[i] + ".csv"));
  });

  std::vector<CoclusterRecord> table2;
  std::vector<RunRecord> table5;
  std::vector<RunRecord> table6;
  std::vector<RunRecord> table7;
  ComparisonTable table8;
  table8.classifiers.push_back("svm");
  for (BaselineKind kind : kBaselines) table8.classifiers.emplace_back(to_string(kind));
  std::vector<CurveRecord> curves;
  std::vector<std::pair<std::string, double>> h5, h6, h7, m2, m8;
  std::vector<std::string> scatters;
  for (const CampaignResult& c : result.campaigns) {
    table2.push_back(c.cocluster);
    table5.push_back(c.nonlexical);
    table6.push_back(c.lexical);
    table7.push_back(c.combined);
    std::vector<double> f1s;
    for (const auto& [name, f1] : c.classifier_f1) {
      f1s.push_back(f1);
      m8.emplace_back(c.campaign + "." + name, f1);
    }
    table8.rows.emplace_back(c.campaign, std::move(f1s));
    curves.push_back({c.campaign, "lexical-first", c.lexical_first_curve});
    curves.push_back({c.campaign, "nonlexical-first", c.nonlexical_first_curve});
    for (auto [h, p] : {std::pair{&h5, c.nonlexical_params}, std::pair{&h6, c.lexical_params},
                        std::pair{&h7, c.combined_params}}) {
      h->emplace_back(c.campaign + ".gamma", p.gamma);
      h->emplace_back(c.campaign + ".nu", p.nu);
    }
    const Metrics cm = metrics_from(c.cocluster.counts);
    m2.emplace_back(c.campaign + ".precision", cm.precision);
    m2.emplace_back(c.campaign + ".recall", cm.recall);
    m2.emplace_back(c.campaign + ".f1", cm.f1);
    scatters.push_back("fig1_scatter_" + c.campaign + ".csv");
  }

  export_cocluster_report(table2, out / "table2_cocluster.csv");
  export_report(table5, out / "table5_nonlexical.csv");
  export_report(table6, out / "table6_lexical.csv");
  export_report(table7, out / "table7_combined.csv");
  export_comparison_report(table8, out / "table8_classifiers.csv");
  export_curves(curves, out / "fig5_curves.csv");

  const auto& cc = config.cocluster;
  std::vector<std::string> t2_outputs{"table2_cocluster.csv", "table2_cocluster.md"};
  t2_outputs.insert(t2_outputs.end(), scatters.begin(), scatters.end());
  write_report_manifest(config, result, out, "table2_cocluster", "cocluster",
                        {{"k", static_cast<double>(cc.k)},
                         {"kmeans_restarts", static_cast<double>(cc.kmeans_restarts)},
                         {"min_user_degree", static_cast<double>(config.min_user_degree)},
                         {"min_page_degree", static_cast<double>(config.min_page_degree)}},
                        m2, t2_outputs);
  write_report_manifest(config, result, out, "table5_nonlexical", "svm", h5, f1_metrics(table5),
                        {"table5_nonlexical.csv", "table5_nonlexical.md"});
  write_report_manifest(config, result, out, "table6_lexical", "svm", h6, f1_metrics(table6),
                        {"table6_lexical.csv", "table6_lexical.md"});
  write_report_manifest(config, result, out, "table7_combined", "svm", h7, f1_metrics(table7),
                        {"table7_combined.csv", "table7_combined.md"});
  const BaselineParams& bp = config.baseline;
  write_report_manifest(config, result, out, "table8_classifiers", "svm,tree,adaboost,knn,forest,nb",
                        {{"boosting_rounds", static_cast<double>(bp.boosting_rounds)},
                         {"neighbors", static_cast<double>(bp.neighbors)},
                         {"trees", static_cast<double>(bp.trees)},
                         {"variance_floor", bp.variance_floor}},
                        m8, {"table8_classifiers.csv", "table8_classifiers.md"});
  std::vector<std::pair<std::string, double>> m5;
  for (const CurveRecord& c : curves) {
    for (const CurvePoint& p : c.points) {
      m5.emplace_back(c.campaign + "." + c.group + "." + std::to_string(p.prefix_length), p.f1);
    }
  }
  write_report_manifest(config, result, out, "fig5_curves", "svm", h7, m5, {"fig5_curves.csv"});
  return result;
}

}  // namespace likefarm
