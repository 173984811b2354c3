#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "likefarm/classify.hpp"
#include "likefarm/cocluster.hpp"
#include "likefarm/datamodel.hpp"
#include "likefarm/error.hpp"
#include "likefarm/eval.hpp"
#include "likefarm/features.hpp"
#include "likefarm/pipeline.hpp"
#include "likefarm/synthgen.hpp"

namespace fs = std::filesystem;
using namespace likefarm;
using Json = nlohmann::ordered_json;

namespace {

fs::path manifest_for(const fs::path& output) {
  fs::path p = output;
  p.replace_extension(".manifest.json");
  return p;
}

RunManifest base_manifest(const std::string& command, std::uint64_t seed, const Json& config) {
  RunManifest m;
  m.command = command;
  m.tool_version = std::string(kToolVersion);
  m.seed = seed;
  m.config_json = config.dump();
  m.config_hash = fingerprint(m.config_json);
  return m;
}

std::vector<std::size_t> feature_set(const std::string& name) {
  if (name == "all") return all_feature_indices();
  if (name == "lexical") return lexical_feature_indices();
  if (name == "nonlexical") return nonlexical_feature_indices();
  throw InvalidArgument("unknown feature set \"" + name + "\" (expected all, lexical or nonlexical)");
}

Population population_of(const std::string& name) {
  if (name == "all") return Population::All;
  if (name == "english") return Population::EnglishOnly;
  throw InvalidArgument("unknown population \"" + name + "\" (expected all or english)");
}

struct SelectionOptions {
  std::string features_path;
  std::string campaign;
  std::string population = "all";
  double train_fraction = 0.8;
  std::uint64_t seed = 1;
};

void add_selection(CLI::App* cmd, SelectionOptions& o) {
  cmd->add_option("--features", o.features_path, "features.jsonl from extract")->required();
  cmd->add_option("--campaign", o.campaign, "restrict to this campaign plus the baseline users");
  cmd->add_option("--population", o.population, "all or english (users with an English post)")
      ->capture_default_str();
  cmd->add_option("--train-fraction", o.train_fraction, "training share of the stratified split")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "split, fold and forest seed")->capture_default_str();
}

std::vector<FeatureVector> selected_vectors(const SelectionOptions& o) {
  std::vector<FeatureVector> v = read_features(o.features_path);
  if (!o.campaign.empty()) {
    v = campaign_vectors(v, o.campaign);
    bool any = false;
    for (const auto& fv : v) any = any || fv.label.is_farm();
    if (!any) throw InvalidArgument("no users of campaign \"" + o.campaign + "\" in " + o.features_path);
  }
  return select_population(v, population_of(o.population));
}

Json selection_json(const SelectionOptions& o) {
  return Json{{"features", o.features_path},
              {"campaign", o.campaign},
              {"population", o.population},
              {"train_fraction", o.train_fraction},
              {"seed", o.seed}};
}

// ---------------------------------------------------------------------------

struct GenerateCmd {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;

  void run() const {
    GenConfig cfg = config.empty() ? default_paper_calibration() : load_gen_config(config);
    if (seed) cfg.seed = *seed;
    const Dataset d = generate(cfg);
    write_dataset(d, out);
    RunManifest m = base_manifest("generate", cfg.seed, Json::parse(to_json(cfg)));
    m.dataset_fingerprint = dataset_fingerprint(d);
    m.outputs = {"accounts.jsonl", "posts.jsonl", "likes.jsonl", "pages.jsonl"};
    write_manifest(m, fs::path(out) / "generate.manifest.json");
    std::cout << "generated " << d.accounts().size() << " accounts, " << d.posts().size() << " posts, "
              << d.likes().size() << " likes in " << out << "\n";
  }
};

struct CoclusterCmd {
  std::string in;
  std::string campaign;
  CoclusterConfig config;
  std::size_t min_user_degree = 10;
  std::size_t min_page_degree = 10;
  std::string out;
  std::string scatter;

  void run() const {
    const Dataset d = load_dataset_dir(in);
    const BipartiteGraph g = campaign.empty()
                                 ? build_bipartite(d.likes(), min_user_degree, min_page_degree)
                                 : campaign_graph(d, campaign, min_user_degree, min_page_degree);
    const ClusterAssignment a = cocluster(g, config);
    const auto truth = ground_truth(d);

    std::optional<std::vector<LabelKind>> labels;
    bool labeled = false;
    for (const auto& id : a.user_ids) labeled = labeled || truth.at(id).is_known();
    if (labeled) labels = label_clusters(a, truth);

    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot write " + out);
    auto emit = [&](const char* type, const std::string& id, std::size_t cluster) {
      Json j{{"type", type}, {"id", id}, {"cluster", cluster}};
      if (labels) j["cluster_label"] = (*labels)[cluster] == LabelKind::Farm ? "farm" : "baseline";
      os << j.dump() << "\n";
    };
    for (std::size_t i = 0; i < a.user_ids.size(); ++i) emit("user", a.user_ids[i], a.user_cluster[i]);
    for (std::size_t i = 0; i < a.page_ids.size(); ++i) emit("page", a.page_ids[i], a.page_cluster[i]);

    RunManifest m = base_manifest("cocluster", config.seed,
                                  Json{{"in", in},
                                       {"campaign", campaign},
                                       {"k", config.k},
                                       {"n_singular_vectors", config.n_singular_vectors},
                                       {"kmeans_restarts", config.kmeans_restarts},
                                       {"kmeans_max_iters", config.kmeans_max_iters},
                                       {"min_user_degree", min_user_degree},
                                       {"min_page_degree", min_page_degree}});
    m.dataset_fingerprint = dataset_fingerprint(d);
    m.classifier = "cocluster";
    m.hyperparams = {{"k", static_cast<double>(config.k)}};
    m.outputs = {fs::path(out).filename().string()};
    std::cout << "clustered " << g.n_users() << " users and " << g.n_pages() << " pages into " << config.k
              << " clusters\n";
    if (labels && config.k >= 2) {
      const ConfusionCounts c = cocluster_counts(a, *labels, truth);
      const Percentages p = percentages(c);
      const Metrics mm = metrics_from(c);
      m.metrics = {{"precision", mm.precision}, {"recall", mm.recall}, {"f1", mm.f1}};
      std::cout << "TP " << c.tp << " FP " << c.fp << " TN " << c.tn << " FN " << c.fn << "  precision "
                << p.precision << "% recall " << p.recall << "% F1 " << p.f1 << "%\n";
    }
    if (!scatter.empty()) {
      if (!labels) throw InvalidArgument("--scatter needs labeled accounts");
      export_scatter(g, a, *labels, truth, scatter);
      m.outputs.push_back(fs::path(scatter).filename().string());
    }
    write_manifest(m, manifest_for(out));
  }
};

struct ExtractCmd {
  std::string in;
  std::string out;

  void run() const {
    const Dataset d = load_dataset_dir(in);
    const std::vector<FeatureVector> v = extract_features(d);
    write_features(v, out);
    RunManifest m = base_manifest("extract", 0, Json{{"in", in}});
    m.dataset_fingerprint = dataset_fingerprint(d);
    m.outputs = {fs::path(out).filename().string()};
    write_manifest(m, manifest_for(out));
    std::cout << "extracted " << v.size() << " feature vectors\n";
  }
};

struct TrainCmd {
  SelectionOptions sel;
  std::string classifier = "svm";
  std::string features = "all";
  std::optional<double> gamma;
  std::optional<double> nu;
  std::size_t folds = 5;
  int grid_min = -10;
  int grid_max = 0;
  double tolerance = 1e-4;
  std::size_t threads = 1;
  BaselineParams baseline;
  std::string out;

  void run() const {
    const std::vector<FeatureVector> vectors = selected_vectors(sel);
    const TrainTestSplit s = split(vectors, sel.train_fraction, sel.seed);
    Json cfg = selection_json(sel);
    cfg["classifier"] = classifier;
    cfg["feature_set"] = features;
    RunManifest m = base_manifest("train", sel.seed, cfg);
    m.dataset_fingerprint = file_fingerprint(sel.features_path);
    m.classifier = classifier;
    m.outputs = {fs::path(out).filename().string()};

    Model model;
    if (classifier == "svm") {
      SvmOptions options;
      options.features = feature_set(features);
      options.tolerance = tolerance;
      if (gamma.has_value() != nu.has_value()) throw InvalidArgument("--gamma and --nu must be given together");
      SvmModel svm;
      if (gamma) {
        svm = train_svm(s.train, {*gamma, *nu}, options);
      } else {
        if (grid_min > grid_max) throw InvalidArgument("--grid-min exceeds --grid-max");
        GridSpec grid;
        for (int e = grid_min; e <= grid_max; ++e) {
          grid.gammas.push_back(std::ldexp(1.0, e));
          grid.nus.push_back(std::ldexp(1.0, e));
        }
        grid.folds = folds;
        grid.seed = sel.seed;
        grid.threads = threads;
        const GridSearchResult g = grid_search(s.train, grid, options);
        svm = g.model;
        m.metrics = {{"cv_f1", g.best_f1}};
        std::cout << "grid search: gamma " << g.best.gamma << " nu " << g.best.nu << " cross-validated F1 "
                  << g.best_f1 << "\n";
      }
      m.hyperparams = {{"gamma", svm.hyperparams.gamma}, {"nu", svm.hyperparams.nu}};
      cfg["tolerance"] = tolerance;
      model = std::move(svm);
    } else {
      BaselineParams p = baseline;
      p.features = feature_set(features);
      p.seed = sel.seed;
      model = train_baseline(parse_baseline_kind(classifier), s.train, p);
      m.hyperparams = {{"boosting_rounds", static_cast<double>(p.boosting_rounds)},
                       {"neighbors", static_cast<double>(p.neighbors)},
                       {"trees", static_cast<double>(p.trees)}};
    }
    m.config_json = cfg.dump();
    m.config_hash = fingerprint(m.config_json);
    save_model(model, out);
    write_manifest(m, manifest_for(out));
    std::cout << "trained " << classifier << " on " << s.train.size() << " vectors\n";
  }
};

struct EvaluateCmd {
  SelectionOptions sel;
  std::string model_path;
  bool all = false;
  std::string out;

  void run() const {
    const Model model = load_model(model_path);
    const std::vector<FeatureVector> vectors = selected_vectors(sel);
    std::vector<FeatureVector> test;
    std::size_t training = 0;
    if (all) {
      test = vectors;
    } else {
      TrainTestSplit s = split(vectors, sel.train_fraction, sel.seed);
      for (const auto& v : s.train) training += v.label.is_farm() ? 1 : 0;
      test = std::move(s.test);
    }
    std::vector<LabelKind> predicted;
    std::vector<LabelKind> truth;
    for (const FeatureVector& v : test) {
      predicted.push_back(predict(model, v));
      truth.push_back(v.label.kind);
    }
    const Evaluation e = compute_metrics(predicted, truth);
    RunRecord r;
    r.campaign = sel.campaign.empty() ? "all" : sel.campaign;
    r.training = training;
    for (const auto& v : test) r.testing += v.label.is_farm() ? 1 : 0;
    r.total = r.training + r.testing;
    r.counts = e.counts;
    export_report({r}, out);

    Json cfg = selection_json(sel);
    cfg["model"] = model_path;
    cfg["all"] = all;
    RunManifest m = base_manifest("evaluate", sel.seed, cfg);
    m.dataset_fingerprint = file_fingerprint(sel.features_path);
    m.classifier = classifier_name(model);
    m.metrics = {{"precision", e.metrics.precision},
                 {"recall", e.metrics.recall},
                 {"accuracy", e.metrics.accuracy},
                 {"f1", e.metrics.f1}};
    fs::path md = out;
    md.replace_extension(".md");
    m.outputs = {fs::path(out).filename().string(), md.filename().string()};
    write_manifest(m, manifest_for(out));
    const Percentages p = percentages(e.counts);
    std::cout << "TP " << e.counts.tp << " FP " << e.counts.fp << " TN " << e.counts.tn << " FN " << e.counts.fn
              << "  precision " << p.precision << "% recall " << p.recall << "% accuracy " << p.accuracy
              << "% F1 " << p.f1 << "%\n";
  }
};

struct ReportCmd {
  std::vector<std::string> inputs;
  std::string out;

  void run() const {
    std::vector<RunRecord> runs;
    Json sources = Json::array();
    for (const auto& in : inputs) {
      for (RunRecord& r : read_report(in)) runs.push_back(std::move(r));
      sources.push_back(Json{{"path", in}, {"fingerprint", file_fingerprint(in)}});
    }
    export_report(runs, out);
    RunManifest m = base_manifest("report", 0, Json{{"inputs", sources}});
    std::vector<std::pair<std::string, double>> metrics;
    for (const RunRecord& r : runs) metrics.emplace_back(r.campaign + ".f1", metrics_from(r.counts).f1);
    m.metrics = metrics;
    fs::path md = out;
    md.replace_extension(".md");
    m.outputs = {fs::path(out).filename().string(), md.filename().string()};
    write_manifest(m, manifest_for(out));
    std::cout << "wrote " << runs.size() << " rows to " << out << "\n";
  }
};

struct ReproduceCmd {
  PipelineConfig config;
  std::string gen_config;
  std::string out;

  void run() {
    if (!gen_config.empty()) config.generator = load_gen_config(gen_config);
    config.grid.threads = std::max<std::size_t>(1, config.grid.threads);
    const PipelineResult r = reproduce(config, out);
    for (const CampaignResult& c : r.campaigns) {
      const Percentages cc = percentages(c.cocluster.counts);
      std::cout << c.campaign << ": co-clustering precision " << cc.precision << "%, SVM F1 "
                << percentages(c.combined.counts).f1 << "% (non-lexical " << percentages(c.nonlexical.counts).f1
                << "%, lexical " << percentages(c.lexical.counts).f1 << "%)\n";
    }
    std::cout << "reports written to " << out << "\n";
  }
};

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Like-farm detection toolkit: synthetic corpora, co-clustering and timeline classifiers"};
  app.set_version_flag("--version", std::string("likefarm ") + std::string(kToolVersion) + " (model format " +
                                        std::to_string(kModelFormatVersion) + ")");
  app.require_subcommand(1);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "write a synthetic corpus");
  g->add_option("--config", gen.config, "generator configuration (JSON)")->check(CLI::ExistingFile);
  g->add_option("--seed", gen.seed, "overrides the configuration seed");
  g->add_option("--out", gen.out, "output directory")->required();

  CoclusterCmd cc;
  auto* c = app.add_subcommand("cocluster", "spectral co-clustering of the user-page graph");
  c->add_option("--in", cc.in, "dataset directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--campaign", cc.campaign, "use only this campaign's and the baseline users' likes");
  c->add_option("--k", cc.config.k, "number of clusters")->capture_default_str();
  c->add_option("--singular-vectors", cc.config.n_singular_vectors, "0 selects ceil(log2 k) + 1")
      ->capture_default_str();
  c->add_option("--restarts", cc.config.kmeans_restarts, "k-means restarts")->capture_default_str();
  c->add_option("--seed", cc.config.seed, "k-means seed")->capture_default_str();
  c->add_option("--min-user-degree", cc.min_user_degree)->capture_default_str();
  c->add_option("--min-page-degree", cc.min_page_degree)->capture_default_str();
  c->add_option("--out", cc.out, "assignment JSONL")->required();
  c->add_option("--scatter", cc.scatter, "edge scatter CSV");

  ExtractCmd ex;
  auto* e = app.add_subcommand("extract", "compute the 16 timeline features per account");
  e->add_option("--in", ex.in, "dataset directory")->required()->check(CLI::ExistingDirectory);
  e->add_option("--out", ex.out, "features JSONL")->required();

  TrainCmd tr;
  auto* t = app.add_subcommand("train", "train a classifier on the training split");
  add_selection(t, tr.sel);
  t->add_option("--classifier", tr.classifier, "svm, tree, adaboost, knn, forest or nb")->capture_default_str();
  t->add_option("--feature-set", tr.features, "all, lexical or nonlexical")->capture_default_str();
  t->add_option("--gamma", tr.gamma, "fixed RBF gamma (skips the grid search, needs --nu)");
  t->add_option("--nu", tr.nu, "fixed nu (skips the grid search, needs --gamma)");
  t->add_option("--folds", tr.folds, "cross-validation folds")->capture_default_str();
  t->add_option("--grid-min", tr.grid_min, "smallest grid exponent (base 2)")->capture_default_str();
  t->add_option("--grid-max", tr.grid_max, "largest grid exponent (base 2)")->capture_default_str();
  t->add_option("--tolerance", tr.tolerance, "SMO stopping tolerance")->capture_default_str();
  t->add_option("--threads", tr.threads, "grid search worker threads")->capture_default_str();
  t->add_option("--rounds", tr.baseline.boosting_rounds, "AdaBoost rounds")->capture_default_str();
  t->add_option("--neighbors", tr.baseline.neighbors, "kNN neighbours")->capture_default_str();
  t->add_option("--trees", tr.baseline.trees, "random forest size")->capture_default_str();
  t->add_option("--out", tr.out, "model JSON")->required();

  EvaluateCmd ev;
  auto* v = app.add_subcommand("evaluate", "score a model on the held-out split");
  add_selection(v, ev.sel);
  v->add_option("--model", ev.model_path, "model JSON from train")->required()->check(CLI::ExistingFile);
  v->add_flag("--all", ev.all, "evaluate every selected vector instead of the test split");
  v->add_option("--out", ev.out, "report CSV (a markdown table is written next to it)")->required();

  ReportCmd rp;
  auto* r = app.add_subcommand("report", "merge evaluation reports into one table");
  r->add_option("--in", rp.inputs, "report CSVs")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rp.out, "merged report CSV")->required();

  ReproduceCmd rep;
  auto* p = app.add_subcommand("reproduce", "run the full experiment on the calibrated synthetic corpus");
  p->add_option("--seed", rep.config.seed, "master seed")->capture_default_str();
  p->add_option("--config", rep.gen_config, "generator configuration (JSON)")->check(CLI::ExistingFile);
  p->add_option("--k", rep.config.cocluster.k, "co-clustering clusters")->capture_default_str();
  p->add_option("--train-fraction", rep.config.train_fraction)->capture_default_str();
  p->add_option("--jobs", rep.config.jobs, "campaigns processed concurrently")->capture_default_str();
  p->add_option("--threads", rep.config.grid.threads, "grid search threads per campaign")->capture_default_str();
  p->add_option("--out", rep.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) gen.run();
    else if (*c) cc.run();
    else if (*e) ex.run();
    else if (*t) tr.run();
    else if (*v) ev.run();
    else if (*r) rp.run();
    else if (*p) rep.run();
  } catch (const std::exception& ex_) {
    std::cerr << "likefarm: error: " << one_line(ex_.what()) << "\n";
    return 1;
  }
  return 0;
}
