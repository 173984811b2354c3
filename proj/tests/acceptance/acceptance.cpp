// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: likefarm_acceptance <path-to-likefarm-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../common/planted.hpp"
#include "../common/qp_oracle.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/cocluster.hpp"
#include "likefarm/eval.hpp"
#include "likefarm/features.hpp"
#include "likefarm/lexical.hpp"
#include "likefarm/pipeline.hpp"
#include "likefarm/synthgen.hpp"

namespace fs = std::filesystem;
using namespace likefarm;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. metric arithmetic on reference confusion counts

struct CountRow {
  const char* set;
  const char* campaign;
  std::size_t tp, fp, tn, fn;
  std::optional<int> precision, recall, accuracy, f1;
};

const std::vector<CountRow>& reference_rows() {
  static const std::vector<CountRow> rows = {
      {"cocluster", "AL-USA", 681, 9, 569, 4, 98, 99, std::nullopt, 99},
      {"cocluster", "AL-ALL", 448, 53, 527, 1, 89, 99, std::nullopt, 94},
      {"cocluster", "BL-USA", 523, 588, 18, 0, 47, 100, std::nullopt, 64},
      {"cocluster", "SF-USA", 428, 67, 512, 1, 86, 100, std::nullopt, 94},
      {"cocluster", "SF-ALL", 431, 48, 530, 2, 90, 99, std::nullopt, 95},
      {"cocluster", "MS-USA", 201, 22, 549, 2, 90, 99, std::nullopt, 93},
      {"nonlexical", "BL-USA", 37, 12, 270, 80, 76, 32, 77, 45},
      {"nonlexical", "AL-ALL", 132, 5, 278, 9, 96, 94, 97, 95},
      {"nonlexical", "AL-USA", 113, 4, 278, 51, 97, 69, 88, 81},
      {"nonlexical", "SF-ALL", 139, 9, 273, 35, 94, 80, 90, 86},
      {"nonlexical", "SF-USA", 110, 5, 277, 21, 96, 84, 94, 90},
      {"nonlexical", "MS-USA", 39, 2, 280, 13, 95, 75, 96, 84},
      {"lexical", "BL-USA", 113, 0, 240, 0, 100, 100, 100, 100},
      {"lexical", "AL-ALL", 129, 2, 238, 6, 98, 96, 98, 97},
      {"lexical", "AL-USA", 113, 0, 240, 1, 100, 99, 99, 99},
      {"lexical", "SF-ALL", 150, 1, 239, 2, 99, 99, 99, 99},
      {"lexical", "SF-USA", 99, 2, 238, 15, 98, 87, 95, 92},
      {"lexical", "MS-USA", 45, 0, 240, 0, 100, 100, 100, 100},
      {"combined", "BL-USA", 113, 1, 281, 4, 99, 97, 99, 98},
      {"combined", "AL-ALL", 137, 1, 281, 4, 99, 97, 99, 98},
      {"combined", "AL-USA", 157, 1, 281, 7, 99, 96, 98, 97},
      {"combined", "SF-ALL", 163, 2, 280, 11, 99, 94, 97, 96},
      {"combined", "SF-USA", 122, 1, 281, 9, 99, 93, 98, 96},
      {"combined", "MS-USA", 50, 0, 282, 2, 100, 96, 99, 98},
  };
  return rows;
}

Outcome metric_arithmetic() {
  std::size_t checked = 0;
  std::vector<std::string> mismatches;
  for (const CountRow& row : reference_rows()) {
    std::vector<LabelKind> pred, truth;
    auto push = [&](std::size_t n, LabelKind p, LabelKind t) {
      pred.insert(pred.end(), n, p);
      truth.insert(truth.end(), n, t);
    };
    push(row.tp, LabelKind::Farm, LabelKind::Farm);
    push(row.fp, LabelKind::Farm, LabelKind::Baseline);
    push(row.tn, LabelKind::Baseline, LabelKind::Baseline);
    push(row.fn, LabelKind::Baseline, LabelKind::Farm);
    const Percentages got = percentages(compute_metrics(pred, truth).counts);
    const std::pair<const char*, std::pair<int, std::optional<int>>> cells[] = {
        {"P", {got.precision, row.precision}},
        {"R", {got.recall, row.recall}},
        {"A", {got.accuracy, row.accuracy}},
        {"F", {got.f1, row.f1}}};
    for (const auto& [name, values] : cells) {
      if (!values.second) continue;
      ++checked;
      if (values.first != *values.second) {
        mismatches.push_back(fmt("%s/%s %s=%d vs %d", row.set, row.campaign, name, values.first,
                                 *values.second));
      }
    }
  }
  std::string detail = fmt("%zu/%zu percentages reproduced", checked - mismatches.size(), checked);
  if (!mismatches.empty()) {
    detail += "; mismatches (computed vs reference):";
    for (const std::string& m : mismatches) detail += " [" + m + "]";
  }
  return {mismatches.empty(), detail};
}

// ---------------------------------------------------------------------------
// 2. formula oracles

Outcome formula_oracles() {
  std::vector<std::string> failures;
  auto expect = [&](const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) failures.push_back(fmt("%s=%.6f want %.6f", what.c_str(), got, want));
  };
  const double a1 = ari(6.9, 17.6);
  const double a2 = ari(5.7, 22.8);
  expect("ari(6.9,17.6)", a1, 20.2, 0.1);
  expect("ari(5.7,22.8)", a2, 16.9, 0.1);

  // Hand-computed values.
  expect("flesch(3,1,3)", flesch(3, 1, 3), 119.19, 1e-9);
  expect("flesch(100,4,150)", flesch(100, 4, 150), 54.56, 1e-9);
  const std::pair<const char*, std::size_t> syllables[] = {
      {"cat", 1}, {"hello", 2}, {"make", 1}, {"rhythm", 1}, {"beautiful", 3}, {"queue", 1}};
  for (const auto& [word, n] : syllables) {
    const std::size_t got = count_syllables(word);
    if (got != n) failures.push_back(fmt("syllables(%s)=%zu want %zu", word, got, n));
  }
  Post post;
  post.author = "u";
  post.text = "The cat sat. The dog ran.";
  const LexicalFeatures f = lexical_profile(std::vector<Post>{post});
  expect("richness", f.richness, 5.0 / 6.0, 0.0);
  expect("profile flesch", f.flesch, 206.835 - 1.015 * 3.0 - 84.6 * 1.0, 1e-9);
  expect("profile ari", f.ari, 4.71 * 3.0 + 0.5 * 3.0 - 21.43, 1e-9);

  std::string detail = fmt("ari(6.9,17.6)=%.3f ari(5.7,22.8)=%.3f", a1, a2);
  for (const std::string& s : failures) detail += "; " + s;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// 3. SMO against the barrier QP oracle

Outcome smo_correctness() {
  const auto start = Clock::now();
  const std::size_t instances = 25;
  double worst_obj = 0.0, worst_kkt = 0.0, worst_kkt_default = 0.0;
  std::size_t max_l = 0;
  for (std::uint64_t seed = 1; seed <= instances; ++seed) {
    const test::TinyInstance inst = test::tiny_instance(seed);
    max_l = std::max(max_l, inst.y.size());
    const Eigen::MatrixXd q = test::signed_kernel(inst.kernel, inst.y);
    const double oracle = test::qp_oracle(q, inst.y, inst.nu);
    const NuSvmSolution tight = solve_nu_svm(inst.kernel, inst.y, inst.nu, 1e-7);
    const NuSvmSolution loose = solve_nu_svm(inst.kernel, inst.y, inst.nu);
    worst_obj = std::max(worst_obj, std::abs(tight.objective - oracle));
    worst_kkt = std::max(worst_kkt, test::kkt_violation(q, inst.y, tight.alpha));
    worst_kkt_default = std::max(worst_kkt_default, test::kkt_violation(q, inst.y, loose.alpha));
  }
  const double elapsed = seconds_since(start);
  const bool pass = worst_obj < 1e-6 && worst_kkt < 1e-4 && worst_kkt_default < 1e-4 && elapsed < 10.0;
  return {pass, fmt("%zu instances (l<=%zu), max |obj-oracle| %.2e (stop 1e-7), max KKT %.2e / %.2e "
                    "(default stop), %.2fs",
                    instances, max_l, worst_obj, worst_kkt, worst_kkt_default, elapsed)};
}

// ---------------------------------------------------------------------------
// 4. planted partition recovery

Outcome planted_recovery() {
  const auto start = Clock::now();
  std::size_t good = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const test::Planted p = test::planted_graph(200, 200, 20, 0.05, seed);
    CoclusterConfig cfg;
    cfg.seed = seed;
    const double agreement = test::user_agreement(cocluster(p.graph, cfg), p.user_block);
    worst = std::min(worst, agreement);
    if (agreement >= 0.95) ++good;
  }
  const double elapsed = seconds_since(start);
  return {good >= 18 && elapsed < 30.0,
          fmt("%zu/20 seeds at >=95%% agreement (worst %.3f), %.2fs", good, worst, elapsed)};
}

// ---------------------------------------------------------------------------
// 5. naive vs stealthy co-clustering precision

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome stealthy_failure() {
  const auto start = Clock::now();
  std::vector<double> naive, stealthy;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GenConfig cfg = default_paper_calibration();
    cfg.seed = seed;
    const Dataset ds = generate(cfg);
    const auto truth = ground_truth(ds);
    for (const char* campaign : {"AL-USA", "BL-USA"}) {
      const BipartiteGraph g = campaign_graph(ds, campaign, 10, 10);
      CoclusterConfig cc;
      cc.seed = seed;
      const ClusterAssignment as = cocluster(g, cc);
      const Metrics m = metrics_from(cocluster_counts(as, label_clusters(as, truth), truth));
      (std::string(campaign) == "AL-USA" ? naive : stealthy).push_back(m.precision);
    }
  }
  const double mn = median(naive), ms = median(stealthy);
  const double elapsed = seconds_since(start);
  return {mn >= 0.9 && ms <= 0.6 && elapsed < 120.0,
          fmt("median precision AL-USA %.3f (>=0.90), BL-USA %.3f (<=0.60), %.1fs", mn, ms, elapsed)};
}

// ---------------------------------------------------------------------------
// 6. classifier superiority

double test_f1(const Model& model, const std::vector<FeatureVector>& test) {
  std::vector<LabelKind> pred, truth;
  for (const FeatureVector& v : test) {
    pred.push_back(predict(model, v));
    truth.push_back(v.label.kind);
  }
  return compute_metrics(pred, truth).metrics.f1;
}

Outcome classifier_superiority(const Dataset& ds, const std::vector<FeatureVector>& vectors,
                               std::uint64_t seed) {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  double stealthy_gap = 0.0;
  for (const std::string& campaign : ds.campaigns()) {
    const auto subset = campaign_vectors(vectors, campaign);
    const TrainTestSplit s = split(subset, 0.8, seed);
    const GridSearchResult combined = grid_search(s.train, default_grid(seed));
    const double svm = test_f1(Model(combined.model), s.test);
    const double nb = test_f1(Model(train_baseline(BaselineKind::NaiveBayes, s.train)), s.test);
    pass = pass && svm >= 0.95 && svm > nb;
    detail += fmt("%s svm %.3f nb %.3f; ", campaign.c_str(), svm, nb);
    if (campaign == "BL-USA") {
      SvmOptions options;
      options.features = nonlexical_feature_indices();
      const GridSearchResult nonlex = grid_search(s.train, default_grid(seed), options);
      const double f = test_f1(Model(nonlex.model), s.test);
      stealthy_gap = svm - f;
      detail += fmt("BL-USA non-lexical %.3f (gap %.3f); ", f, stealthy_gap);
    }
  }
  const double elapsed = seconds_since(start);
  pass = pass && stealthy_gap >= 0.20 && elapsed < 600.0;
  return {pass, detail + fmt("%.0fs", elapsed)};
}

// ---------------------------------------------------------------------------
// 7. zero-fill rule

Outcome zero_fill(const Dataset& ds, const std::vector<FeatureVector>& vectors, std::uint64_t seed) {
  std::size_t zero_ratio = 0, bad_slots = 0;
  for (const FeatureVector& v : vectors) {
    if (v.english_ratio != 0.0) continue;
    ++zero_ratio;
    for (std::size_t i = 0; i < kLexicalCount; ++i) bad_slots += v.values[i] != 0.0;
  }
  const auto all = select_population(vectors, Population::All);
  const auto english = select_population(vectors, Population::EnglishOnly);
  const bool toggle_ok = all.size() == vectors.size() && all.size() - english.size() == zero_ratio;

  // Train on one campaign and classify every zero-ratio user of it.
  const std::string campaign = ds.campaigns().front();
  const auto subset = campaign_vectors(vectors, campaign);
  const TrainTestSplit s = split(subset, 0.8, seed);
  const SvmModel model = train_svm(s.train, SvmHyperParams{1.0 / 64.0, 1.0 / 16.0});
  std::size_t classified = 0, zero_in_subset = 0;
  for (const FeatureVector& v : subset) {
    if (v.english_ratio != 0.0) continue;
    ++zero_in_subset;
    const LabelKind k = predict(model, v);
    classified += k == LabelKind::Farm || k == LabelKind::Baseline;
  }
  const bool pass = zero_ratio > 0 && bad_slots == 0 && toggle_ok && classified == zero_in_subset;
  return {pass, fmt("%zu users with ratio 0, %zu non-zero lexical slots, populations %zu/%zu, "
                    "%zu/%zu zero-ratio %s users classified",
                    zero_ratio, bad_slots, all.size(), english.size(), classified, zero_in_subset,
                    campaign.c_str())};
}

// ---------------------------------------------------------------------------
// 8. determinism of the reproduce command

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> relative_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) out.push_back(fs::relative(entry.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const std::string& cli) {
  const auto start = Clock::now();
  const fs::path base = fs::temp_directory_path() / ("likefarm-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  const fs::path runs[] = {base / "a", base / "b"};
  for (const fs::path& out : runs) {
    const std::string cmd = "\"" + cli + "\" reproduce --seed 7 --out \"" + out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      fs::remove_all(base);
      return {false, "reproduce exited non-zero: " + cmd};
    }
  }
  const auto files_a = relative_files(runs[0]);
  const auto files_b = relative_files(runs[1]);
  std::size_t reports = 0, differing = 0;
  std::string first_diff;
  if (files_a != files_b) {
    differing = 1;
    first_diff = "file lists differ";
  } else {
    for (const fs::path& rel : files_a) {
      const std::string ext = rel.extension().string();
      if (ext != ".csv" && ext != ".md" && ext != ".json") continue;
      ++reports;
      if (slurp(runs[0] / rel) != slurp(runs[1] / rel)) {
        if (differing++ == 0) first_diff = rel.string();
      }
    }
  }
  fs::remove_all(base);
  const double elapsed = seconds_since(start);
  std::string detail = fmt("%zu report/manifest files compared, %zu differ, %.0fs", reports, differing, elapsed);
  if (!first_diff.empty()) detail += " (" + first_diff + ")";
  return {reports > 0 && differing == 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <likefarm-cli>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const std::uint64_t seed = 7;

  int failures = 0;
  auto report = [&](int n, const char* name, auto&& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };

  report(1, "metric arithmetic", metric_arithmetic);
  report(2, "formula oracles", formula_oracles);
  report(3, "SMO vs QP oracle", smo_correctness);
  report(4, "planted recovery", planted_recovery);
  report(5, "stealthy co-clustering failure", stealthy_failure);

  GenConfig cfg = default_paper_calibration();
  cfg.seed = seed;
  const Dataset ds = generate(cfg);
  const std::vector<FeatureVector> vectors = extract_features(ds);
  report(6, "classifier superiority", [&] { return classifier_superiority(ds, vectors, seed); });
  report(7, "zero-fill rule", [&] { return zero_fill(ds, vectors, seed); });
  report(8, "reproduce determinism", [&] { return determinism(cli); });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
