#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "likefarm/bipartite.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/cocluster.hpp"
#include "likefarm/features.hpp"

namespace likefarm {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Reals in [0,1]; every 0/0 is 0. Recall is tp / (tp + fn).
struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

Metrics metrics_from(const ConfusionCounts& counts);

/// Integer percentages rounded half-up from the exact ratios.
struct Percentages {
  int precision = 0;
  int recall = 0;
  int accuracy = 0;
  int f1 = 0;

  bool operator==(const Percentages&) const = default;
};

/// round_half_up(100 * num / den) in exact integer arithmetic; 0 when den
/// is 0.
int percent_half_up(std::size_t num, std::size_t den);
Percentages percentages(const ConfusionCounts& counts);

struct Evaluation {
  ConfusionCounts counts;
  Metrics metrics;
};

/// Farm is the positive class. Throws InvalidArgument on length mismatch
/// or an Unknown truth label.
Evaluation compute_metrics(std::span<const LabelKind> predictions, std::span<const LabelKind> truth);

struct TrainTestSplit {
  std::vector<FeatureVector> train;
  std::vector<FeatureVector> test;
};

/// Stratified by class: each class contributes round(fraction * size)
/// members to the training side. Both sides keep input order. Throws
/// InvalidArgument for a class with fewer than 2 members or a fraction
/// outside (0,1).
TrainTestSplit split(std::span<const FeatureVector> vectors, double train_fraction, std::uint64_t seed);

/// Which users a run evaluates: all of them, or only those with at least
/// one English post.
enum class Population { All, EnglishOnly };

std::string_view to_string(Population population);
std::vector<FeatureVector> select_population(std::span<const FeatureVector> vectors, Population population);

/// Vectors of one campaign's farm users plus every baseline user.
std::vector<FeatureVector> campaign_vectors(std::span<const FeatureVector> vectors, std::string_view campaign);

struct CurveConfig {
  SvmHyperParams params;
  double train_fraction = 0.8;
  double tolerance = 1e-4;
};

struct CurvePoint {
  std::size_t prefix_length = 0;
  std::size_t added_feature = 0;
  double f1 = 0.0;
};

/// Trains and tests an SVM on the first j features of `feature_order`
/// (j = 1..16) over one fixed split. Throws InvalidArgument unless the
/// order is a permutation of the canonical features.
std::vector<CurvePoint> incremental_feature_curve(std::span<const FeatureVector> vectors,
                                                  const std::vector<std::size_t>& feature_order,
                                                  const CurveConfig& config, std::uint64_t seed);

/// One CSV row per graph edge: user_index,page_index,outcome. Users and
/// pages are indexed by (cluster, id) so clusters occupy contiguous bands.
void export_scatter(const BipartiteGraph& graph, const ClusterAssignment& assignment,
                    const std::vector<LabelKind>& cluster_labels,
                    const std::unordered_map<std::string, Label>& truth,
                    const std::filesystem::path& path);

struct RunRecord {
  std::string campaign;
  std::size_t total = 0;
  std::size_t training = 0;
  std::size_t testing = 0;
  ConfusionCounts counts;
};

/// CSV at `path` (raw reals) and an aligned markdown table with half-up
/// percentages next to it (same stem, ".md").
void export_report(const std::vector<RunRecord>& runs, const std::filesystem::path& path);

/// Reads the rows of a CSV written by export_report. Throws ParseError
/// naming the line on malformed input.
std::vector<RunRecord> read_report(const std::filesystem::path& path);

struct CoclusterRecord {
  std::string campaign;
  ConfusionCounts counts;
};

void export_cocluster_report(const std::vector<CoclusterRecord>& rows, const std::filesystem::path& path);

/// F1 per campaign (rows) and classifier (columns).
struct ComparisonTable {
  std::vector<std::string> classifiers;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
};

void export_comparison_report(const ComparisonTable& table, const std::filesystem::path& path);

struct CurveRecord {
  std::string campaign;
  std::string group;
  std::vector<CurvePoint> points;
};

void export_curves(const std::vector<CurveRecord>& curves, const std::filesystem::path& path);

/// Everything needed to rerun a command. Written as pretty JSON with keys
/// in a fixed order and no timestamps.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string dataset_fingerprint;
  std::string classifier;
  std::vector<std::pair<std::string, double>> hyperparams;
  std::vector<std::pair<std::string, double>> metrics;
  /// Effective configuration as a JSON document.
  std::string config_json = "{}";
  std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// FNV-1a based fingerprints rendered as 16 hex digits.
std::string fingerprint(std::string_view bytes);
std::string dataset_fingerprint(const Dataset& dataset);
std::string file_fingerprint(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

}  // namespace likefarm
