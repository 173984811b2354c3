#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "likefarm/classify.hpp"
#include "likefarm/cocluster.hpp"
#include "likefarm/eval.hpp"
#include "likefarm/synthgen.hpp"

namespace likefarm {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Likes of one campaign's farm users and all baseline users, filtered to
/// the given minimum degrees.
BipartiteGraph campaign_graph(const Dataset& dataset, std::string_view campaign,
                              std::size_t min_user_degree, std::size_t min_page_degree);

std::unordered_map<std::string, Label> ground_truth(const Dataset& dataset);

/// Confusion counts of the clustered users against ground truth.
ConfusionCounts cocluster_counts(const ClusterAssignment& assignment,
                                 const std::vector<LabelKind>& cluster_labels,
                                 const std::unordered_map<std::string, Label>& truth);

struct PipelineConfig {
  GenConfig generator = default_paper_calibration();
  /// Seeds generation, clustering, splits, folds and the forests.
  std::uint64_t seed = 1;
  CoclusterConfig cocluster;
  std::size_t min_user_degree = 10;
  std::size_t min_page_degree = 10;
  double train_fraction = 0.8;
  GridSpec grid = default_grid();
  double tolerance = 1e-4;
  BaselineParams baseline;
  /// Campaigns processed concurrently.
  std::size_t jobs = 1;
};

std::string to_json(const PipelineConfig& config);

struct CampaignResult {
  std::string campaign;
  CoclusterRecord cocluster;
  RunRecord nonlexical;
  RunRecord lexical;
  RunRecord combined;
  SvmHyperParams nonlexical_params;
  SvmHyperParams lexical_params;
  SvmHyperParams combined_params;
  /// "svm" first, then the baselines in BaselineKind order.
  std::vector<std::pair<std::string, double>> classifier_f1;
  std::vector<CurvePoint> lexical_first_curve;
  std::vector<CurvePoint> nonlexical_first_curve;
};

struct PipelineResult {
  std::string dataset_fingerprint;
  std::vector<CampaignResult> campaigns;
};

/// Runs one campaign of the experiment on extracted vectors. Writes the
/// co-clustering scatter to `scatter_path` when it is not empty.
CampaignResult run_campaign(const Dataset& dataset, const std::vector<FeatureVector>& vectors,
                            std::string_view campaign, const PipelineConfig& config,
                            const std::filesystem::path& scatter_path);

/// Generates the calibrated corpus, runs every campaign and writes the
/// report tables, scatter and curve CSVs and their manifests under `out`.
PipelineResult reproduce(const PipelineConfig& config, const std::filesystem::path& out);

}  // namespace likefarm
