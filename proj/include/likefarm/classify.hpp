#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "likefarm/features.hpp"

namespace likefarm {

/// Version of the model.json layout written by save_model.
inline constexpr int kModelFormatVersion = 1;

/// exp(-gamma * |x - y|^2). Throws InvalidArgument on length mismatch or
/// gamma <= 0.
double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// ---------------------------------------------------------------------------
// nu-SVM dual solver

/// Solution of
///   min 1/2 a^T Q a,  Q_ij = y_i y_j K_ij,
///   0 <= a_i <= 1,  sum_{y_i=+1} a_i = sum_{y_i=-1} a_i = nu * l / 2,
/// the scaled dual of the two-class nu-SVM.
struct NuSvmSolution {
  std::vector<double> alpha;
  double rho = 0.0;
  double r = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  /// Largest remaining KKT violation (maximal-pair gradient gap).
  double violation = 0.0;
};

/// Pairwise (SMO) coordinate descent with maximal-violating-pair selection
/// and second-order choice of the partner. Ties go to the smaller index.
/// `kernel` is the dense l x l kernel matrix, row-major; `y` holds +1/-1.
/// Throws InvalidArgument when nu is infeasible and NumericalError when
/// `max_iterations` is exhausted (0 selects max(10^6, 100 l)).
NuSvmSolution solve_nu_svm(std::span<const double> kernel, std::span<const int> y, double nu,
                           double tolerance = 1e-4, std::size_t max_iterations = 0);

/// Largest feasible nu for the class counts: 2 min(n+, n-) / l.
double max_feasible_nu(std::size_t n_positive, std::size_t n_negative);

// ---------------------------------------------------------------------------
// SVM models

struct SvmHyperParams {
  double gamma = 1.0;
  double nu = 0.5;

  bool operator==(const SvmHyperParams&) const = default;
};

struct SvmOptions {
  /// Canonical feature indices the model uses, in order.
  std::vector<std::size_t> features = all_feature_indices();
  double tolerance = 1e-4;
  std::size_t max_iterations = 0;
};

struct SvmModel {
  SvmHyperParams hyperparams;
  std::vector<std::size_t> features;
  Scaler scaler;
  /// Scaled support vectors restricted to `features`.
  std::vector<std::vector<double>> support_vectors;
  /// y_i a_i / l, so every magnitude is at most 1/l.
  std::vector<double> dual_coefficients;
  double bias = 0.0;
  std::size_t training_size = 0;
};

/// Farm is the positive class. Requires both classes and a feasible nu.
SvmModel train_svm(std::span<const FeatureVector> train, const SvmHyperParams& params,
                   const SvmOptions& options = {});

double decision_value(const SvmModel& model, const FeatureVector& vector);
/// Farm when the decision value is >= 0.
LabelKind predict(const SvmModel& model, const FeatureVector& vector);

/// Decision value for a vector already scaled and restricted to the model's
/// features. Throws InvalidArgument on dimension mismatch.
double decision_value_scaled(const SvmModel& model, std::span<const double> x);

struct GridSpec {
  std::vector<double> gammas;
  std::vector<double> nus;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  /// Worker threads for the nu values of one (fold, gamma) cell; results do
  /// not depend on it.
  std::size_t threads = 1;
};

/// gamma, nu in {2^-10, ..., 2^0}; five stratified folds.
GridSpec default_grid(std::uint64_t seed = 0);

struct GridPoint {
  SvmHyperParams params;
  bool feasible = false;
  double mean_f1 = 0.0;
};

struct GridSearchResult {
  SvmHyperParams best;
  double best_f1 = 0.0;
  std::vector<GridPoint> points;  // gamma-major, ascending
  SvmModel model;                 // retrained on all training vectors
};

/// Exhaustive search by mean cross-validated F1; the scaler is refit on
/// each training fold. Ties prefer the smaller gamma, then the smaller nu.
/// Throws InvalidArgument when no grid point is feasible.
GridSearchResult grid_search(std::span<const FeatureVector> train, const GridSpec& grid,
                             const SvmOptions& options = {});

/// Fold index in [0, folds) for each label; each class is shuffled with
/// `seed` and dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const LabelKind> labels, std::size_t folds,
                                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Comparison classifiers

enum class BaselineKind { DecisionTree, AdaBoost, KNN, RandomForest, NaiveBayes };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineParams {
  std::vector<std::size_t> features = all_feature_indices();
  std::size_t boosting_rounds = 50;
  std::size_t neighbors = 5;
  std::size_t trees = 100;
  double variance_floor = 1e-9;
  std::uint64_t seed = 0;
};

/// Binary split tree. Internal nodes send x[feature] <= threshold left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  LabelKind label = LabelKind::Farm;
};

struct Tree {
  std::vector<TreeNode> nodes;  // root at 0
};

struct WeightedStump {
  Tree stump;
  double weight = 0.0;
};

struct GaussianClass {
  double log_prior = 0.0;
  std::vector<double> mean;
  std::vector<double> variance;
};

struct BaselineModel {
  BaselineKind kind = BaselineKind::DecisionTree;
  BaselineParams params;
  Scaler scaler;
  std::vector<Tree> trees;               // DecisionTree (1), RandomForest
  std::vector<WeightedStump> stumps;     // AdaBoost
  std::vector<std::vector<double>> points;  // KNN, scaled
  std::vector<LabelKind> point_labels;   // KNN
  GaussianClass farm;                    // NaiveBayes
  GaussianClass baseline;                // NaiveBayes
};

BaselineModel train_baseline(BaselineKind kind, std::span<const FeatureVector> train,
                             const BaselineParams& params = {});
LabelKind predict_baseline(const BaselineModel& model, const FeatureVector& vector);

/// CART on scaled rows with sample weights. `max_depth` 0 means unlimited;
/// `features_per_split` 0 means all, otherwise that many are sampled per
/// node with `seed`.
Tree fit_tree(const std::vector<std::vector<double>>& x, std::span<const LabelKind> y,
              std::span<const double> weights, std::size_t max_depth,
              std::size_t features_per_split = 0, std::uint64_t seed = 0);
LabelKind predict_tree(const Tree& tree, std::span<const double> x);

// ---------------------------------------------------------------------------
// Serialization

using Model = std::variant<SvmModel, BaselineModel>;

/// "svm", "tree", "adaboost", "knn", "forest", "nb".
std::string classifier_name(const Model& model);
LabelKind predict(const Model& model, const FeatureVector& vector);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);
std::string model_to_json(const Model& model);
Model model_from_json(std::string_view text);

}  // namespace likefarm
