#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "likefarm/bipartite.hpp"
#include "likefarm/datamodel.hpp"

namespace likefarm {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct CoclusterConfig {
  std::size_t k = 2;
  /// Singular vectors counted including the trivial first pair; 0 selects
  /// ceil(log2 k) + 1.
  std::size_t n_singular_vectors = 0;
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iters = 300;
  std::uint64_t seed = 0;
};

/// Cluster index per graph user and page, aligned with the graph's id
/// vectors. Cluster indices are canonical: clusters are numbered in order
/// of their smallest user id (then smallest page id for user-less ones).
struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::string> user_ids;
  std::vector<std::size_t> user_cluster;
  std::vector<std::string> page_ids;
  std::vector<std::size_t> page_cluster;

  std::optional<std::size_t> cluster_of_user(std::string_view id) const;
  std::optional<std::size_t> cluster_of_page(std::string_view id) const;
};

/// An = D1^{-1/2} A D2^{-1/2}. Throws EmptyGraphError for an empty graph
/// and NumericalError for a zero-degree row or column.
SparseMatrix normalize(const BipartiteGraph& graph);

/// Leading singular triplets of a sparse matrix after removing a known
/// rank-one component sigma0 * u0 v0^T.
struct SingularTriplets {
  Eigen::VectorXd values;
  Eigen::MatrixXd left;   // rows x r
  Eigen::MatrixXd right;  // cols x r
  std::size_t iterations = 0;
};

/// Block subspace iteration with Rayleigh-Ritz extraction; falls back to a
/// dense decomposition when the block covers the matrix. Throws
/// NumericalError with the residual when `max_iters` is exhausted.
SingularTriplets top_singular_triplets(const SparseMatrix& a, std::size_t r,
                                       const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                                       double sigma0, std::uint64_t seed,
                                       std::size_t max_iters = 5000, double tol = 1e-10);

struct KMeansResult {
  std::vector<std::size_t> assignment;
  Eigen::MatrixXd centers;  // k x dim
  double inertia = 0.0;
};

/// k-means++ seeding and Lloyd iterations; the lowest-inertia restart wins,
/// earlier restarts on ties.
KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::size_t restarts,
                    std::size_t max_iters, std::uint64_t seed);

ClusterAssignment cocluster(const BipartiteGraph& graph, const CoclusterConfig& config);

/// Majority ground-truth class of each cluster's users (ties go to Farm).
/// Clusters without users map to Unknown. Throws InvalidArgument if a
/// cluster has users but none of them is labeled.
std::vector<LabelKind> label_clusters(const ClusterAssignment& assignment,
                                      const std::unordered_map<std::string, Label>& ground_truth);

}  // namespace likefarm
