#include "likefarm/cocluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "likefarm/error.hpp"
#include "likefarm/simd/kernels.hpp"

namespace likefarm {

namespace {

using Rng = std::mt19937_64;

std::optional<std::size_t> position(const std::vector<std::string>& ids,
                                    const std::vector<std::size_t>& clusters, std::string_view id) {
  const auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) return std::nullopt;
  return clusters[static_cast<std::size_t>(it - ids.begin())];
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// Operator view of a - sigma0 * u0 v0^T.
struct Deflated {
  const SparseMatrix& a;
  const Eigen::VectorXd& u0;
  const Eigen::VectorXd& v0;
  double sigma0;

  bool active() const { return u0.size() > 0; }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd y = a * x;
    if (active()) y.noalias() -= sigma0 * u0 * (v0.transpose() * x);
    return y;
  }
  Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& y) const {
    Eigen::MatrixXd x = a.transpose() * y;
    if (active()) x.noalias() -= sigma0 * v0 * (u0.transpose() * y);
    return x;
  }
  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd(a);
    if (active()) d.noalias() -= sigma0 * u0 * v0.transpose();
    return d;
  }
};

double squared_distance_to(const double* x, const double* center, std::size_t dim) {
  return simd::active().squared_distance(x, center, dim);
}

struct Lloyd {
  std::vector<std::size_t> assignment;
  std::vector<double> centers;
  double inertia = 0.0;
};

// Nearest center per point; ties go to the smaller center index.
double assign(const std::vector<double>& points, std::size_t n, std::size_t dim,
              const std::vector<double>& centers, std::size_t k, std::vector<std::size_t>& out,
              std::vector<double>& dist, bool& changed) {
  const auto& kern = simd::active();
  std::vector<double> d(k);
  double inertia = 0.0;
  changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    kern.squared_distances(points.data() + i * dim, centers.data(), k, dim, d.data());
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
      if (d[c] < d[best]) best = c;
    }
    if (out[i] != best) changed = true;
    out[i] = best;
    dist[i] = d[best];
    inertia += d[best];
  }
  return inertia;
}

Lloyd run_lloyd(const std::vector<double>& points, std::size_t n, std::size_t dim, std::size_t k,
                std::size_t max_iters, Rng& rng) {
  Lloyd run;
  run.centers.assign(k * dim, 0.0);
  // k-means++ seeding.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  std::copy_n(points.data() + first * dim, dim, run.centers.data());
  for (std::size_t c = 1; c < k; ++c) {
    const double* prev = run.centers.data() + (c - 1) * dim;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance_to(points.data() + i * dim, prev, dim));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = std::uniform_real_distribution<double>(0.0, total)(rng);
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    std::copy_n(points.data() + pick * dim, dim, run.centers.data() + c * dim);
  }

  run.assignment.assign(n, k);
  std::vector<double> dist(n);
  bool changed = true;
  run.inertia = assign(points, n, dim, run.centers, k, run.assignment, dist, changed);
  for (std::size_t iter = 0; iter < max_iters && changed; ++iter) {
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = run.assignment[i];
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c * dim + d] += points[i * dim + d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its center.
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy_n(points.data() + far * dim, dim, run.centers.data() + c * dim);
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        run.centers[c * dim + d] = sums[c * dim + d] / static_cast<double>(counts[c]);
      }
    }
    run.inertia = assign(points, n, dim, run.centers, k, run.assignment, dist, changed);
  }
  return run;
}

}  // namespace

std::optional<std::size_t> ClusterAssignment::cluster_of_user(std::string_view id) const {
  return position(user_ids, user_cluster, id);
}

std::optional<std::size_t> ClusterAssignment::cluster_of_page(std::string_view id) const {
  return position(page_ids, page_cluster, id);
}

SparseMatrix normalize(const BipartiteGraph& graph) {
  if (graph.empty()) throw EmptyGraphError("cannot normalize an empty graph");
  const std::size_t m = graph.n_users();
  const std::size_t n = graph.n_pages();
  for (std::size_t j = 0; j < n; ++j) {
    if (graph.page_degree(j) == 0) {
      throw NumericalError("page \"" + graph.page_ids()[j] + "\" has zero degree");
    }
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(graph.n_edges());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t du = graph.user_degree(i);
    if (du == 0) throw NumericalError("user \"" + graph.user_ids()[i] + "\" has zero degree");
    for (const auto j : graph.pages_of(i)) {
      const double v = 1.0 / std::sqrt(static_cast<double>(du) * static_cast<double>(graph.page_degree(j)));
      entries.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

SingularTriplets top_singular_triplets(const SparseMatrix& a, std::size_t r,
                                       const Eigen::VectorXd& u0, const Eigen::VectorXd& v0,
                                       double sigma0, std::uint64_t seed, std::size_t max_iters,
                                       double tol) {
  const auto m = static_cast<std::size_t>(a.rows());
  const auto n = static_cast<std::size_t>(a.cols());
  if (r == 0 || r > std::min(m, n)) {
    throw InvalidArgument("requested " + std::to_string(r) + " singular triplets of a " +
                          std::to_string(m) + "x" + std::to_string(n) + " matrix");
  }
  const Deflated op{a, u0, v0, sigma0};
  const std::size_t block = std::min(r + 12, std::min(m, n));
  const auto ri = static_cast<Eigen::Index>(r);

  SingularTriplets out;
  if (block + 2 >= std::min(m, n)) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(op.dense(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.values = svd.singularValues().head(ri);
    out.left = svd.matrixU().leftCols(ri);
    out.right = svd.matrixV().leftCols(ri);
    return out;
  }

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd start(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(block));
  for (Eigen::Index j = 0; j < start.cols(); ++j) {
    for (Eigen::Index i = 0; i < start.rows(); ++i) start(i, j) = normal(rng);
  }
  Eigen::MatrixXd q = orthonormal_columns(start);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const Eigen::MatrixXd b = op.apply(q);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd z = op.apply_transpose(b);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::MatrixXd& w = svd.matrixV();
    // A^T u_i = z w_i / s_i and A v_i = s_i u_i by construction.
    residual = 0.0;
    for (Eigen::Index i = 0; i < ri; ++i) {
      const Eigen::VectorXd zw = z * w.col(i);
      const Eigen::VectorXd qw = q * w.col(i);
      const double res = s(i) > 0.0 ? (zw / s(i) - s(i) * qw).norm() : zw.norm();
      residual = std::max(residual, res);
    }
    if (residual <= tol) {
      out.values = s.head(ri);
      out.left = svd.matrixU().leftCols(ri);
      out.right = q * w.leftCols(ri);
      out.iterations = it;
      return out;
    }
    q = orthonormal_columns(z);
  }
  throw NumericalError("singular vectors did not converge after " + std::to_string(max_iters) +
                       " iterations (residual " + std::to_string(residual) + ", tolerance " +
                       std::to_string(tol) + ")");
}

KMeansResult kmeans(const Eigen::MatrixXd& points, std::size_t k, std::size_t restarts,
                    std::size_t max_iters, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto dim = static_cast<std::size_t>(points.cols());
  if (k == 0 || n < k) throw InvalidArgument("k-means needs at least k points");
  if (restarts == 0) throw InvalidArgument("k-means needs at least one restart");
  std::vector<double> flat(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      flat[i * dim + d] = points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
    }
  }
  Rng seeder(seed);
  Lloyd best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(seeder());
    Lloyd run = run_lloyd(flat, n, dim, k, max_iters, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  KMeansResult out;
  out.assignment = std::move(best.assignment);
  out.inertia = best.inertia;
  out.centers.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < dim; ++d) {
      out.centers(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d)) = best.centers[c * dim + d];
    }
  }
  return out;
}

ClusterAssignment cocluster(const BipartiteGraph& graph, const CoclusterConfig& config) {
  if (config.k < 2) throw InvalidArgument("k must be at least 2");
  if (config.kmeans_restarts < 1) throw InvalidArgument("kmeans_restarts must be at least 1");
  const std::size_t m = graph.n_users();
  const std::size_t n = graph.n_pages();
  if (m < config.k || n < config.k) {
    throw InvalidArgument("graph has " + std::to_string(m) + " users and " + std::to_string(n) +
                          " pages; need at least k = " + std::to_string(config.k) + " of each");
  }
  std::size_t n_sv = config.n_singular_vectors;
  if (n_sv == 0) n_sv = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(config.k)))) + 1;
  if (n_sv < 2) throw InvalidArgument("n_singular_vectors must be at least 2");
  const std::size_t r = std::min(n_sv - 1, std::min(m, n) - 1);

  const SparseMatrix an = normalize(graph);
  Eigen::VectorXd sd1(static_cast<Eigen::Index>(m));
  Eigen::VectorXd sd2(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) sd1(static_cast<Eigen::Index>(i)) = std::sqrt(static_cast<double>(graph.user_degree(i)));
  for (std::size_t j = 0; j < n; ++j) sd2(static_cast<Eigen::Index>(j)) = std::sqrt(static_cast<double>(graph.page_degree(j)));
  const Eigen::VectorXd u0 = sd1 / sd1.norm();
  const Eigen::VectorXd v0 = sd2 / sd2.norm();

  const SingularTriplets t = top_singular_triplets(an, r, u0, v0, 1.0, config.seed);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(m + n), static_cast<Eigen::Index>(r));
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    z.row(ii) = t.left.row(ii) / sd1(ii);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    z.row(static_cast<Eigen::Index>(m + j)) = t.right.row(jj) / sd2(jj);
  }
  const KMeansResult km =
      kmeans(z, config.k, config.kmeans_restarts, config.kmeans_max_iters, config.seed ^ 0x9e3779b97f4a7c15ULL);

  // Canonical numbering: order of first appearance over users, then pages,
  // each in id order.
  std::vector<std::size_t> user_order(m);
  std::vector<std::size_t> page_order(n);
  for (std::size_t i = 0; i < m; ++i) user_order[i] = i;
  for (std::size_t j = 0; j < n; ++j) page_order[j] = j;
  std::sort(user_order.begin(), user_order.end(),
            [&](std::size_t a, std::size_t b) { return graph.user_ids()[a] < graph.user_ids()[b]; });
  std::sort(page_order.begin(), page_order.end(),
            [&](std::size_t a, std::size_t b) { return graph.page_ids()[a] < graph.page_ids()[b]; });
  std::vector<std::size_t> relabel(config.k, config.k);
  std::size_t next = 0;
  for (std::size_t i : user_order) {
    std::size_t& c = relabel[km.assignment[i]];
    if (c == config.k) c = next++;
  }
  for (std::size_t j : page_order) {
    std::size_t& c = relabel[km.assignment[m + j]];
    if (c == config.k) c = next++;
  }
  for (std::size_t& c : relabel) {
    if (c == config.k) c = next++;
  }

  ClusterAssignment out;
  out.k = config.k;
  out.user_ids = graph.user_ids();
  out.page_ids = graph.page_ids();
  out.user_cluster.resize(m);
  out.page_cluster.resize(n);
  for (std::size_t i = 0; i < m; ++i) out.user_cluster[i] = relabel[km.assignment[i]];
  for (std::size_t j = 0; j < n; ++j) out.page_cluster[j] = relabel[km.assignment[m + j]];
  return out;
}

std::vector<LabelKind> label_clusters(const ClusterAssignment& assignment,
                                      const std::unordered_map<std::string, Label>& ground_truth) {
  std::vector<std::size_t> farm(assignment.k, 0);
  std::vector<std::size_t> baseline(assignment.k, 0);
  std::vector<std::size_t> members(assignment.k, 0);
  for (std::size_t i = 0; i < assignment.user_ids.size(); ++i) {
    const std::size_t c = assignment.user_cluster[i];
    ++members[c];
    const auto it = ground_truth.find(assignment.user_ids[i]);
    if (it == ground_truth.end()) continue;
    if (it->second.is_farm()) ++farm[c];
    if (it->second.is_baseline()) ++baseline[c];
  }
  std::vector<LabelKind> out(assignment.k, LabelKind::Unknown);
  for (std::size_t c = 0; c < assignment.k; ++c) {
    if (members[c] == 0) continue;
    if (farm[c] + baseline[c] == 0) {
      throw InvalidArgument("cluster " + std::to_string(c) + " has no labeled users");
    }
    out[c] = farm[c] >= baseline[c] ? LabelKind::Farm : LabelKind::Baseline;
  }
  return out;
}

}  // namespace likefarm
