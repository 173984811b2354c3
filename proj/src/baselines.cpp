#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "design.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/error.hpp"
#include "likefarm/simd/kernels.hpp"

namespace likefarm {

namespace {

constexpr std::array<std::string_view, 5> kBaselineNames = {"tree", "adaboost", "knn", "forest", "nb"};

double gini(double w_farm, double w_total) {
  if (w_total <= 0.0) return 0.0;
  const double p = w_farm / w_total;
  return w_total * 2.0 * p * (1.0 - p);
}

LabelKind majority(double w_farm, double w_baseline) {
  return w_farm >= w_baseline ? LabelKind::Farm : LabelKind::Baseline;
}

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity = 0.0;
};

Split best_split(const std::vector<std::vector<double>>& x, std::span<const LabelKind> y,
                 std::span<const double> w, const std::vector<std::size_t>& rows,
                 const std::vector<std::size_t>& candidates) {
  Split best;
  double total = 0.0;
  double total_farm = 0.0;
  for (std::size_t r : rows) {
    total += w[r];
    if (y[r] == LabelKind::Farm) total_farm += w[r];
  }
  std::vector<std::size_t> sorted(rows);
  for (std::size_t f : candidates) {
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
    double left = 0.0;
    double left_farm = 0.0;
    for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
      const std::size_t r = sorted[k];
      left += w[r];
      if (y[r] == LabelKind::Farm) left_farm += w[r];
      const double a = x[r][f];
      const double b = x[sorted[k + 1]][f];
      if (!(a < b)) continue;
      const double imp = gini(left_farm, left) + gini(total_farm - left_farm, total - left);
      if (!best.found || imp < best.impurity) {
        double mid = a + (b - a) / 2.0;
        if (!(mid < b)) mid = a;
        best = {true, f, mid, imp};
      }
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(BaselineKind kind) { return kBaselineNames[static_cast<std::size_t>(kind)]; }

BaselineKind parse_baseline_kind(std::string_view name) {
  for (std::size_t i = 0; i < kBaselineNames.size(); ++i) {
    if (kBaselineNames[i] == name) return static_cast<BaselineKind>(i);
  }
  throw InvalidArgument("unknown classifier \"" + std::string(name) + "\"");
}

Tree fit_tree(const std::vector<std::vector<double>>& x, std::span<const LabelKind> y,
              std::span<const double> weights, std::size_t max_depth,
              std::size_t features_per_split, std::uint64_t seed) {
  if (x.empty() || x.size() != y.size() || x.size() != weights.size()) {
    throw InvalidArgument("fit_tree: rows, labels and weights must be non-empty and aligned");
  }
  const std::size_t dim = x.front().size();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(dim);
  std::iota(all.begin(), all.end(), 0);

  Tree tree;
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  std::vector<Pending> stack;
  std::vector<std::size_t> root(x.size());
  std::iota(root.begin(), root.end(), 0);
  tree.nodes.emplace_back();
  stack.push_back({0, std::move(root), 0});

  while (!stack.empty()) {
    Pending p = std::move(stack.back());
    stack.pop_back();
    double w_farm = 0.0;
    double w_base = 0.0;
    for (std::size_t r : p.rows) (y[r] == LabelKind::Farm ? w_farm : w_base) += weights[r];
    tree.nodes[p.node].label = majority(w_farm, w_base);
    const bool pure = w_farm <= 0.0 || w_base <= 0.0;
    if (pure || (max_depth > 0 && p.depth >= max_depth)) continue;

    Split split;
    if (features_per_split > 0 && features_per_split < dim) {
      std::vector<std::size_t> pool(all);
      for (std::size_t k = 0; k < features_per_split; ++k) {
        std::swap(pool[k], pool[std::uniform_int_distribution<std::size_t>(k, dim - 1)(rng)]);
      }
      std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(features_per_split));
      std::sort(chosen.begin(), chosen.end());
      split = best_split(x, y, weights, p.rows, chosen);
    }
    if (!split.found) split = best_split(x, y, weights, p.rows, all);
    if (!split.found) continue;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : p.rows) (x[r][split.feature] <= split.threshold ? left : right).push_back(r);
    const std::size_t l = tree.nodes.size();
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[p.node];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = l + 1;
    stack.push_back({l + 1, std::move(right), p.depth + 1});
    stack.push_back({l, std::move(left), p.depth + 1});
  }
  return tree;
}

LabelKind predict_tree(const Tree& tree, std::span<const double> x) {
  std::size_t n = 0;
  while (tree.nodes[n].feature >= 0) {
    const TreeNode& node = tree.nodes[n];
    n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[n].label;
}

BaselineModel train_baseline(BaselineKind kind, std::span<const FeatureVector> train,
                             const BaselineParams& params) {
  detail::check_both_classes(train);
  detail::check_features(params.features);
  BaselineModel model;
  model.kind = kind;
  model.params = params;
  model.scaler = fit_scaler(train);

  const std::size_t n = train.size();
  std::vector<std::vector<double>> x(n);
  std::vector<LabelKind> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = detail::scaled_row(model.scaler, params.features, train[i]);
    y[i] = train[i].label.kind;
  }

  switch (kind) {
    case BaselineKind::DecisionTree: {
      const std::vector<double> w(n, 1.0);
      model.trees.push_back(fit_tree(x, y, w, 0));
      break;
    }
    case BaselineKind::AdaBoost: {
      std::vector<double> w(n, 1.0 / static_cast<double>(n));
      for (std::size_t round = 0; round < params.boosting_rounds; ++round) {
        Tree stump = fit_tree(x, y, w, 1);
        double err = 0.0;
        std::vector<bool> wrong(n);
        for (std::size_t i = 0; i < n; ++i) {
          wrong[i] = predict_tree(stump, x[i]) != y[i];
          if (wrong[i]) err += w[i];
        }
        if (err >= 0.5) break;
        const double e = std::max(err, 1e-12);
        const double alpha = 0.5 * std::log((1.0 - e) / e);
        model.stumps.push_back({std::move(stump), alpha});
        if (err <= 1e-12) break;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          w[i] *= std::exp(wrong[i] ? alpha : -alpha);
          total += w[i];
        }
        for (double& v : w) v /= total;
      }
      break;
    }
    case BaselineKind::KNN:
      if (params.neighbors == 0) throw InvalidArgument("kNN needs at least one neighbor");
      model.points = std::move(x);
      model.point_labels = std::move(y);
      break;
    case BaselineKind::RandomForest: {
      if (params.trees == 0) throw InvalidArgument("random forest needs at least one tree");
      const std::size_t m = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(params.features.size())))));
      std::mt19937_64 seeder(params.seed);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t t = 0; t < params.trees; ++t) {
        std::mt19937_64 rng(seeder());
        std::vector<std::vector<double>> xb(n);
        std::vector<LabelKind> yb(n);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t r = pick(rng);
          xb[i] = x[r];
          yb[i] = y[r];
        }
        const std::vector<double> w(n, 1.0);
        model.trees.push_back(fit_tree(xb, yb, w, 0, m, rng()));
      }
      break;
    }
    case BaselineKind::NaiveBayes: {
      const std::size_t dim = params.features.size();
      for (LabelKind cls : {LabelKind::Farm, LabelKind::Baseline}) {
        GaussianClass& g = cls == LabelKind::Farm ? model.farm : model.baseline;
        g.mean.assign(dim, 0.0);
        g.variance.assign(dim, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (y[i] != cls) continue;
          ++count;
          for (std::size_t d = 0; d < dim; ++d) g.mean[d] += x[i][d];
        }
        for (double& m : g.mean) m /= static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) {
          if (y[i] != cls) continue;
          for (std::size_t d = 0; d < dim; ++d) {
            const double z = x[i][d] - g.mean[d];
            g.variance[d] += z * z;
          }
        }
        for (double& v : g.variance) v = std::max(v / static_cast<double>(count), params.variance_floor);
        g.log_prior = std::log(static_cast<double>(count) / static_cast<double>(n));
      }
      break;
    }
  }
  return model;
}

namespace {

double log_likelihood(const GaussianClass& g, std::span<const double> x) {
  constexpr double kLog2Pi = 1.8378770664093453;
  double s = g.log_prior;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double z = x[d] - g.mean[d];
    s -= 0.5 * (kLog2Pi + std::log(g.variance[d]) + z * z / g.variance[d]);
  }
  return s;
}

}  // namespace

LabelKind predict_baseline(const BaselineModel& model, const FeatureVector& vector) {
  const std::vector<double> x = detail::scaled_row(model.scaler, model.params.features, vector);
  switch (model.kind) {
    case BaselineKind::DecisionTree:
      return predict_tree(model.trees.front(), x);
    case BaselineKind::AdaBoost: {
      double score = 0.0;
      for (const WeightedStump& s : model.stumps) {
        score += predict_tree(s.stump, x) == LabelKind::Farm ? s.weight : -s.weight;
      }
      return score >= 0.0 ? LabelKind::Farm : LabelKind::Baseline;
    }
    case BaselineKind::KNN: {
      const std::size_t n = model.points.size();
      const auto& kern = simd::active();
      std::vector<std::pair<double, std::size_t>> d(n);
      for (std::size_t i = 0; i < n; ++i) {
        d[i] = {kern.squared_distance(model.points[i].data(), x.data(), x.size()), i};
      }
      const std::size_t k = std::min(model.params.neighbors, n);
      std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
      std::size_t farm = 0;
      for (std::size_t i = 0; i < k; ++i) {
        if (model.point_labels[d[i].second] == LabelKind::Farm) ++farm;
      }
      return 2 * farm >= k ? LabelKind::Farm : LabelKind::Baseline;
    }
    case BaselineKind::RandomForest: {
      std::size_t farm = 0;
      for (const Tree& t : model.trees) {
        if (predict_tree(t, x) == LabelKind::Farm) ++farm;
      }
      return 2 * farm >= model.trees.size() ? LabelKind::Farm : LabelKind::Baseline;
    }
    case BaselineKind::NaiveBayes:
      return log_likelihood(model.farm, x) >= log_likelihood(model.baseline, x) ? LabelKind::Farm
                                                                                : LabelKind::Baseline;
  }
  return LabelKind::Farm;
}

}  // namespace likefarm
