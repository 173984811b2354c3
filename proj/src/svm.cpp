#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "design.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/error.hpp"
#include "likefarm/simd/kernels.hpp"
#include "parallel.hpp"

namespace likefarm {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void exp_kernel(std::span<const double> sq, double gamma, std::vector<double>& out) {
  out.resize(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::exp(-gamma * sq[i]);
}

double f1_of(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom ? 2.0 * static_cast<double>(tp) / static_cast<double>(denom) : 0.0;
}

}  // namespace

double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw InvalidArgument("rbf_kernel: vectors differ in length");
  if (!(gamma > 0.0)) throw InvalidArgument("rbf_kernel: gamma must be positive");
  return std::exp(-gamma * simd::squared_distance(x, y));
}

double max_feasible_nu(std::size_t n_positive, std::size_t n_negative) {
  const std::size_t l = n_positive + n_negative;
  if (l == 0) return 0.0;
  return 2.0 * static_cast<double>(std::min(n_positive, n_negative)) / static_cast<double>(l);
}

NuSvmSolution solve_nu_svm(std::span<const double> kernel, std::span<const int> y, double nu,
                           double tolerance, std::size_t max_iterations) {
  const std::size_t l = y.size();
  if (kernel.size() != l * l) throw InvalidArgument("kernel matrix does not match label count");
  std::size_t n_pos = 0;
  for (int v : y) {
    if (v != 1 && v != -1) throw InvalidArgument("labels must be +1 or -1");
    if (v == 1) ++n_pos;
  }
  const std::size_t n_neg = l - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("nu-SVM needs both classes");
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in (0, 1]");
  const double nu_max = max_feasible_nu(n_pos, n_neg);
  if (nu > nu_max * (1.0 + 1e-12)) {
    throw InvalidArgument("nu = " + format_double(nu) + " is infeasible; the upper bound for " +
                          std::to_string(n_pos) + " farm and " + std::to_string(n_neg) +
                          " baseline vectors is " + format_double(nu_max));
  }
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(1000000, 100 * l);

  NuSvmSolution sol;
  std::vector<double>& alpha = sol.alpha;
  alpha.assign(l, 0.0);
  double sum_pos = nu * static_cast<double>(l) / 2.0;
  double sum_neg = sum_pos;
  for (std::size_t i = 0; i < l; ++i) {
    double& budget = y[i] > 0 ? sum_pos : sum_neg;
    alpha[i] = std::min(1.0, budget);
    budget -= alpha[i];
  }

  // h_k = sum_j y_j a_j K_jk, so the gradient of the objective is y_k h_k.
  const auto& kern = simd::active();
  std::vector<double> h(l, 0.0);
  for (std::size_t j = 0; j < l; ++j) {
    if (alpha[j] != 0.0) kern.axpy(y[j] * alpha[j], kernel.data() + j * l, h.data(), l);
  }
  const auto K = [&](std::size_t i, std::size_t j) { return kernel[i * l + j]; };
  std::vector<double> diag(l);
  for (std::size_t t = 0; t < l; ++t) diag[t] = K(t, t);
  std::vector<double> g(l);

  // Selection scans only the active set; bound variables that cannot form
  // a violating pair are shrunk away. h stays exact for every variable, so
  // convergence is always confirmed on the full set.
  std::vector<std::size_t> active(l);
  std::iota(active.begin(), active.end(), 0);
  bool shrunk = false;
  const std::size_t shrink_every = std::min<std::size_t>(l, 1000);
  std::size_t countdown = shrink_every;

  std::size_t iter = 0;
  double violation = kInf;
  for (;;) {
    double gmax_p = -kInf;
    double gmax_n = -kInf;
    std::size_t ip = l;
    std::size_t in = l;
    for (std::size_t t : active) {
      g[t] = y[t] * h[t];
      if (y[t] > 0) {
        if (alpha[t] < 1.0 && -g[t] > gmax_p) {
          gmax_p = -g[t];
          ip = t;
        }
      } else if (alpha[t] > 0.0 && g[t] > gmax_n) {
        gmax_n = g[t];
        in = t;
      }
    }
    double gmax_p2 = -kInf;
    double gmax_n2 = -kInf;
    double best_obj = kInf;
    std::size_t jbest = l;
    const double* row_p = ip < l ? kernel.data() + ip * l : nullptr;
    const double* row_n = in < l ? kernel.data() + in * l : nullptr;
    for (std::size_t j : active) {
      if (y[j] > 0) {
        if (alpha[j] <= 0.0) continue;
        gmax_p2 = std::max(gmax_p2, g[j]);
        const double diff = gmax_p + g[j];
        if (ip == l || !(diff > 0.0)) continue;
        double quad = diag[ip] + diag[j] - 2.0 * row_p[j];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          jbest = j;
        }
      } else {
        if (alpha[j] >= 1.0) continue;
        gmax_n2 = std::max(gmax_n2, -g[j]);
        const double diff = gmax_n - g[j];
        if (in == l || !(diff > 0.0)) continue;
        double quad = diag[in] + diag[j] - 2.0 * row_n[j];
        if (quad <= 0.0) quad = kTau;
        const double obj = -(diff * diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          jbest = j;
        }
      }
    }
    violation = std::max(gmax_p + gmax_p2, gmax_n + gmax_n2);
    if (violation < tolerance || jbest == l) {
      if (!shrunk) break;
      active.resize(l);
      std::iota(active.begin(), active.end(), 0);
      shrunk = false;
      countdown = shrink_every;
      continue;
    }
    if (iter >= max_iterations) {
      throw NumericalError("nu-SVM did not converge after " + std::to_string(iter) +
                           " iterations (KKT gap " + format_double(violation) + ", tolerance " +
                           format_double(tolerance) + ")");
    }
    ++iter;

    if (--countdown == 0) {
      countdown = shrink_every;
      std::size_t kept = 0;
      for (std::size_t t : active) {
        bool drop = false;
        if (y[t] > 0) {
          if (alpha[t] >= 1.0) drop = g[t] + gmax_p < 0.0;
          else if (alpha[t] <= 0.0) drop = -g[t] + gmax_p2 < 0.0;
        } else {
          if (alpha[t] <= 0.0) drop = -g[t] + gmax_n < 0.0;
          else if (alpha[t] >= 1.0) drop = g[t] + gmax_n2 < 0.0;
        }
        if (!drop) active[kept++] = t;
      }
      if (kept < active.size()) {
        active.resize(kept);
        shrunk = true;
      }
    }

    const std::size_t i = y[jbest] > 0 ? ip : in;
    const std::size_t j = jbest;
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double quad = diag[i] + diag[j] - 2.0 * K(i, j);
    if (quad <= 0.0) quad = kTau;
    const double delta = (g[i] - g[j]) / quad;
    const double sum = old_i + old_j;
    double ai = old_i - delta;
    double aj = old_j + delta;
    if (sum > 1.0) {
      if (ai > 1.0) {
        ai = 1.0;
        aj = sum - 1.0;
      }
    } else if (aj < 0.0) {
      aj = 0.0;
      ai = sum;
    }
    if (sum > 1.0) {
      if (aj > 1.0) {
        aj = 1.0;
        ai = sum - 1.0;
      }
    } else if (ai < 0.0) {
      ai = 0.0;
      aj = sum;
    }
    alpha[i] = ai;
    alpha[j] = aj;
    kern.axpy(y[i] * (ai - old_i), kernel.data() + i * l, h.data(), l);
    kern.axpy(y[j] * (aj - old_j), kernel.data() + j * l, h.data(), l);
  }
  for (std::size_t t = 0; t < l; ++t) g[t] = y[t] * h[t];

  // Offsets from free variables of each class, bounds otherwise.
  double ub1 = kInf, lb1 = -kInf, sum1 = 0.0;
  double ub2 = kInf, lb2 = -kInf, sum2 = 0.0;
  std::size_t free1 = 0, free2 = 0;
  double objective = 0.0;
  for (std::size_t t = 0; t < l; ++t) {
    objective += 0.5 * alpha[t] * g[t];
    const bool upper = alpha[t] >= 1.0;
    const bool lower = alpha[t] <= 0.0;
    if (y[t] > 0) {
      if (upper) lb1 = std::max(lb1, g[t]);
      else if (lower) ub1 = std::min(ub1, g[t]);
      else { ++free1; sum1 += g[t]; }
    } else {
      if (upper) lb2 = std::max(lb2, g[t]);
      else if (lower) ub2 = std::min(ub2, g[t]);
      else { ++free2; sum2 += g[t]; }
    }
  }
  const double r1 = free1 ? sum1 / static_cast<double>(free1) : (ub1 + lb1) / 2.0;
  const double r2 = free2 ? sum2 / static_cast<double>(free2) : (ub2 + lb2) / 2.0;
  sol.r = (r1 + r2) / 2.0;
  sol.rho = (r1 - r2) / 2.0;
  sol.objective = objective;
  sol.iterations = iter;
  sol.violation = violation;
  return sol;
}

SvmModel train_svm(std::span<const FeatureVector> train, const SvmHyperParams& params,
                   const SvmOptions& options) {
  detail::check_both_classes(train);
  detail::check_features(options.features);
  if (!(params.gamma > 0.0)) throw InvalidArgument("gamma must be positive");

  SvmModel model;
  model.hyperparams = params;
  model.features = options.features;
  model.scaler = fit_scaler(train);
  model.training_size = train.size();

  const std::size_t l = train.size();
  const std::size_t dim = options.features.size();
  const std::vector<double> x = detail::scaled_rows(model.scaler, options.features, train);
  std::vector<double> k;
  exp_kernel(detail::pairwise_squared_distances(x, l, x, l, dim), params.gamma, k);
  std::vector<int> y(l);
  for (std::size_t i = 0; i < l; ++i) y[i] = detail::sign_of(train[i].label);

  const NuSvmSolution sol = solve_nu_svm(k, y, params.nu, options.tolerance, options.max_iterations);
  const double scale = 1.0 / static_cast<double>(l);
  for (std::size_t i = 0; i < l; ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    model.support_vectors.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(i * dim),
                                       x.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    model.dual_coefficients.push_back(y[i] * sol.alpha[i] * scale);
  }
  model.bias = -sol.rho * scale;
  return model;
}

double decision_value_scaled(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.features.size()) {
    throw InvalidArgument("vector has " + std::to_string(x.size()) + " features; model expects " +
                          std::to_string(model.features.size()));
  }
  const auto& kern = simd::active();
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    const double d = kern.squared_distance(model.support_vectors[i].data(), x.data(), x.size());
    f += model.dual_coefficients[i] * std::exp(-model.hyperparams.gamma * d);
  }
  return f;
}

double decision_value(const SvmModel& model, const FeatureVector& vector) {
  const std::vector<double> x = detail::scaled_row(model.scaler, model.features, vector);
  return decision_value_scaled(model, x);
}

LabelKind predict(const SvmModel& model, const FeatureVector& vector) {
  return decision_value(model, vector) >= 0.0 ? LabelKind::Farm : LabelKind::Baseline;
}

GridSpec default_grid(std::uint64_t seed) {
  GridSpec g;
  for (int e = -10; e <= 0; ++e) {
    g.gammas.push_back(std::ldexp(1.0, e));
    g.nus.push_back(std::ldexp(1.0, e));
  }
  g.seed = seed;
  return g;
}

std::vector<std::size_t> stratified_folds(std::span<const LabelKind> labels, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("need at least 2 folds");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out(labels.size(), 0);
  for (LabelKind cls : {LabelKind::Farm, LabelKind::Baseline}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t r = 0; r < idx.size(); ++r) out[idx[r]] = r % folds;
  }
  return out;
}

GridSearchResult grid_search(std::span<const FeatureVector> train, const GridSpec& grid,
                             const SvmOptions& options) {
  detail::check_both_classes(train);
  detail::check_features(options.features);
  if (grid.gammas.empty() || grid.nus.empty()) throw InvalidArgument("grid is empty");
  for (double g : grid.gammas) {
    if (!(g > 0.0)) throw InvalidArgument("grid gamma values must be positive");
  }
  for (double n : grid.nus) {
    if (!(n > 0.0 && n <= 1.0)) throw InvalidArgument("grid nu values must lie in (0, 1]");
  }

  const std::size_t n = train.size();
  std::vector<LabelKind> labels(n);
  std::size_t n_farm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = train[i].label.kind;
    if (labels[i] == LabelKind::Farm) ++n_farm;
  }
  if (std::min(n_farm, n - n_farm) < grid.folds) {
    throw InvalidArgument("each class needs at least " + std::to_string(grid.folds) +
                          " vectors for " + std::to_string(grid.folds) + "-fold cross-validation");
  }
  const std::vector<std::size_t> fold = stratified_folds(labels, grid.folds, grid.seed);

  const std::size_t ng = grid.gammas.size();
  const std::size_t nn = grid.nus.size();
  std::vector<double> f1_sum(ng * nn, 0.0);
  std::vector<bool> feasible(ng * nn, true);
  const std::size_t dim = options.features.size();

  for (std::size_t f = 0; f < grid.folds; ++f) {
    std::vector<FeatureVector> tr;
    std::vector<FeatureVector> te;
    for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? te : tr).push_back(train[i]);
    const Scaler scaler = fit_scaler(tr);
    const std::vector<double> xtr = detail::scaled_rows(scaler, options.features, tr);
    const std::vector<double> xte = detail::scaled_rows(scaler, options.features, te);
    const std::size_t ltr = tr.size();
    const std::size_t lte = te.size();
    const std::vector<double> dtr = detail::pairwise_squared_distances(xtr, ltr, xtr, ltr, dim);
    const std::vector<double> dte = detail::pairwise_squared_distances(xte, lte, xtr, ltr, dim);
    std::vector<int> ytr(ltr);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < ltr; ++i) {
      ytr[i] = detail::sign_of(tr[i].label);
      if (ytr[i] > 0) ++pos;
    }
    const double nu_max = max_feasible_nu(pos, ltr - pos);

    std::vector<double> ktr;
    std::vector<double> kte;
    for (std::size_t gi = 0; gi < ng; ++gi) {
      exp_kernel(dtr, grid.gammas[gi], ktr);
      exp_kernel(dte, grid.gammas[gi], kte);
      std::vector<std::size_t> todo;
      for (std::size_t ni = 0; ni < nn; ++ni) {
        const std::size_t cell = gi * nn + ni;
        if (!feasible[cell]) continue;
        if (grid.nus[ni] > nu_max * (1.0 + 1e-12)) {
          feasible[cell] = false;
          continue;
        }
        todo.push_back(ni);
      }
      std::vector<double> f1(nn, 0.0);
      auto evaluate = [&](std::size_t ni) {
        const NuSvmSolution sol =
            solve_nu_svm(ktr, ytr, grid.nus[ni], options.tolerance, options.max_iterations);
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t t = 0; t < lte; ++t) {
          double dec = -sol.rho;
          const double* row = kte.data() + t * ltr;
          for (std::size_t i = 0; i < ltr; ++i) {
            if (sol.alpha[i] > 0.0) dec += ytr[i] * sol.alpha[i] * row[i];
          }
          const bool farm = dec >= 0.0;
          const bool truth = te[t].label.is_farm();
          if (farm && truth) ++tp;
          else if (farm) ++fp;
          else if (truth) ++fn;
        }
        f1[ni] = f1_of(tp, fp, fn);
      };
      detail::run_parallel(todo, std::max<std::size_t>(1, grid.threads), evaluate);
      for (std::size_t ni : todo) f1_sum[gi * nn + ni] += f1[ni];
    }
  }

  GridSearchResult result;
  bool found = false;
  for (std::size_t gi = 0; gi < ng; ++gi) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const std::size_t cell = gi * nn + ni;
      GridPoint p;
      p.params = {grid.gammas[gi], grid.nus[ni]};
      p.feasible = feasible[cell];
      p.mean_f1 = p.feasible ? f1_sum[cell] / static_cast<double>(grid.folds) : 0.0;
      result.points.push_back(p);
    }
  }
  // Ascending order makes the first maximum the smallest (gamma, nu).
  std::vector<std::size_t> order(result.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = result.points[a].params;
    const auto& pb = result.points[b].params;
    return pa.gamma != pb.gamma ? pa.gamma < pb.gamma : pa.nu < pb.nu;
  });
  for (std::size_t idx : order) {
    const GridPoint& p = result.points[idx];
    if (!p.feasible) continue;
    if (!found || p.mean_f1 > result.best_f1) {
      result.best = p.params;
      result.best_f1 = p.mean_f1;
      found = true;
    }
  }
  if (!found) throw InvalidArgument("no feasible grid point");
  result.model = train_svm(train, result.best, options);
  return result;
}

}  // namespace likefarm
