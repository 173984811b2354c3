#include <doctest.h>

#include <cmath>
#include <random>

#include "../common/qp_oracle.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/error.hpp"
#include "support.hpp"

using namespace likefarm;

namespace {

FeatureVector point(std::initializer_list<double> xs, bool farm, std::string user = "") {
  FeatureVector v;
  std::size_t d = 0;
  for (double x : xs) v.values[d++] = x;
  v.label = farm ? Label::farm("X") : Label::baseline();
  v.user = std::move(user);
  return v;
}

std::vector<std::size_t> first_dims(std::size_t n) {
  std::vector<std::size_t> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = i;
  return f;
}

// Two noisy classes in the first two dimensions.
std::vector<FeatureVector> blobs(std::size_t per_class, double sigma, double separation, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < per_class; ++i) {
    out.push_back(point({separation + noise(rng), separation + noise(rng)}, true, "f" + std::to_string(i)));
    out.push_back(point({-separation + noise(rng), -separation + noise(rng)}, false, "b" + std::to_string(i)));
  }
  return out;
}

double accuracy(const Model& m, const std::vector<FeatureVector>& data) {
  std::size_t ok = 0;
  for (const auto& v : data) ok += predict(m, v) == v.label.kind;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

SvmOptions two_dims(double tolerance = 1e-4) {
  SvmOptions o;
  o.features = first_dims(2);
  o.tolerance = tolerance;
  return o;
}

FeatureVector swapped(FeatureVector v) {
  v.label = v.label.is_farm() ? Label::baseline() : Label::farm("X");
  return v;
}

}  // namespace

TEST_CASE("rbf kernel") {
  const std::vector<double> a{0.0, 0.0}, b{1.0, 1.0};
  CHECK(rbf_kernel(a, a, 3.0) == 1.0);
  CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(rbf_kernel(a, std::vector<double>{1.0}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), InvalidArgument);
}

TEST_CASE("kernel matrices are positive semidefinite") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const test::TinyInstance inst = test::tiny_instance(seed);
    const Eigen::Index l = static_cast<Eigen::Index>(inst.y.size());
    Eigen::MatrixXd k = Eigen::Map<const Eigen::MatrixXd>(inst.kernel.data(), l, l);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    k.diagonal().array() += 1e-10;
    CHECK(Eigen::LLT<Eigen::MatrixXd>(k).info() == Eigen::Success);
  }
}

TEST_CASE("SMO matches the barrier QP oracle on tiny instances") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    CAPTURE(seed);
    const test::TinyInstance inst = test::tiny_instance(seed);
    const NuSvmSolution sol = solve_nu_svm(inst.kernel, inst.y, inst.nu);
    const Eigen::MatrixXd q = test::signed_kernel(inst.kernel, inst.y);
    const double oracle = test::qp_oracle(q, inst.y, inst.nu);
    CHECK(sol.objective >= oracle - 1e-6);
    CHECK(test::kkt_violation(q, inst.y, sol.alpha) < 1e-4);
    // The default stopping gap bounds KKT violations, not the objective;
    // a tighter stop pins the objective.
    const NuSvmSolution tight = solve_nu_svm(inst.kernel, inst.y, inst.nu, 1e-7);
    CHECK(std::abs(tight.objective - oracle) < 1e-6);
    CHECK(test::kkt_violation(q, inst.y, tight.alpha) < 1e-4);

    // Feasibility of the returned point.
    double sp = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < inst.y.size(); ++i) {
      CHECK(sol.alpha[i] >= 0.0);
      CHECK(sol.alpha[i] <= 1.0);
      (inst.y[i] > 0 ? sp : sn) += sol.alpha[i];
    }
    const double budget = inst.nu * static_cast<double>(inst.y.size()) / 2.0;
    CHECK(sp == doctest::Approx(budget));
    CHECK(sn == doctest::Approx(budget));
  }
}

TEST_CASE("solver input validation") {
  const std::vector<double> k{1.0, 0.5, 0.5, 1.0};
  CHECK_THROWS_AS(solve_nu_svm(k, std::vector<int>{1, 1}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(solve_nu_svm(k, std::vector<int>{1, 0}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(solve_nu_svm(k, std::vector<int>{1, -1, 1}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(solve_nu_svm(k, std::vector<int>{1, -1}, 0.0), InvalidArgument);
  CHECK(max_feasible_nu(1, 3) == 0.5);
}

TEST_CASE("infeasible nu names the bound") {
  std::vector<FeatureVector> train{point({0}, true), point({1}, false), point({2}, false), point({3}, false)};
  SvmOptions o;
  o.features = {0};
  try {
    train_svm(train, {1.0, 0.9}, o);
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("upper bound") != std::string::npos);
    CHECK(std::string(e.what()).find("0.5") != std::string::npos);
  }
}

TEST_CASE("separable points are fit exactly") {
  const std::vector<FeatureVector> train{point({1, 1}, true), point({2, 1}, true), point({-1, -1}, false),
                                         point({-2, -1}, false)};
  const SvmModel m = train_svm(train, {1.0, 0.5}, two_dims());
  for (const auto& v : train) CHECK(predict(m, v) == v.label.kind);
  CHECK(!m.support_vectors.empty());
  for (double c : m.dual_coefficients) CHECK(std::abs(c) <= 1.0 / 4.0 + 1e-15);
  CHECK_THROWS_AS(decision_value_scaled(m, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("zero vector on a symmetric model ties toward Farm") {
  const std::vector<FeatureVector> train{point({1}, true), point({-1}, false)};
  SvmOptions o;
  o.features = {0};
  const SvmModel m = train_svm(train, {1.0, 0.5}, o);
  CHECK(decision_value(m, point({0}, false)) == 0.0);
  CHECK(predict(m, point({0}, false)) == LabelKind::Farm);
}

TEST_CASE("swapping class labels negates decision values") {
  const auto data = blobs(15, 0.8, 0.5, 3);
  std::vector<FeatureVector> flipped;
  for (const auto& v : data) flipped.push_back(swapped(v));
  const SvmModel a = train_svm(data, {0.5, 0.4}, two_dims(1e-10));
  const SvmModel b = train_svm(flipped, {0.5, 0.4}, two_dims(1e-10));
  for (const auto& v : blobs(10, 1.0, 0.5, 99)) {
    CHECK(decision_value(a, v) == doctest::Approx(-decision_value(b, v)).epsilon(1e-6));
  }
}

TEST_CASE("duplicating the training set keeps the decision function") {
  const auto data = blobs(12, 0.8, 0.4, 5);
  std::vector<FeatureVector> twice = data;
  twice.insert(twice.end(), data.begin(), data.end());
  const SvmModel a = train_svm(data, {1.0, 0.3}, two_dims(1e-10));
  const SvmModel b = train_svm(twice, {1.0, 0.3}, two_dims(1e-10));
  for (const auto& v : blobs(10, 1.0, 0.4, 77)) {
    CHECK(std::abs(decision_value(a, v) - decision_value(b, v)) < 1e-6);
  }
}

TEST_CASE("grid search") {
  const auto data = blobs(20, 0.7, 0.6, 8);
  GridSpec one;
  one.gammas = {0.5};
  one.nus = {0.25};
  one.seed = 1;
  const GridSearchResult r1 = grid_search(data, one, two_dims());
  CHECK(r1.best == SvmHyperParams{0.5, 0.25});
  REQUIRE(r1.points.size() == 1);
  CHECK(r1.points[0].feasible);

  const GridSearchResult full = grid_search(data, default_grid(4), two_dims());
  CHECK(full.points.size() == 121);
  CHECK(full.best.gamma >= std::ldexp(1.0, -10));
  CHECK(full.best.gamma <= 1.0);
  CHECK(full.best.nu >= std::ldexp(1.0, -10));
  CHECK(full.best.nu <= 1.0);
  for (const auto& p : full.points) {
    if (p.feasible) CHECK(p.mean_f1 <= full.best_f1);
  }
  // The first maximal point in (gamma, nu) order wins.
  for (const auto& p : full.points) {
    if (p.params == full.best) break;
    CHECK(p.mean_f1 < full.best_f1);
  }

  GridSpec threaded = default_grid(4);
  threaded.threads = 3;
  const GridSearchResult again = grid_search(data, threaded, two_dims());
  CHECK(again.best == full.best);
  CHECK(again.best_f1 == full.best_f1);
  CHECK(again.model.dual_coefficients == full.model.dual_coefficients);

  GridSpec bad;
  bad.gammas = {1.0};
  bad.nus = {1.0};
  std::vector<FeatureVector> skewed;
  std::size_t farm = 0;
  for (const auto& v : data) {
    if (!v.label.is_farm() || ++farm <= 6) skewed.push_back(v);
  }
  CHECK_THROWS_AS(grid_search(skewed, bad, two_dims()), InvalidArgument);
}

TEST_CASE("stratified folds") {
  std::vector<LabelKind> labels(23, LabelKind::Baseline);
  for (int i = 0; i < 8; ++i) labels[i * 2] = LabelKind::Farm;
  const auto f = stratified_folds(labels, 5, 3);
  CHECK(f == stratified_folds(labels, 5, 3));
  for (std::size_t k = 0; k < 5; ++k) {
    std::size_t farm = 0, base = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (f[i] != k) continue;
      (labels[i] == LabelKind::Farm ? farm : base)++;
    }
    CHECK(farm >= 1);
    CHECK(farm <= 2);
    CHECK(base >= 3);
    CHECK(base <= 3);
  }
  CHECK_THROWS_AS(stratified_folds(labels, 1, 0), InvalidArgument);
}

TEST_CASE("baseline examples") {
  BaselineParams p;
  p.features = {0};
  std::vector<FeatureVector> line;
  for (int i = 0; i < 10; ++i) line.push_back(point({static_cast<double>(i)}, i >= 6));
  const Model tree = train_baseline(BaselineKind::DecisionTree, line, p);
  CHECK(accuracy(tree, line) == 1.0);

  p.neighbors = 1;
  const auto data = blobs(30, 1.0, 0.3, 12);
  p.features = first_dims(2);
  CHECK(accuracy(train_baseline(BaselineKind::KNN, data, p), data) == 1.0);

  CHECK_THROWS_AS(train_baseline(BaselineKind::NaiveBayes, std::vector<FeatureVector>(line.begin(), line.begin() + 5), p),
                  InvalidArgument);
  CHECK(parse_baseline_kind("forest") == BaselineKind::RandomForest);
  CHECK(to_string(BaselineKind::NaiveBayes) == "nb");
  CHECK_THROWS_AS(parse_baseline_kind("svm2"), InvalidArgument);
}

TEST_CASE("naive Bayes agrees with the Bayes-optimal rule on separated blobs") {
  BaselineParams p;
  p.features = first_dims(2);
  const Model nb = train_baseline(BaselineKind::NaiveBayes, blobs(500, 0.1, 1.0, 1), p);
  const auto test_set = blobs(500, 0.1, 1.0, 2);
  std::size_t agree = 0;
  for (const auto& v : test_set) {
    // Equal priors and covariances: the optimal boundary is x0 + x1 = 0.
    const LabelKind optimal = v.values[0] + v.values[1] >= 0.0 ? LabelKind::Farm : LabelKind::Baseline;
    agree += predict(nb, v) == optimal;
  }
  CHECK(static_cast<double>(agree) / 1000.0 >= 0.99);
  CHECK(accuracy(nb, test_set) >= 0.99);
}

TEST_CASE("AdaBoost training error does not increase with rounds") {
  // Diagonal boundary: single stumps are weak, their sum is not.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<FeatureVector> data;
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    data.push_back(point({a, b}, a + b > 0.0));
  }
  BaselineParams p;
  p.features = first_dims(2);
  double previous = 1.0;
  for (std::size_t rounds : {1, 5, 20, 50, 100}) {
    p.boosting_rounds = rounds;
    const double error = 1.0 - accuracy(train_baseline(BaselineKind::AdaBoost, data, p), data);
    CHECK(error <= previous + 1e-12);
    previous = error;
  }
  CHECK(previous < 0.1);
}

TEST_CASE("random forest is deterministic given its seed") {
  const auto data = blobs(40, 1.0, 0.3, 6);
  BaselineParams p;
  p.features = first_dims(2);
  p.trees = 15;
  p.seed = 9;
  const std::string a = model_to_json(train_baseline(BaselineKind::RandomForest, data, p));
  CHECK(a == model_to_json(train_baseline(BaselineKind::RandomForest, data, p)));
  p.seed = 10;
  CHECK(a != model_to_json(train_baseline(BaselineKind::RandomForest, data, p)));
}

TEST_CASE("models survive a save and load round trip") {
  const auto data = blobs(20, 0.8, 0.5, 10);
  const auto probe = blobs(20, 1.0, 0.5, 11);
  test::TempDir dir("models");
  std::vector<Model> models{train_svm(data, {0.5, 0.3}, two_dims())};
  BaselineParams p;
  p.features = first_dims(2);
  p.trees = 5;
  for (auto kind : {BaselineKind::DecisionTree, BaselineKind::AdaBoost, BaselineKind::KNN,
                    BaselineKind::RandomForest, BaselineKind::NaiveBayes}) {
    models.push_back(train_baseline(kind, data, p));
  }
  for (const Model& m : models) {
    const auto path = dir / (classifier_name(m) + ".json");
    save_model(m, path);
    const Model back = load_model(path);
    CHECK(classifier_name(back) == classifier_name(m));
    CHECK(model_to_json(back) == model_to_json(m));
    for (const auto& v : probe) CHECK(predict(back, v) == predict(m, v));
  }
  CHECK_THROWS_AS(model_from_json("{\"format_version\": 99}"), ParseError);
  CHECK_THROWS_AS(load_model(dir / "missing.json"), IoError);
}
