#include <fstream>
#include <sstream>

#include "jsonl.hpp"
#include "likefarm/classify.hpp"
#include "likefarm/error.hpp"

namespace likefarm {

namespace {

using detail::Json;

Json features_json(const std::vector<std::size_t>& features) {
  Json names = Json::array();
  for (std::size_t f : features) names.push_back(std::string(kFeatureNames[f]));
  return names;
}

std::vector<std::size_t> features_from(const Json& j) {
  std::vector<std::size_t> out;
  for (const Json& name : j) out.push_back(feature_index(name.get<std::string>()));
  return out;
}

Json scaler_json(const Scaler& s) {
  return Json{{"mean", std::vector<double>(s.mean().begin(), s.mean().end())},
              {"sd", std::vector<double>(s.sd().begin(), s.sd().end())}};
}

Scaler scaler_from(const Json& j) {
  const auto mean = detail::require(j, "mean").get<std::vector<double>>();
  const auto sd = detail::require(j, "sd").get<std::vector<double>>();
  if (mean.size() != kFeatureCount || sd.size() != kFeatureCount) {
    throw ParseError("scaler must have " + std::to_string(kFeatureCount) + " dimensions");
  }
  std::array<double, kFeatureCount> m{};
  std::array<double, kFeatureCount> s{};
  std::copy(mean.begin(), mean.end(), m.begin());
  std::copy(sd.begin(), sd.end(), s.begin());
  return Scaler(m, s);
}

int label_code(LabelKind k) { return k == LabelKind::Farm ? 1 : -1; }
LabelKind label_from(int code) { return code > 0 ? LabelKind::Farm : LabelKind::Baseline; }

Json tree_json(const Tree& t) {
  Json nodes = Json::array();
  for (const TreeNode& n : t.nodes) {
    nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, label_code(n.label)}));
  }
  return nodes;
}

Tree tree_from(const Json& j) {
  Tree t;
  for (const Json& n : j) {
    if (!n.is_array() || n.size() != 5) throw ParseError("tree node must have 5 fields");
    TreeNode node;
    node.feature = n[0].get<int>();
    node.threshold = n[1].get<double>();
    node.left = n[2].get<std::size_t>();
    node.right = n[3].get<std::size_t>();
    node.label = label_from(n[4].get<int>());
    t.nodes.push_back(node);
  }
  for (const TreeNode& n : t.nodes) {
    if (n.feature >= 0 && (n.left >= t.nodes.size() || n.right >= t.nodes.size())) {
      throw ParseError("tree node refers to a missing child");
    }
  }
  if (t.nodes.empty()) throw ParseError("tree has no nodes");
  return t;
}

Json gaussian_json(const GaussianClass& g) {
  return Json{{"log_prior", g.log_prior}, {"mean", g.mean}, {"variance", g.variance}};
}

GaussianClass gaussian_from(const Json& j) {
  GaussianClass g;
  g.log_prior = detail::require_number(j, "log_prior");
  g.mean = detail::require(j, "mean").get<std::vector<double>>();
  g.variance = detail::require(j, "variance").get<std::vector<double>>();
  return g;
}

Json svm_json(const SvmModel& m) {
  return Json{{"format", "likefarm-model"},
              {"format_version", kModelFormatVersion},
              {"classifier", "svm"},
              {"features", features_json(m.features)},
              {"scaler", scaler_json(m.scaler)},
              {"gamma", m.hyperparams.gamma},
              {"nu", m.hyperparams.nu},
              {"training_size", m.training_size},
              {"bias", m.bias},
              {"dual_coefficients", m.dual_coefficients},
              {"support_vectors", m.support_vectors}};
}

Json baseline_json(const BaselineModel& m) {
  const BaselineParams& p = m.params;
  Json j{{"format", "likefarm-model"},
         {"format_version", kModelFormatVersion},
         {"classifier", std::string(to_string(m.kind))},
         {"features", features_json(p.features)},
         {"scaler", scaler_json(m.scaler)},
         {"params",
          Json{{"boosting_rounds", p.boosting_rounds},
               {"neighbors", p.neighbors},
               {"trees", p.trees},
               {"variance_floor", p.variance_floor},
               {"seed", p.seed}}}};
  switch (m.kind) {
    case BaselineKind::DecisionTree:
    case BaselineKind::RandomForest: {
      Json trees = Json::array();
      for (const Tree& t : m.trees) trees.push_back(tree_json(t));
      j["trees"] = trees;
      break;
    }
    case BaselineKind::AdaBoost: {
      Json stumps = Json::array();
      for (const WeightedStump& s : m.stumps) stumps.push_back(Json{{"weight", s.weight}, {"nodes", tree_json(s.stump)}});
      j["stumps"] = stumps;
      break;
    }
    case BaselineKind::KNN: {
      std::vector<int> labels;
      for (LabelKind k : m.point_labels) labels.push_back(label_code(k));
      j["points"] = m.points;
      j["point_labels"] = labels;
      break;
    }
    case BaselineKind::NaiveBayes:
      j["farm"] = gaussian_json(m.farm);
      j["baseline"] = gaussian_json(m.baseline);
      break;
  }
  return j;
}

Model parse_model(const Json& j) {
  if (j.value("format", std::string{}) != "likefarm-model") throw ParseError("not a model file");
  const auto version = detail::require_int(j, "format_version");
  if (version != kModelFormatVersion) {
    throw ParseError("unsupported model format version " + std::to_string(version) + " (expected " +
                     std::to_string(kModelFormatVersion) + ")");
  }
  const std::string name = detail::require_string(j, "classifier");
  const auto features = features_from(detail::require(j, "features"));
  const Scaler scaler = scaler_from(detail::require(j, "scaler"));
  if (name == "svm") {
    SvmModel m;
    m.features = features;
    m.scaler = scaler;
    m.hyperparams = {detail::require_number(j, "gamma"), detail::require_number(j, "nu")};
    m.training_size = static_cast<std::size_t>(detail::require_int(j, "training_size"));
    m.bias = detail::require_number(j, "bias");
    m.dual_coefficients = detail::require(j, "dual_coefficients").get<std::vector<double>>();
    m.support_vectors = detail::require(j, "support_vectors").get<std::vector<std::vector<double>>>();
    if (m.dual_coefficients.size() != m.support_vectors.size()) {
      throw ParseError("support vector and coefficient counts differ");
    }
    for (const auto& sv : m.support_vectors) {
      if (sv.size() != m.features.size()) throw ParseError("support vector dimension mismatch");
    }
    return m;
  }
  BaselineModel m;
  m.kind = parse_baseline_kind(name);
  m.scaler = scaler;
  m.params.features = features;
  const Json& p = detail::require(j, "params");
  m.params.boosting_rounds = p.value("boosting_rounds", m.params.boosting_rounds);
  m.params.neighbors = p.value("neighbors", m.params.neighbors);
  m.params.trees = p.value("trees", m.params.trees);
  m.params.variance_floor = p.value("variance_floor", m.params.variance_floor);
  m.params.seed = p.value("seed", m.params.seed);
  switch (m.kind) {
    case BaselineKind::DecisionTree:
    case BaselineKind::RandomForest:
      for (const Json& t : detail::require(j, "trees")) m.trees.push_back(tree_from(t));
      if (m.trees.empty()) throw ParseError("model has no trees");
      break;
    case BaselineKind::AdaBoost:
      for (const Json& s : detail::require(j, "stumps")) {
        m.stumps.push_back({tree_from(detail::require(s, "nodes")), detail::require_number(s, "weight")});
      }
      break;
    case BaselineKind::KNN: {
      m.points = detail::require(j, "points").get<std::vector<std::vector<double>>>();
      for (int c : detail::require(j, "point_labels").get<std::vector<int>>()) m.point_labels.push_back(label_from(c));
      if (m.points.size() != m.point_labels.size() || m.points.empty()) {
        throw ParseError("kNN points and labels differ in count");
      }
      break;
    }
    case BaselineKind::NaiveBayes:
      m.farm = gaussian_from(detail::require(j, "farm"));
      m.baseline = gaussian_from(detail::require(j, "baseline"));
      break;
  }
  return m;
}

}  // namespace

std::string classifier_name(const Model& model) {
  if (const auto* b = std::get_if<BaselineModel>(&model)) return std::string(to_string(b->kind));
  return "svm";
}

LabelKind predict(const Model& model, const FeatureVector& vector) {
  if (const auto* s = std::get_if<SvmModel>(&model)) return predict(*s, vector);
  return predict_baseline(std::get<BaselineModel>(model), vector);
}

std::string model_to_json(const Model& model) {
  const Json j = std::holds_alternative<SvmModel>(model) ? svm_json(std::get<SvmModel>(model))
                                                         : baseline_json(std::get<BaselineModel>(model));
  return j.dump() + "\n";
}

Model model_from_json(std::string_view text) {
  try {
    return parse_model(Json::parse(text));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << model_to_json(model);
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return model_from_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace likefarm
