#include "likefarm/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jsonl.hpp"
#include "likefarm/error.hpp"

namespace likefarm {

std::size_t feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  throw InvalidArgument("unknown feature \"" + std::string(name) + "\"");
}

std::vector<std::size_t> all_feature_indices() {
  std::vector<std::size_t> idx(kFeatureCount);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<std::size_t> lexical_feature_indices() {
  std::vector<std::size_t> idx(kLexicalCount);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<std::size_t> nonlexical_feature_indices() {
  std::vector<std::size_t> idx(kFeatureCount - kLexicalCount);
  std::iota(idx.begin(), idx.end(), kLexicalCount);
  return idx;
}

FeatureVector assemble(const LexicalBlock& lexical, const NonLexicalBlock& nonlexical,
                       EnglishRatio ratio, Label label) {
  if (lexical.user != nonlexical.user) {
    throw InvalidArgument("feature blocks belong to different users (\"" + lexical.user +
                          "\" vs \"" + nonlexical.user + "\")");
  }
  if (!std::isfinite(ratio.r)) throw InvalidArgument("non-finite value in field english_ratio");
  FeatureVector v;
  v.user = lexical.user;
  v.label = std::move(label);
  v.english_ratio = ratio.r;
  const auto lex = lexical.features.to_array();
  const auto nonlex = nonlexical.features.to_array();
  for (std::size_t i = 0; i < lex.size(); ++i) {
    if (!std::isfinite(lex[i]))
      throw InvalidArgument("non-finite value in field " + std::string(kFeatureNames[i]));
    v.values[i] = ratio.r == 0.0 ? 0.0 : lex[i];
  }
  for (std::size_t i = 0; i < nonlex.size(); ++i) {
    const std::size_t dim = kLexicalCount + i;
    if (!std::isfinite(nonlex[i]))
      throw InvalidArgument("non-finite value in field " + std::string(kFeatureNames[dim]));
    v.values[dim] = nonlex[i];
  }
  return v;
}

std::vector<FeatureVector> extract_features(const Dataset& dataset) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.accounts().size());
  for (const Account& a : dataset.accounts()) {
    const auto posts = dataset.posts_of(a.id);
    out.push_back(assemble({a.id, lexical_profile(posts)}, {a.id, nonlexical_profile(posts)},
                           english_ratio(posts), a.label));
  }
  return out;
}

Scaler::Scaler(const std::array<double, kFeatureCount>& mean,
               const std::array<double, kFeatureCount>& sd)
    : mean_(mean), sd_(sd) {
  for (double& s : sd_) {
    if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  }
}

Scaler fit_scaler(std::span<const FeatureVector> train) {
  if (train.size() < 2) throw InvalidArgument("fit_scaler needs at least 2 training vectors");
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> sd{};
  const double n = static_cast<double>(train.size());
  for (const FeatureVector& v : train) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) mean[d] += v.values[d];
  }
  for (double& m : mean) m /= n;
  for (const FeatureVector& v : train) {
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      const double x = v.values[d] - mean[d];
      sd[d] += x * x;
    }
  }
  for (std::size_t d = 0; d < kFeatureCount; ++d) {
    sd[d] = std::sqrt(sd[d] / n);
    // Constant columns pass through unchanged. Comparing the raw values
    // avoids a round-off sd from a mean that is not exactly the constant.
    const bool constant = std::all_of(train.begin(), train.end(), [&](const FeatureVector& v) {
      return v.values[d] == train.front().values[d];
    });
    if (constant) {
      mean[d] = 0.0;
      sd[d] = 1.0;
    }
  }
  return Scaler(mean, sd);
}

FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& vector) {
  FeatureVector out = vector;
  for (std::size_t d = 0; d < kFeatureCount; ++d) out.values[d] = scaler.transform(d, vector.values[d]);
  return out;
}

void write_features(const std::vector<FeatureVector>& vectors, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  for (const FeatureVector& v : vectors) {
    detail::Json obj;
    obj["user"] = v.user;
    obj["label"] = v.label.to_string();
    obj["english_ratio"] = v.english_ratio;
    for (std::size_t d = 0; d < kFeatureCount; ++d) obj[std::string(kFeatureNames[d])] = v.values[d];
    out << obj.dump() << '\n';
  }
}

std::vector<FeatureVector> read_features(const std::filesystem::path& path) {
  std::vector<FeatureVector> out;
  detail::for_each_jsonl(path, [&](const detail::Json& obj, std::size_t) {
    FeatureVector v;
    v.user = detail::require_string(obj, "user");
    v.label = Label::parse(detail::require_string(obj, "label"));
    v.english_ratio = detail::require_number(obj, "english_ratio");
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
      v.values[d] = detail::require_number(obj, kFeatureNames[d]);
      if (!std::isfinite(v.values[d]))
        throw InvalidArgument("non-finite value in field " + std::string(kFeatureNames[d]));
    }
    out.push_back(std::move(v));
  });
  return out;
}

}  // namespace likefarm
