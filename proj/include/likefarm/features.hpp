#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "likefarm/datamodel.hpp"
#include "likefarm/lexical.hpp"
#include "likefarm/nonlexical.hpp"

namespace likefarm {

inline constexpr std::size_t kFeatureCount = LexicalFeatures::kCount + NonLexicalFeatures::kCount;
inline constexpr std::size_t kLexicalCount = LexicalFeatures::kCount;

/// Canonical order: the twelve lexical features, then the four engagement
/// features. Frozen; model files and feature curves refer to these indices.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "n_chars",         "n_words",       "n_sentences",       "avg_word_length",
    "avg_sentence_length", "avg_uppercase", "pct_punctuation", "pct_numbers",
    "pct_non_letters", "richness",      "ari",               "flesch",
    "avg_words_per_post", "avg_comments_per_post", "avg_likes_per_post", "share_fraction"};

/// Index of a canonical feature name; throws InvalidArgument if unknown.
std::size_t feature_index(std::string_view name);

/// Column subsets used by the experiments.
std::vector<std::size_t> all_feature_indices();
std::vector<std::size_t> lexical_feature_indices();
std::vector<std::size_t> nonlexical_feature_indices();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::string user;
  Label label;
  double english_ratio = 0.0;

  bool operator==(const FeatureVector&) const = default;
};

struct LexicalBlock {
  std::string user;
  LexicalFeatures features;
};

struct NonLexicalBlock {
  std::string user;
  NonLexicalFeatures features;
};

/// Concatenates both blocks. Users without English posts (ratio 0) get
/// zeros in all lexical slots. Throws InvalidArgument on mismatched users
/// or non-finite inputs (naming the offending field).
FeatureVector assemble(const LexicalBlock& lexical, const NonLexicalBlock& nonlexical,
                       EnglishRatio ratio, Label label = {});

/// One vector per account, in account order.
std::vector<FeatureVector> extract_features(const Dataset& dataset);

/// Per-dimension standardisation fitted on training vectors.
class Scaler {
 public:
  Scaler() { sd_.fill(1.0); }
  Scaler(const std::array<double, kFeatureCount>& mean, const std::array<double, kFeatureCount>& sd);

  const std::array<double, kFeatureCount>& mean() const { return mean_; }
  const std::array<double, kFeatureCount>& sd() const { return sd_; }

  double transform(std::size_t dim, double value) const { return (value - mean_[dim]) / sd_[dim]; }
  double inverse(std::size_t dim, double value) const { return value * sd_[dim] + mean_[dim]; }

  bool operator==(const Scaler&) const = default;

 private:
  std::array<double, kFeatureCount> mean_{};
  std::array<double, kFeatureCount> sd_{};
};

/// Population mean and standard deviation. Constant features get mean 0
/// and deviation 1, so they pass through unchanged. Needs at least two
/// vectors.
Scaler fit_scaler(std::span<const FeatureVector> train);
FeatureVector apply_scaler(const Scaler& scaler, const FeatureVector& vector);

/// features.jsonl: one object per user with "user", "label",
/// "english_ratio" and the sixteen named feature fields.
void write_features(const std::vector<FeatureVector>& vectors, const std::filesystem::path& path);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

}  // namespace likefarm
