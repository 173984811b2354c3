#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "likefarm/datamodel.hpp"

namespace likefarm {

/// Non-negative integer distribution. Dispersion 0 gives the rounded mean
/// every time; otherwise a gamma-Poisson (negative binomial) draw with
/// variance mean + dispersion * mean^2.
struct CountDistribution {
  double mean = 0.0;
  double dispersion = 0.0;

  bool operator==(const CountDistribution&) const = default;
};

struct LexicalGenParams {
  std::size_t vocabulary_size = 5000;
  double mean_words_per_post = 12.0;
  double mean_word_length = 5.0;       // characters per word token
  double mean_sentence_length = 12.0;  // words per sentence
  double english_fraction = 1.0;
  /// Per-user English propensity is Beta distributed around
  /// english_fraction with this concentration; 0 means every user posts
  /// English with probability english_fraction.
  double english_concentration = 0.0;
  /// Syllables per English word token (drives the Flesch score).
  double mean_syllables_per_word = 1.5;

  bool operator==(const LexicalGenParams&) const = default;
};

struct EngagementParams {
  double comments_per_post = 1.0;
  double likes_per_post = 2.0;
  double share_fraction = 0.2;
  double dispersion = 1.0;
  /// Probability that a post which is not shared is a text post.
  double text_fraction = 0.72;

  bool operator==(const EngagementParams&) const = default;
};

struct BehaviorProfile {
  Label label;
  std::size_t n_users = 0;
  /// Likes besides the target pages.
  CountDistribution likes_per_user{20.0, 0.0};
  /// Page indices every member likes.
  std::vector<std::size_t> target_pages;
  /// Share of non-target likes drawn by page popularity instead of
  /// uniformly.
  double popular_page_affinity = 0.5;
  /// Seconds over which one account's likes are spread.
  std::int64_t like_time_spread = 86400;
  CountDistribution posts_per_user{20.0, 0.5};
  LexicalGenParams lexical;
  EngagementParams engagement;
  /// Coefficient of variation of per-user rate multipliers (words per
  /// post, engagement, page affinity). 0 makes members identical in law.
  double heterogeneity = 0.0;

  bool operator==(const BehaviorProfile&) const = default;
};

struct GenConfig {
  std::vector<BehaviorProfile> profiles;
  std::size_t n_pages = 1000;
  double zipf_exponent = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const GenConfig&) const = default;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const GenConfig& config);

/// Deterministic in (config, config.seed). Accounts are numbered across
/// profiles in order ("u000000", ...), pages "p000000" ... with page 0 the
/// most popular.
Dataset generate(const GenConfig& config);

/// One baseline profile and six farm profiles modelled on the measured
/// campaigns (BL-USA stealthy, AL-USA naive).
GenConfig default_paper_calibration();

/// JSON form mirrors the structs field for field. Optional fields fall
/// back to the defaults above.
std::string to_json(const GenConfig& config);
GenConfig gen_config_from_json(std::string_view text);
GenConfig load_gen_config(const std::filesystem::path& path);

}  // namespace likefarm
