#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include "likefarm/datamodel.hpp"

namespace likefarm {

/// Engagement features of a user's timeline, in canonical order.
struct NonLexicalFeatures {
  double avg_words_per_post = 0.0;  // over text-bearing posts, any language
  double avg_comments_per_post = 0.0;
  double avg_likes_per_post = 0.0;
  double share_fraction = 0.0;

  static constexpr std::size_t kCount = 4;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "avg_words_per_post", "avg_comments_per_post", "avg_likes_per_post", "share_fraction"};

  std::array<double, kCount> to_array() const {
    return {avg_words_per_post, avg_comments_per_post, avg_likes_per_post, share_fraction};
  }
  static NonLexicalFeatures from_array(const std::array<double, kCount>& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  bool operator==(const NonLexicalFeatures&) const = default;
};

NonLexicalFeatures nonlexical_profile(std::span<const Post> posts);

struct PostTypeHistogram {
  std::array<std::size_t, kAllPostKinds.size()> counts{};
  std::size_t total = 0;

  std::size_t count(PostKind kind) const { return counts[static_cast<std::size_t>(kind)]; }
  double fraction(PostKind kind) const {
    return total ? static_cast<double>(count(kind)) / static_cast<double>(total) : 0.0;
  }
  PostTypeHistogram& operator+=(const PostTypeHistogram& other);
  bool operator==(const PostTypeHistogram&) const = default;
};

PostTypeHistogram post_type_histogram(std::span<const Post> posts);

}  // namespace likefarm
