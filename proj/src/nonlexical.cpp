#include "likefarm/nonlexical.hpp"

#include "likefarm/lexical.hpp"

namespace likefarm {

NonLexicalFeatures nonlexical_profile(std::span<const Post> posts) {
  NonLexicalFeatures f;
  if (posts.empty()) return f;
  std::size_t text_posts = 0;
  std::size_t words = 0;
  double comments = 0.0;
  double likes = 0.0;
  std::size_t shared = 0;
  for (const Post& p : posts) {
    if (has_text(p)) {
      ++text_posts;
      words += tokenize(p.text).words.size();
    }
    comments += static_cast<double>(p.n_comments);
    likes += static_cast<double>(p.n_likes);
    if (p.is_shared) ++shared;
  }
  const double n = static_cast<double>(posts.size());
  f.avg_words_per_post = text_posts ? static_cast<double>(words) / static_cast<double>(text_posts) : 0.0;
  f.avg_comments_per_post = comments / n;
  f.avg_likes_per_post = likes / n;
  f.share_fraction = static_cast<double>(shared) / n;
  return f;
}

PostTypeHistogram& PostTypeHistogram::operator+=(const PostTypeHistogram& other) {
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total += other.total;
  return *this;
}

PostTypeHistogram post_type_histogram(std::span<const Post> posts) {
  PostTypeHistogram h;
  for (const Post& p : posts) ++h.counts[static_cast<std::size_t>(p.kind)];
  h.total = posts.size();
  return h;
}

}  // namespace likefarm
