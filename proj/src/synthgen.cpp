#include "likefarm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "jsonl.hpp"
#include "likefarm/error.hpp"
#include "likefarm/lexical.hpp"
#include "unicode.hpp"

namespace likefarm {

namespace {

using Rng = std::mt19937_64;

constexpr std::int64_t kEpoch = 1420070400;  // 2015-01-01T00:00:00Z
constexpr std::int64_t kPostWindow = 365 * 86400;
constexpr std::int64_t kLikeHorizon = 2 * 365 * 86400;

// Share of stopword tokens in English posts, and the floor enforced per
// post so every English post passes the language detector.
constexpr double kStopwordShare = 0.35;
constexpr double kStopwordFloor = 0.2;
constexpr double kContentZipf = 0.75;
constexpr std::size_t kMinContentLength = 3;
constexpr std::size_t kMaxContentLength = 16;

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

std::int64_t draw_count(const CountDistribution& d, double scale, Rng& rng) {
  const double mean = d.mean * scale;
  if (mean <= 0.0) return 0;
  if (d.dispersion <= 0.0) return std::llround(mean);
  const double shape = 1.0 / d.dispersion;
  const double lambda = std::gamma_distribution<double>(shape, mean / shape)(rng);
  if (lambda <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(lambda)(rng);
}

// Mean-one gamma multiplier with coefficient of variation h.
double multiplier(double h, Rng& rng) {
  if (h <= 0.0) return 1.0;
  const double shape = 1.0 / (h * h);
  return std::gamma_distribution<double>(shape, 1.0 / shape)(rng);
}

double beta_around(double mean, double concentration, Rng& rng) {
  if (concentration <= 0.0 || mean <= 0.0 || mean >= 1.0) return mean;
  const double x = std::gamma_distribution<double>(mean * concentration, 1.0)(rng);
  const double y = std::gamma_distribution<double>((1.0 - mean) * concentration, 1.0)(rng);
  return x + y > 0.0 ? x / (x + y) : mean;
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
    total += w[r];
  }
  for (double& x : w) x /= total;
  return w;
}

std::size_t code_point_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) detail::next_code_point(s, pos);
  return n;
}

// Nudges integer values one step at a time (in `order`) until the weighted
// mean is as close to `target` as single steps allow.
void fit_weighted_mean(std::vector<int>& values, const std::vector<double>& weights, double target,
                       const std::vector<int>& lo, const std::vector<int>& hi,
                       const std::vector<std::size_t>& order) {
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
  for (int pass = 0; pass < 64; ++pass) {
    bool moved = false;
    for (std::size_t j : order) {
      const double diff = target - mean;
      if (diff > 0.0 && values[j] < hi[j] && weights[j] < 2.0 * diff) {
        ++values[j];
        mean += weights[j];
        moved = true;
      } else if (diff < 0.0 && values[j] > lo[j] && weights[j] < -2.0 * diff) {
        --values[j];
        mean -= weights[j];
        moved = true;
      }
    }
    if (!moved) break;
  }
}

constexpr std::string_view kVowels = "aiou";
constexpr std::string_view kConsonants = "bcdfghjklmnprstvwz";

// Word of `length` letters with exactly `syllables` single-vowel groups.
std::string make_word(int length, int syllables, Rng& rng) {
  const int consonants = length - syllables;
  std::vector<int> slots(static_cast<std::size_t>(syllables) + 1, 0);
  for (int s = 1; s < syllables; ++s) slots[static_cast<std::size_t>(s)] = 1;
  for (int extra = consonants - (syllables - 1); extra > 0; --extra) {
    slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)]++;
  }
  std::uniform_int_distribution<std::size_t> pick_c(0, kConsonants.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_v(0, kVowels.size() - 1);
  std::string w;
  for (int s = 0; s <= syllables; ++s) {
    for (int c = 0; c < slots[static_cast<std::size_t>(s)]; ++c) w += kConsonants[pick_c(rng)];
    if (s < syllables) w += kVowels[pick_v(rng)];
  }
  return w;
}

struct Vocabulary {
  std::vector<std::string> words;
  std::discrete_distribution<std::size_t> dist;

  const std::string& sample(Rng& rng) { return words[dist(rng)]; }
};

struct StopwordModel {
  std::vector<std::string> words;
  std::discrete_distribution<std::size_t> dist;
  double mean_length = 0.0;
  double mean_syllables = 0.0;
};

StopwordModel make_stopword_model() {
  StopwordModel m;
  const auto list = english_stopwords();
  const auto w = zipf_weights(list.size(), 1.0);
  for (std::size_t i = 0; i < list.size(); ++i) {
    m.words.emplace_back(list[i]);
    m.mean_length += w[i] * static_cast<double>(code_point_length(list[i]));
    m.mean_syllables += w[i] * static_cast<double>(count_syllables(list[i]));
  }
  m.dist = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  return m;
}

std::size_t words_in_post(double mean, Rng& rng) {
  if (mean <= 1.0) return 1;
  return 1 + static_cast<std::size_t>(draw_count({mean - 1.0, 0.3}, 1.0, rng));
}

std::size_t stopword_floor(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(kStopwordFloor * static_cast<double>(n)));
}

// Token share of stopwords once the per-post floor is applied, estimated on
// a private stream so the main stream is untouched.
double effective_stopword_share(double mean_words) {
  Rng rng(0x5eed);
  double stops = 0.0;
  double words = 0.0;
  for (int i = 0; i < 4000; ++i) {
    const std::size_t n = words_in_post(mean_words, rng);
    const std::size_t k = std::binomial_distribution<std::size_t>(n, kStopwordShare)(rng);
    stops += static_cast<double>(std::max(k, stopword_floor(n)));
    words += static_cast<double>(n);
  }
  return stops / words;
}

Vocabulary english_vocabulary(const LexicalGenParams& p, const StopwordModel& stop,
                              const std::string& who, Rng& rng) {
  const double q = effective_stopword_share(p.mean_words_per_post);
  const double len_target = (p.mean_word_length - q * stop.mean_length) / (1.0 - q);
  const double syl_target = (p.mean_syllables_per_word - q * stop.mean_syllables) / (1.0 - q);
  if (len_target < kMinContentLength || len_target > kMaxContentLength) {
    throw ConfigError(who + ": mean_word_length " + std::to_string(p.mean_word_length) +
                      " is not attainable");
  }
  if (syl_target < 1.0 || syl_target > (len_target + 1.0) / 2.0) {
    throw ConfigError(who + ": mean_syllables_per_word " +
                      std::to_string(p.mean_syllables_per_word) +
                      " is not attainable with mean_word_length " +
                      std::to_string(p.mean_word_length));
  }

  const std::size_t n = p.vocabulary_size;
  const auto weights = zipf_weights(n, kContentZipf);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::normal_distribution<double> len_noise(len_target, 2.0);
  std::vector<int> length(n);
  std::vector<int> len_lo(n, static_cast<int>(kMinContentLength));
  std::vector<int> len_hi(n, static_cast<int>(kMaxContentLength));
  for (int& l : length) {
    l = std::clamp(static_cast<int>(std::lround(len_noise(rng))), len_lo[0], len_hi[0]);
  }
  fit_weighted_mean(length, weights, len_target, len_lo, len_hi, order);

  std::normal_distribution<double> syl_noise(syl_target, 0.6);
  std::vector<int> syllables(n);
  std::vector<int> syl_lo(n, 1);
  std::vector<int> syl_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    syl_hi[i] = (length[i] + 1) / 2;
    syllables[i] = std::clamp(static_cast<int>(std::lround(syl_noise(rng))), 1, syl_hi[i]);
  }
  fit_weighted_mean(syllables, weights, syl_target, syl_lo, syl_hi, order);

  Vocabulary v;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    std::string w;
    for (int attempt = 0;; ++attempt) {
      w = make_word(length[i], syllables[i], rng);
      if (!seen.contains(w) && !is_english_stopword(w)) break;
      if (attempt > 200) {
        // Short shapes can run out of combinations; lengthen the coda.
        w += kConsonants[static_cast<std::size_t>(attempt) % kConsonants.size()];
        if (!seen.contains(w) && !is_english_stopword(w)) break;
      }
    }
    seen.insert(w);
    v.words.push_back(std::move(w));
  }
  v.dist = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  return v;
}

Vocabulary foreign_vocabulary(std::size_t n, Rng& rng) {
  Vocabulary v;
  std::unordered_set<std::string> seen;
  std::uniform_int_distribution<int> len(2, 9);
  std::uniform_int_distribution<char32_t> letter(0x0430, 0x044F);
  while (v.words.size() < n) {
    std::string w;
    const int l = len(rng);
    for (int i = 0; i < l; ++i) detail::append_utf8(w, letter(rng));
    if (seen.insert(w).second) v.words.push_back(std::move(w));
  }
  const auto weights = zipf_weights(n, kContentZipf);
  v.dist = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
  return v;
}

struct UserStyle {
  double english = 1.0;
  double words_per_post = 1.0;
  double comments = 1.0;
  double likes = 1.0;
  double share = 0.0;
  double affinity = 0.0;
};

void capitalize(std::string& word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 'a' + 'A');
}

std::string english_post(const LexicalGenParams& p, StopwordModel& stop, Vocabulary& vocab,
                         double mean_words, Rng& rng) {
  const std::size_t n = words_in_post(mean_words, rng);
  std::vector<std::string> tokens(n);
  std::vector<bool> is_stop(n);
  std::size_t stops = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bernoulli(rng, kStopwordShare)) {
      tokens[i] = stop.words[stop.dist(rng)];
      is_stop[i] = true;
      ++stops;
    } else {
      tokens[i] = vocab.sample(rng);
    }
  }
  while (stops < stopword_floor(n)) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    if (is_stop[i]) continue;
    tokens[i] = stop.words[stop.dist(rng)];
    is_stop[i] = true;
    ++stops;
  }

  const std::size_t sentences = std::clamp<std::size_t>(
      static_cast<std::size_t>(static_cast<double>(n) / p.mean_sentence_length), 1, n);
  std::string text;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t end = (s + 1) * n / sentences;
    for (std::size_t i = begin; i < end; ++i) {
      std::string w = tokens[i];
      if (w == "i") w = "I";
      if (i == begin) capitalize(w);
      if (!text.empty()) text += ' ';
      text += w;
      if (i + 1 < end && bernoulli(rng, 0.06)) text += ',';
    }
    const double r = uniform01(rng);
    text += r < 0.8 ? '.' : (r < 0.92 ? '!' : '?');
    begin = end;
  }
  if (bernoulli(rng, 0.05)) text += " " + std::to_string(std::uniform_int_distribution<int>(10, 99)(rng));
  if (bernoulli(rng, 0.1)) text += " :)";
  return text;
}

std::string foreign_post(Vocabulary& vocab, double mean_words, Rng& rng) {
  const std::size_t n = words_in_post(mean_words, rng);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) text += ' ';
    text += vocab.sample(rng);
  }
  text += '.';
  return text;
}

// Non-text unshared posts split 3:4 between photos and other activity.
PostKind draw_kind(bool shared, double text_fraction, Rng& rng) {
  const double r = uniform01(rng);
  if (shared) return r < 0.5 ? PostKind::Shared : (r < 0.8 ? PostKind::Link : PostKind::Video);
  if (r < text_fraction) return PostKind::Text;
  return r < text_fraction + (1.0 - text_fraction) * 3.0 / 7.0 ? PostKind::Photo : PostKind::Other;
}

std::string numbered(char prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06zu", prefix, i);
  return buf;
}

void check_fraction(double v, const std::string& field) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field + " must lie in [0,1]");
}

void check_non_negative(double v, const std::string& field) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(field + " must be non-negative");
}

void check_positive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field + " must be positive");
}

}  // namespace

void validate(const GenConfig& config) {
  if (config.profiles.empty()) throw ConfigError("config needs at least one profile");
  if (config.n_pages == 0) throw ConfigError("n_pages must be positive");
  check_positive(config.zipf_exponent, "zipf_exponent");
  for (std::size_t i = 0; i < config.profiles.size(); ++i) {
    const BehaviorProfile& p = config.profiles[i];
    const std::string who = "profile " + std::to_string(i) + " (" + p.label.to_string() + ")";
    if (!p.label.is_known()) throw ConfigError(who + ": label must be baseline or farm:<campaign>");
    check_non_negative(p.likes_per_user.mean, who + ": likes_per_user.mean");
    check_non_negative(p.likes_per_user.dispersion, who + ": likes_per_user.dispersion");
    check_non_negative(p.posts_per_user.mean, who + ": posts_per_user.mean");
    check_non_negative(p.posts_per_user.dispersion, who + ": posts_per_user.dispersion");
    check_fraction(p.popular_page_affinity, who + ": popular_page_affinity");
    if (p.like_time_spread <= 0) throw ConfigError(who + ": like_time_spread must be positive");
    check_non_negative(p.heterogeneity, who + ": heterogeneity");
    const LexicalGenParams& lx = p.lexical;
    if (lx.vocabulary_size == 0) throw ConfigError(who + ": vocabulary_size must be at least 1");
    check_positive(lx.mean_words_per_post, who + ": mean_words_per_post");
    check_positive(lx.mean_word_length, who + ": mean_word_length");
    check_positive(lx.mean_sentence_length, who + ": mean_sentence_length");
    check_positive(lx.mean_syllables_per_word, who + ": mean_syllables_per_word");
    check_fraction(lx.english_fraction, who + ": english_fraction");
    check_non_negative(lx.english_concentration, who + ": english_concentration");
    const EngagementParams& e = p.engagement;
    check_non_negative(e.comments_per_post, who + ": comments_per_post");
    check_non_negative(e.likes_per_post, who + ": likes_per_post");
    check_fraction(e.share_fraction, who + ": share_fraction");
    check_fraction(e.text_fraction, who + ": text_fraction");
    check_non_negative(e.dispersion, who + ": engagement dispersion");

    std::unordered_set<std::size_t> targets;
    for (std::size_t t : p.target_pages) {
      if (t >= config.n_pages) {
        throw ConfigError(who + ": target page " + std::to_string(t) + " outside n_pages " +
                          std::to_string(config.n_pages));
      }
      if (!targets.insert(t).second) throw ConfigError(who + ": duplicate target page " + std::to_string(t));
    }
    if (p.likes_per_user.mean + static_cast<double>(targets.size()) > static_cast<double>(config.n_pages)) {
      throw ConfigError(who + ": likes_per_user mean " + std::to_string(p.likes_per_user.mean) +
                        " plus target pages exceeds n_pages " + std::to_string(config.n_pages));
    }
  }
}

Dataset generate(const GenConfig& config) {
  validate(config);
  Rng rng(config.seed);

  const std::size_t n_pages = config.n_pages;
  std::vector<Page> pages(n_pages);
  for (std::size_t r = 0; r < n_pages; ++r) {
    pages[r].id = numbered('p', r);
    pages[r].popularity =
        std::llround(1e6 / std::pow(static_cast<double>(r + 1), config.zipf_exponent));
  }
  const auto page_weights = zipf_weights(n_pages, config.zipf_exponent);
  std::discrete_distribution<std::size_t> popular(page_weights.begin(), page_weights.end());
  std::uniform_int_distribution<std::size_t> any_page(0, n_pages - 1);

  std::vector<Account> accounts;
  std::vector<Post> posts;
  std::vector<LikeEvent> likes;
  std::vector<std::uint8_t> liked(n_pages, 0);
  std::size_t next_user = 0;
  StopwordModel stop = make_stopword_model();

  for (std::size_t pi = 0; pi < config.profiles.size(); ++pi) {
    const BehaviorProfile& prof = config.profiles[pi];
    const std::string who = "profile " + std::to_string(pi) + " (" + prof.label.to_string() + ")";
    Vocabulary english = english_vocabulary(prof.lexical, stop, who, rng);
    Vocabulary foreign = foreign_vocabulary(prof.lexical.vocabulary_size, rng);
    const double h = prof.heterogeneity;
    const double affinity_concentration = h > 0.0 ? 1.0 / (h * h) : 0.0;

    for (std::size_t u = 0; u < prof.n_users; ++u) {
      const std::string id = numbered('u', next_user++);
      accounts.push_back({id, prof.label, std::nullopt});

      UserStyle style;
      style.english = beta_around(prof.lexical.english_fraction, prof.lexical.english_concentration, rng);
      style.words_per_post = prof.lexical.mean_words_per_post * multiplier(h, rng);
      style.comments = multiplier(h, rng);
      style.likes = multiplier(h, rng);
      style.share = std::clamp(prof.engagement.share_fraction * multiplier(h, rng), 0.0, 1.0);
      style.affinity = beta_around(prof.popular_page_affinity, affinity_concentration, rng);

      // Timeline.
      const std::int64_t n_posts = draw_count(prof.posts_per_user, 1.0, rng);
      std::vector<std::int64_t> times(static_cast<std::size_t>(n_posts));
      std::uniform_int_distribution<std::int64_t> post_time(kEpoch - kPostWindow, kEpoch);
      for (auto& t : times) t = post_time(rng);
      std::sort(times.begin(), times.end());
      for (std::int64_t k = 0; k < n_posts; ++k) {
        Post post;
        post.author = id;
        post.is_shared = bernoulli(rng, style.share);
        post.kind = draw_kind(post.is_shared, prof.engagement.text_fraction, rng);
        if (post.kind == PostKind::Text || bernoulli(rng, 0.5)) {
          post.text = bernoulli(rng, style.english)
                          ? english_post(prof.lexical, stop, english, style.words_per_post, rng)
                          : foreign_post(foreign, style.words_per_post, rng);
        }
        post.n_comments = draw_count({prof.engagement.comments_per_post, prof.engagement.dispersion},
                                     style.comments, rng);
        post.n_likes = draw_count({prof.engagement.likes_per_post, prof.engagement.dispersion},
                                  style.likes, rng);
        post.timestamp = times[static_cast<std::size_t>(k)];
        posts.push_back(std::move(post));
      }

      // Likes.
      std::vector<std::size_t> chosen;
      for (std::size_t t : prof.target_pages) {
        liked[t] = 1;
        chosen.push_back(t);
      }
      const std::size_t available = n_pages - prof.target_pages.size();
      const auto wanted = std::min<std::size_t>(
          static_cast<std::size_t>(draw_count(prof.likes_per_user, 1.0, rng)), available);
      const std::size_t goal = chosen.size() + wanted;
      std::size_t attempts = 0;
      const std::size_t max_attempts = 50 * wanted + 1000;
      while (chosen.size() < goal && attempts++ < max_attempts) {
        const std::size_t page = bernoulli(rng, style.affinity) ? popular(rng) : any_page(rng);
        if (liked[page]) continue;
        liked[page] = 1;
        chosen.push_back(page);
      }
      for (std::size_t page = any_page(rng); chosen.size() < goal; page = (page + 1) % n_pages) {
        if (liked[page]) continue;
        liked[page] = 1;
        chosen.push_back(page);
      }
      const std::int64_t spread = std::min(prof.like_time_spread, kLikeHorizon);
      const std::int64_t start = std::uniform_int_distribution<std::int64_t>(
          kEpoch - kLikeHorizon, kEpoch - spread)(rng);
      std::uniform_int_distribution<std::int64_t> offset(0, spread);
      std::vector<LikeEvent> mine;
      for (std::size_t page : chosen) {
        liked[page] = 0;
        mine.push_back({id, pages[page].id, start + offset(rng)});
      }
      std::stable_sort(mine.begin(), mine.end(),
                       [](const LikeEvent& a, const LikeEvent& b) { return a.timestamp < b.timestamp; });
      likes.insert(likes.end(), mine.begin(), mine.end());
    }
  }
  return Dataset(std::move(accounts), std::move(posts), std::move(likes), std::move(pages));
}

namespace {

// Syllables per word that give `flesch` at `sentence_length` words per
// sentence.
double syllables_for(double sentence_length, double flesch) {
  return (206.835 - 1.015 * sentence_length - flesch) / 84.6;
}

struct FarmSpec {
  const char* campaign;
  std::size_t n_users;
  double likes;
  std::size_t n_targets;
  double affinity;
  std::int64_t spread;
  double posts;
  double posts_dispersion;
  std::size_t vocabulary;
  double words_per_post;
  double word_length;
  double sentence_length;
  double flesch;
  double english;
  double comments;
  double post_likes;
  double share;
  double heterogeneity;
};

}  // namespace

GenConfig default_paper_calibration() {
  constexpr std::int64_t kDay = 86400;
  GenConfig c;
  c.n_pages = 4000;
  c.zipf_exponent = 1.0;
  c.seed = 1;

  BehaviorProfile base;
  base.label = Label::baseline();
  base.n_users = 1408;
  base.likes_per_user = {56.0, 0.6};
  base.popular_page_affinity = 0.6;
  base.like_time_spread = 2 * 365 * kDay;
  base.posts_per_user = {25.0, 0.5};
  base.lexical = {1000, 17.0, 6.9, 17.6, 0.86, 6.0, syllables_for(17.6, 55.1)};
  base.engagement = {1.5, 4.0, 0.25, 1.0};
  base.heterogeneity = 0.3;
  c.profiles.push_back(base);

  const FarmSpec farms[] = {
      {"BL-USA", 583, 130.0, 5, 0.93, 365 * kDay, 76.0, 0.5, 1500, 15.0, 5.7, 22.8, 51.5, 0.9, 1.5, 4.5, 0.27, 0.3},
      {"AL-ALL", 707, 200.0, 30, 0.10, 3 * kDay, 87.0, 0.5, 20, 9.0, 6.2, 13.9, 43.6, 0.10, 5.0, 12.0, 0.45, 0.3},
      {"AL-USA", 827, 300.0, 60, 0.02, 3 * kDay, 37.0, 0.5, 80, 11.0, 6.2, 12.7, 54.0, 0.85, 2.5, 10.0, 0.40, 0.3},
      {"SF-ALL", 870, 300.0, 30, 0.15, 5 * kDay, 53.0, 0.5, 15, 8.0, 6.3, 11.7, 45.2, 0.15, 2.5, 9.0, 0.45, 0.3},
      {"SF-USA", 653, 300.0, 30, 0.15, 5 * kDay, 60.0, 0.5, 170, 9.0, 6.3, 12.0, 45.6, 0.80, 2.5, 9.0, 0.42, 0.3},
      {"MS-USA", 259, 400.0, 30, 0.10, 7 * kDay, 47.0, 0.2, 240, 13.0, 6.1, 17.8, 50.1, 0.85, 2.0, 11.0, 0.40, 0.2},
  };
  // Target pages come in disjoint blocks at the unpopular end of the
  // catalogue.
  std::size_t next_target = c.n_pages;
  for (const FarmSpec& f : farms) {
    BehaviorProfile p;
    p.label = Label::farm(f.campaign);
    p.n_users = f.n_users;
    p.likes_per_user = {f.likes, 0.3};
    for (std::size_t t = 0; t < f.n_targets; ++t) p.target_pages.push_back(--next_target);
    p.popular_page_affinity = f.affinity;
    p.like_time_spread = f.spread;
    p.posts_per_user = {f.posts, f.posts_dispersion};
    p.lexical = {f.vocabulary, f.words_per_post, f.word_length, f.sentence_length, f.english, 6.0,
                 syllables_for(f.sentence_length, f.flesch)};
    p.engagement = {f.comments, f.post_likes, f.share, 1.0, 0.66};
    p.heterogeneity = f.heterogeneity;
    c.profiles.push_back(std::move(p));
  }
  return c;
}

namespace {

using detail::Json;

Json count_json(const CountDistribution& d) { return Json{{"mean", d.mean}, {"dispersion", d.dispersion}}; }

CountDistribution count_from(const Json& j, std::string_view key) {
  const Json& o = detail::require(j, key);
  return {detail::require_number(o, "mean"), o.value("dispersion", 0.0)};
}

}  // namespace

std::string to_json(const GenConfig& config) {
  Json profiles = Json::array();
  for (const BehaviorProfile& p : config.profiles) {
    const LexicalGenParams& lx = p.lexical;
    const EngagementParams& e = p.engagement;
    profiles.push_back(Json{
        {"label", p.label.to_string()},
        {"n_users", p.n_users},
        {"likes_per_user", count_json(p.likes_per_user)},
        {"target_pages", p.target_pages},
        {"popular_page_affinity", p.popular_page_affinity},
        {"like_time_spread", p.like_time_spread},
        {"posts_per_user", count_json(p.posts_per_user)},
        {"lexical_params",
         Json{{"vocabulary_size", lx.vocabulary_size},
              {"mean_words_per_post", lx.mean_words_per_post},
              {"mean_word_length", lx.mean_word_length},
              {"mean_sentence_length", lx.mean_sentence_length},
              {"english_fraction", lx.english_fraction},
              {"english_concentration", lx.english_concentration},
              {"mean_syllables_per_word", lx.mean_syllables_per_word}}},
        {"engagement_params",
         Json{{"comments_per_post", e.comments_per_post},
              {"likes_per_post", e.likes_per_post},
              {"share_fraction", e.share_fraction},
              {"dispersion", e.dispersion},
              {"text_fraction", e.text_fraction}}},
        {"heterogeneity", p.heterogeneity},
    });
  }
  Json root{{"profiles", profiles},
            {"n_pages", config.n_pages},
            {"zipf_exponent", config.zipf_exponent},
            {"seed", config.seed}};
  return root.dump(2) + "\n";
}

GenConfig gen_config_from_json(std::string_view text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    GenConfig c;
    c.n_pages = static_cast<std::size_t>(detail::require_int(root, "n_pages"));
    c.zipf_exponent = root.value("zipf_exponent", 1.0);
    c.seed = root.value("seed", std::uint64_t{0});
    const Json& profiles = detail::require(root, "profiles");
    if (!profiles.is_array()) throw ConfigError("\"profiles\" must be an array");
    for (const Json& j : profiles) {
      BehaviorProfile p;
      p.label = Label::parse(detail::require_string(j, "label"));
      p.n_users = static_cast<std::size_t>(detail::require_int(j, "n_users"));
      p.likes_per_user = count_from(j, "likes_per_user");
      p.target_pages = j.value("target_pages", std::vector<std::size_t>{});
      p.popular_page_affinity = detail::require_number(j, "popular_page_affinity");
      p.like_time_spread = detail::require_int(j, "like_time_spread");
      p.posts_per_user = count_from(j, "posts_per_user");
      p.heterogeneity = j.value("heterogeneity", 0.0);
      const Json& lx = detail::require(j, "lexical_params");
      p.lexical.vocabulary_size = static_cast<std::size_t>(detail::require_int(lx, "vocabulary_size"));
      p.lexical.mean_words_per_post = detail::require_number(lx, "mean_words_per_post");
      p.lexical.mean_word_length = detail::require_number(lx, "mean_word_length");
      p.lexical.mean_sentence_length = detail::require_number(lx, "mean_sentence_length");
      p.lexical.english_fraction = detail::require_number(lx, "english_fraction");
      p.lexical.english_concentration = lx.value("english_concentration", 0.0);
      p.lexical.mean_syllables_per_word = lx.value("mean_syllables_per_word", 1.5);
      const Json& e = detail::require(j, "engagement_params");
      p.engagement.comments_per_post = detail::require_number(e, "comments_per_post");
      p.engagement.likes_per_post = detail::require_number(e, "likes_per_post");
      p.engagement.share_fraction = detail::require_number(e, "share_fraction");
      p.engagement.dispersion = e.value("dispersion", 1.0);
      p.engagement.text_fraction = e.value("text_fraction", 0.72);
      c.profiles.push_back(std::move(p));
    }
    validate(c);
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

GenConfig load_gen_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return gen_config_from_json(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace likefarm
