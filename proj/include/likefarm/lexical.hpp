#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "likefarm/datamodel.hpp"

namespace likefarm {

/// Character-class and token counts of one piece of text.
///
/// Characters are Unicode code points. `non_letters` counts every code point
/// that is neither a letter, a digit nor whitespace (so punctuation and
/// emoticons are both non-letters); `punctuation` is the subset belonging
/// to the punctuation categories.
struct TokenizedPost {
  std::vector<std::string> words;
  std::size_t sentences = 0;
  std::size_t chars = 0;
  std::size_t letters = 0;
  std::size_t ascii_letters = 0;
  std::size_t whitespace = 0;
  std::size_t uppercase = 0;
  std::size_t punctuation = 0;
  std::size_t digits = 0;
  std::size_t non_letters = 0;
};

/// Words are maximal runs of letters, digits and apostrophes (leading and
/// trailing apostrophes dropped). A sentence is a segment terminated by
/// '.', '!', '?' or end of text that contains at least one letter.
TokenizedPost tokenize(std::string_view text);

/// Deterministic English detector: at least 15% of word tokens must be in
/// the built-in stopword list and at least half of the letters must be
/// ASCII. Empty text is not English.
bool is_english(std::string_view text);

/// The 200-word English stopword/frequency list used by is_english.
std::span<const std::string_view> english_stopwords();
bool is_english_stopword(std::string_view lowercase_word);

/// True when the post carries non-blank text.
bool has_text(const Post& post);

struct EnglishRatio {
  double r = 0.0;
};

/// Fraction of text-bearing posts detected as English; 0 without any.
EnglishRatio english_ratio(std::span<const Post> posts);

/// Automated Readability Index. Returns 0 when either argument is 0 (a user
/// without words or sentences), not the formula's negative constant.
double ari(double avg_word_length, double avg_sentence_length);

/// Flesch reading ease; 0 when there are no words or no sentences.
double flesch(std::size_t total_words, std::size_t total_sentences, std::size_t total_syllables);

/// Vowel groups (a, e, i, o, u, y) minus one for a trailing silent 'e'
/// unless that is the only group; never less than 1.
std::size_t count_syllables(std::string_view word);

/// The twelve lexical timeline features of a user, in canonical order.
struct LexicalFeatures {
  double n_chars = 0.0;
  double n_words = 0.0;
  double n_sentences = 0.0;
  double avg_word_length = 0.0;
  double avg_sentence_length = 0.0;
  double avg_uppercase = 0.0;
  double pct_punctuation = 0.0;
  double pct_numbers = 0.0;
  double pct_non_letters = 0.0;
  double richness = 0.0;
  double ari = 0.0;
  double flesch = 0.0;

  static constexpr std::size_t kCount = 12;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "n_chars",         "n_words",         "n_sentences",  "avg_word_length",
      "avg_sentence_length", "avg_uppercase", "pct_punctuation", "pct_numbers",
      "pct_non_letters", "richness",        "ari",          "flesch"};

  std::array<double, kCount> to_array() const;
  static LexicalFeatures from_array(const std::array<double, kCount>& values);
  bool operator==(const LexicalFeatures&) const = default;
};

/// Features over the user's English posts only. Averages: word length is
/// token characters per word, sentence length is words per sentence,
/// uppercase is uppercase letters per English post. Richness uses the
/// lowercased word set. A user without English posts gets all zeros.
LexicalFeatures lexical_profile(std::span<const Post> posts);

}  // namespace likefarm
