#include "likefarm/lexical.hpp"

#include <algorithm>
#include <unordered_set>

#include "unicode.hpp"

namespace likefarm {

namespace {

using detail::CharClass;

// Function words and high-frequency vocabulary of informal English posts.
constexpr std::array<std::string_view, 200> kStopwords = {
    "the",     "be",      "to",      "of",       "and",     "a",       "in",      "that",
    "have",    "i",       "it",      "for",      "not",     "on",      "with",    "he",
    "as",      "you",     "do",      "at",       "this",    "but",     "his",     "by",
    "from",    "they",    "we",      "say",      "her",     "she",     "or",      "an",
    "will",    "my",      "one",     "all",      "would",   "there",   "their",   "what",
    "so",      "up",      "out",     "if",       "about",   "who",     "get",     "which",
    "go",      "me",      "when",    "make",     "can",     "like",    "time",    "no",
    "just",    "him",     "know",    "take",     "people",  "into",    "year",    "your",
    "good",    "some",    "could",   "them",     "see",     "other",   "than",    "then",
    "now",     "look",    "only",    "come",     "its",     "over",    "think",   "also",
    "back",    "after",   "use",     "two",      "how",     "our",     "work",    "first",
    "well",    "way",     "even",    "new",      "want",    "because", "any",     "these",
    "give",    "day",     "most",    "us",       "is",      "are",     "was",     "were",
    "been",    "has",     "had",     "did",      "does",    "am",      "being",   "said",
    "very",    "more",    "here",    "where",    "why",     "too",     "much",    "many",
    "should",  "may",     "might",   "must",     "shall",   "own",     "same",    "such",
    "both",    "each",    "few",     "those",    "through", "before",  "under",   "again",
    "once",    "off",     "above",   "below",    "between", "during",  "against", "down",
    "until",   "while",   "nor",     "yours",    "ours",    "herself", "himself", "itself",
    "myself",  "yourself", "whom",   "don't",    "can't",   "i'm",     "it's",    "that's",
    "let's",   "got",     "going",   "really",   "love",    "today",   "thank",   "thanks",
    "happy",   "great",   "little",  "still",    "never",   "always",  "every",   "something",
    "nothing", "life",    "right",   "need",     "feel",    "oh",      "yes",     "please",
    "let",     "tell",    "things",  "best",     "friends", "home",    "night",   "world",
    "last",    "long",    "family",  "god",      "man",     "old",     "big",     "next",
};

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> set(kStopwords.begin(), kStopwords.end());
  return set;
}

bool word_char(char32_t cp) {
  const CharClass c = detail::classify(cp);
  return c == CharClass::Letter || c == CharClass::Digit || detail::is_apostrophe(cp);
}

void flush_word(std::string& current, std::vector<std::string>& words) {
  // Drop leading/trailing apostrophes (quotes) and all-apostrophe runs.
  std::size_t begin = 0;
  std::size_t end = current.size();
  while (begin < end) {
    std::size_t p = begin;
    const char32_t cp = detail::next_code_point(current, p);
    if (!detail::is_apostrophe(cp)) break;
    begin = p;
  }
  while (end > begin) {
    if (current[end - 1] == '\'') {
      --end;
    } else if (end - begin >= 3 && current.compare(end - 3, 3, "\xE2\x80\x99") == 0) {
      end -= 3;
    } else {
      break;
    }
  }
  if (end > begin) words.emplace_back(current.substr(begin, end - begin));
  current.clear();
}

std::size_t code_points(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size(); ++n) detail::next_code_point(s, pos);
  return n;
}

}  // namespace

std::span<const std::string_view> english_stopwords() { return kStopwords; }

bool is_english_stopword(std::string_view lowercase_word) {
  return stopword_set().contains(lowercase_word);
}

TokenizedPost tokenize(std::string_view text) {
  TokenizedPost out;
  std::string current;
  bool segment_has_letter = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t start = pos;
    const char32_t cp = detail::next_code_point(text, pos);
    ++out.chars;
    const CharClass cls = detail::classify(cp);
    switch (cls) {
      case CharClass::Letter:
        ++out.letters;
        if (cp < 0x80) ++out.ascii_letters;
        if (detail::is_uppercase(cp)) ++out.uppercase;
        segment_has_letter = true;
        break;
      case CharClass::Digit:
        ++out.digits;
        break;
      case CharClass::Whitespace:
        ++out.whitespace;
        break;
      case CharClass::Punctuation:
        ++out.punctuation;
        ++out.non_letters;
        break;
      case CharClass::Symbol:
        ++out.non_letters;
        break;
    }
    if (word_char(cp)) {
      current.append(text.substr(start, pos - start));
    } else if (!current.empty()) {
      flush_word(current, out.words);
    }
    if (detail::is_sentence_terminator(cp)) {
      if (segment_has_letter) ++out.sentences;
      segment_has_letter = false;
    }
  }
  if (!current.empty()) flush_word(current, out.words);
  if (segment_has_letter) ++out.sentences;
  return out;
}

bool is_english(std::string_view text) {
  const TokenizedPost t = tokenize(text);
  if (t.words.empty() || t.letters == 0) return false;
  std::size_t hits = 0;
  for (const std::string& w : t.words) {
    if (is_english_stopword(detail::ascii_lower(w))) ++hits;
  }
  const double coverage = static_cast<double>(hits) / static_cast<double>(t.words.size());
  const double ascii_fraction = static_cast<double>(t.ascii_letters) / static_cast<double>(t.letters);
  return coverage >= 0.15 && ascii_fraction >= 0.5;
}

bool has_text(const Post& post) {
  return post.text.find_first_not_of(" \t\r\n\f\v") != std::string::npos;
}

EnglishRatio english_ratio(std::span<const Post> posts) {
  std::size_t text_bearing = 0;
  std::size_t english = 0;
  for (const Post& p : posts) {
    if (!has_text(p)) continue;
    ++text_bearing;
    if (is_english(p.text)) ++english;
  }
  if (text_bearing == 0) return {0.0};
  return {static_cast<double>(english) / static_cast<double>(text_bearing)};
}

double ari(double avg_word_length, double avg_sentence_length) {
  if (avg_word_length <= 0.0 || avg_sentence_length <= 0.0) return 0.0;
  return 4.71 * avg_word_length + 0.5 * avg_sentence_length - 21.43;
}

double flesch(std::size_t total_words, std::size_t total_sentences, std::size_t total_syllables) {
  if (total_words == 0 || total_sentences == 0) return 0.0;
  const double w = static_cast<double>(total_words);
  return 206.835 - 1.015 * (w / static_cast<double>(total_sentences)) -
         84.6 * (static_cast<double>(total_syllables) / w);
}

std::size_t count_syllables(std::string_view word) {
  const std::string w = detail::ascii_lower(word);
  const auto vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const bool silent_e = w.size() >= 2 && w.back() == 'e' && !vowel(w[w.size() - 2]);
  if (silent_e && groups > 1) --groups;
  return std::max<std::size_t>(groups, 1);
}

std::array<double, LexicalFeatures::kCount> LexicalFeatures::to_array() const {
  return {n_chars,         n_words,     n_sentences,     avg_word_length,
          avg_sentence_length, avg_uppercase, pct_punctuation, pct_numbers,
          pct_non_letters, richness,    ari,             flesch};
}

LexicalFeatures LexicalFeatures::from_array(const std::array<double, kCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]};
}

LexicalFeatures lexical_profile(std::span<const Post> posts) {
  std::size_t n_posts = 0;
  std::size_t chars = 0;
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t word_chars = 0;
  std::size_t uppercase = 0;
  std::size_t punctuation = 0;
  std::size_t digits = 0;
  std::size_t non_letters = 0;
  std::size_t syllables = 0;
  std::unordered_set<std::string> unique;

  for (const Post& p : posts) {
    if (!has_text(p) || !is_english(p.text)) continue;
    const TokenizedPost t = tokenize(p.text);
    ++n_posts;
    chars += t.chars;
    words += t.words.size();
    sentences += t.sentences;
    uppercase += t.uppercase;
    punctuation += t.punctuation;
    digits += t.digits;
    non_letters += t.non_letters;
    for (const std::string& w : t.words) {
      word_chars += code_points(w);
      syllables += count_syllables(w);
      unique.insert(detail::ascii_lower(w));
    }
  }

  LexicalFeatures f;
  if (n_posts == 0) return f;
  const auto d = [](std::size_t v) { return static_cast<double>(v); };
  f.n_chars = d(chars);
  f.n_words = d(words);
  f.n_sentences = d(sentences);
  f.avg_word_length = words ? d(word_chars) / d(words) : 0.0;
  f.avg_sentence_length = sentences ? d(words) / d(sentences) : 0.0;
  f.avg_uppercase = d(uppercase) / d(n_posts);
  f.pct_punctuation = chars ? d(punctuation) / d(chars) : 0.0;
  f.pct_numbers = chars ? d(digits) / d(chars) : 0.0;
  f.pct_non_letters = chars ? d(non_letters) / d(chars) : 0.0;
  f.richness = words ? d(unique.size()) / d(words) : 0.0;
  f.ari = ari(f.avg_word_length, f.avg_sentence_length);
  f.flesch = flesch(words, sentences, syllables);
  return f;
}

}  // namespace likefarm
