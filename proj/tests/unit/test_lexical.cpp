#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "likefarm/features.hpp"
#include "likefarm/lexical.hpp"
#include "likefarm/synthgen.hpp"
#include "support.hpp"

using namespace likefarm;
using doctest::Approx;

namespace {

std::vector<Post> posts_of(std::initializer_list<const char*> texts) {
  std::vector<Post> out;
  for (const char* t : texts) out.push_back(test::text_post("u", t));
  return out;
}

GenConfig single_profile(const BehaviorProfile& p, std::uint64_t seed) {
  GenConfig c;
  c.profiles = {p};
  c.n_pages = 200;
  c.seed = seed;
  return c;
}

BehaviorProfile baseline_profile(std::size_t n_users) {
  BehaviorProfile p = default_paper_calibration().profiles.front();
  REQUIRE(p.label.is_baseline());
  p.n_users = n_users;
  return p;
}

}  // namespace

TEST_CASE("tokenize: a plain sentence") {
  const TokenizedPost t = tokenize("The cat sat.");
  CHECK(t.words == std::vector<std::string>{"The", "cat", "sat"});
  CHECK(t.sentences == 1);
  CHECK(t.uppercase == 1);
  CHECK(t.punctuation == 1);
  CHECK(t.chars == 12);
  CHECK(t.digits == 0);
}

TEST_CASE("tokenize: empty text") {
  const TokenizedPost t = tokenize("");
  CHECK(t.words.empty());
  CHECK(t.sentences == 0);
  CHECK(t.chars == 0);
  CHECK(t.uppercase + t.punctuation + t.digits + t.non_letters == 0);
}

TEST_CASE("tokenize: emoticons and digits") {
  const TokenizedPost t = tokenize("Hi!! :) 42");
  CHECK(t.words == std::vector<std::string>{"Hi", "42"});
  CHECK(t.sentences == 1);
  CHECK(t.digits == 2);
  CHECK(t.non_letters >= 2);
}

TEST_CASE("tokenize: apostrophes and unicode") {
  const TokenizedPost t = tokenize("'Don't' stop. \xc3\x89t\xc3\xa9 \xd0\x9c\xd0\xb8\xd1\x80!");
  CHECK(t.words == std::vector<std::string>{"Don't", "stop", "\xc3\x89t\xc3\xa9", "\xd0\x9c\xd0\xb8\xd1\x80"});
  CHECK(t.sentences == 2);
  CHECK(t.uppercase == 3);
  CHECK(t.letters == 14);
  CHECK(t.ascii_letters == 9);
}

TEST_CASE("is_english") {
  CHECK(is_english("the quick brown fox and the dog"));
  CHECK_FALSE(is_english("xqz blorf ktt"));
  CHECK_FALSE(is_english(""));
  CHECK_FALSE(is_english("\xd0\xb8 the \xd0\xbc\xd0\xb8\xd1\x80 \xd0\xb4\xd0\xbe\xd0\xbc"));
  CHECK(english_stopwords().size() == 200);
  CHECK(is_english_stopword("the"));
}

TEST_CASE("is_english agrees with the generator's language") {
  for (double fraction : {1.0, 0.0}) {
    BehaviorProfile p = baseline_profile(60);
    p.lexical.english_fraction = fraction;
    p.lexical.english_concentration = 0.0;
    const Dataset d = generate(single_profile(p, 3));
    std::size_t text_posts = 0;
    std::size_t agree = 0;
    for (const Post& post : d.posts()) {
      if (!has_text(post)) continue;
      ++text_posts;
      if (is_english(post.text) == (fraction == 1.0)) ++agree;
    }
    REQUIRE(text_posts >= 1000);
    CHECK(static_cast<double>(agree) >= 0.99 * static_cast<double>(text_posts));
  }
}

TEST_CASE("english_ratio") {
  const auto en = posts_of({"the cat is on the mat", "it is the end", "and so it was", "we are here"});
  CHECK(english_ratio(en).r == 1.0);
  const auto other = posts_of({"xqz", "blorf", "ktt zzv", "qqq", "vvv"});
  CHECK(english_ratio(other).r == 0.0);
  auto mixed = posts_of({"the cat is on the mat", "it is the end", "and so it was", "xqz", "blorf", "ktt"});
  CHECK(english_ratio(mixed).r == 0.5);
  Post photo;
  photo.author = "u";
  photo.kind = PostKind::Photo;
  mixed.push_back(photo);
  CHECK(english_ratio(mixed).r == 0.5);
  CHECK(english_ratio({}).r == 0.0);
}

TEST_CASE("ari") {
  // 4.71 * 6.9 + 0.5 * 17.6 - 21.43
  CHECK(ari(6.9, 17.6) == Approx(19.869));
  CHECK(ari(5.7, 22.8) == Approx(16.817));
  CHECK(std::abs(ari(5.7, 22.8) - 16.9) <= 0.1);
  CHECK(ari(0.0, 0.0) == 0.0);
  CHECK(ari(4.0, 0.0) == 0.0);
}

TEST_CASE("ari is increasing in both arguments") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.5, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double w = d(rng), s = d(rng), dw = d(rng) / 10.0;
    CHECK(ari(w + dw, s) > ari(w, s));
    CHECK(ari(w, s + dw) > ari(w, s));
  }
}

TEST_CASE("flesch") {
  CHECK(flesch(3, 1, 3) == Approx(119.19));
  CHECK(flesch(0, 1, 0) == 0.0);
  CHECK(flesch(5, 0, 7) == 0.0);
  CHECK(flesch(100, 4, 150) == Approx(206.835 - 1.015 * 25.0 - 84.6 * 1.5));
}

TEST_CASE("count_syllables") {
  CHECK(count_syllables("cat") == 1);
  CHECK(count_syllables("hello") == 2);
  CHECK(count_syllables("the") == 1);
  CHECK(count_syllables("make") == 1);
  CHECK(count_syllables("rhythm") == 1);
  CHECK(count_syllables("beautiful") == 3);
  CHECK(count_syllables("Queue") == 1);
  CHECK(count_syllables("xyz") == 1);
  CHECK(count_syllables("42") == 1);
}

TEST_CASE("lexical_profile of one post") {
  const LexicalFeatures f = lexical_profile(posts_of({"The cat sat. The dog ran."}));
  CHECK(f.n_words == 6);
  CHECK(f.n_sentences == 2);
  CHECK(f.richness == Approx(5.0 / 6.0));
  CHECK(f.n_chars == 25);
  CHECK(f.avg_word_length == Approx(3.0));
  CHECK(f.avg_sentence_length == Approx(3.0));
  CHECK(f.avg_uppercase == Approx(2.0));
  CHECK(f.pct_punctuation == Approx(2.0 / 25.0));
  CHECK(f.pct_numbers == 0.0);
  CHECK(f.ari == Approx(ari(3.0, 3.0)));
  CHECK(f.flesch == Approx(flesch(6, 2, 6)));
}

TEST_CASE("lexical_profile without English posts is all zero") {
  CHECK(lexical_profile(posts_of({"xqz blorf", "ktt"})) == LexicalFeatures{});
  CHECK(lexical_profile({}) == LexicalFeatures{});
}

TEST_CASE("lexical_profile ignores non-English posts") {
  const auto a = lexical_profile(posts_of({"the cat is on the mat.", "xqz blorf ktt."}));
  const auto b = lexical_profile(posts_of({"the cat is on the mat."}));
  CHECK(a == b);
}

TEST_CASE("lexical properties") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> words{"the", "cat", "Dog", "and", "is", "a", "it's", "2024", "sun", "of"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> len(3, 15);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Post> posts;
    for (int p = 0; p < 4; ++p) {
      std::string text;
      for (int w = len(rng); w > 0; --w) text += words[pick(rng)] + (w % 4 == 0 ? ". " : " ");
      text += ":) !";
      posts.push_back(test::text_post("u", text));
    }
    const LexicalFeatures f = lexical_profile(posts);
    if (f.n_words == 0) continue;

    auto doubled = posts;
    for (Post& p : doubled) p.text = p.text + " " + p.text;
    CHECK(lexical_profile(doubled).richness <= f.richness + 1e-12);

    auto reversed = posts;
    std::reverse(reversed.begin(), reversed.end());
    const LexicalFeatures r = lexical_profile(reversed);
    for (std::size_t i = 0; i < LexicalFeatures::kCount; ++i) {
      CHECK(r.to_array()[i] == Approx(f.to_array()[i]).epsilon(1e-12));
    }

    std::size_t letters = 0, chars = 0;
    for (const Post& p : posts) {
      const TokenizedPost t = tokenize(p.text);
      letters += t.letters;
      chars += t.chars;
    }
    CHECK(f.pct_punctuation <= f.pct_non_letters);
    CHECK(f.pct_numbers + f.pct_non_letters + static_cast<double>(letters) / static_cast<double>(chars) <=
          1.0 + 1e-12);
    CHECK(f.richness > 0.0);
    CHECK(f.richness <= 1.0);
  }
}

TEST_CASE("baseline synthetic corpus matches the measured richness and Flesch score") {
  const Dataset d = generate(single_profile(baseline_profile(500), 21));
  double richness = 0.0, fl = 0.0;
  std::size_t n = 0;
  for (const Account& a : d.accounts()) {
    const LexicalFeatures f = lexical_profile(d.posts_of(a.id));
    if (f.n_words == 0) continue;
    richness += f.richness;
    fl += f.flesch;
    ++n;
  }
  REQUIRE(n > 400);
  CHECK(std::abs(richness / n - 0.70) <= 0.07);
  CHECK(std::abs(fl / n - 55.1) <= 10.0);
}
