#include <cmath>
#include <map>
#include <set>

#include <doctest.h>

#include "likefarm/error.hpp"
#include "likefarm/lexical.hpp"
#include "likefarm/nonlexical.hpp"
#include "likefarm/synthgen.hpp"
#include "support.hpp"

using namespace likefarm;
using doctest::Approx;

namespace {

BehaviorProfile simple_profile(std::size_t users) {
  BehaviorProfile p;
  p.label = Label::baseline();
  p.n_users = users;
  p.likes_per_user = {3.0, 0.0};
  p.posts_per_user = {2.0, 0.0};
  return p;
}

const BehaviorProfile& profile_named(const GenConfig& c, std::string_view campaign) {
  for (const auto& p : c.profiles) {
    if (p.label.campaign == campaign) return p;
  }
  FAIL("no profile " << campaign);
  return c.profiles.front();
}

}  // namespace

TEST_CASE("exact like counts") {
  GenConfig c;
  c.profiles = {simple_profile(2)};
  c.n_pages = 10;
  c.seed = 1;
  const Dataset d = generate(c);
  CHECK(d.accounts().size() == 2);
  CHECK(d.likes().size() == 6);
  CHECK(d.pages().size() == 10);
  for (const Account& a : d.accounts()) {
    std::set<std::string> pages;
    for (const LikeEvent& l : d.likes()) {
      if (l.user == a.id) pages.insert(l.page);
    }
    CHECK(pages.size() == 3);
  }
}

TEST_CASE("generation is byte-identical for a fixed seed") {
  GenConfig c = default_paper_calibration();
  for (auto& p : c.profiles) p.n_users = 10;
  c.seed = 77;
  test::TempDir a("gen-a"), b("gen-b");
  write_dataset(generate(c), a.path());
  write_dataset(generate(c), b.path());
  for (const char* f : {"accounts.jsonl", "posts.jsonl", "likes.jsonl", "pages.jsonl"}) {
    CHECK(test::read_file(a / f) == test::read_file(b / f));
  }
  c.seed = 78;
  test::TempDir other("gen-c");
  write_dataset(generate(c), other.path());
  CHECK(test::read_file(a / "posts.jsonl") != test::read_file(other / "posts.jsonl"));
}

TEST_CASE("labels follow the generating profile and farms like every target") {
  GenConfig c = default_paper_calibration();
  for (auto& p : c.profiles) p.n_users = 15;
  c.seed = 3;
  const Dataset d = generate(c);
  std::size_t next = 0;
  for (const BehaviorProfile& p : c.profiles) {
    for (std::size_t i = 0; i < p.n_users; ++i, ++next) {
      const Account& a = d.accounts()[next];
      CHECK(a.label == p.label);
      std::set<std::string> liked;
      for (const LikeEvent& l : d.likes()) {
        if (l.user == a.id) liked.insert(l.page);
      }
      for (std::size_t t : p.target_pages) CHECK(liked.count(d.pages()[t].id) == 1);
    }
  }
}

TEST_CASE("mean words per post converges") {
  BehaviorProfile p = default_paper_calibration().profiles.front();
  p.n_users = 100;
  p.posts_per_user = {100.0, 0.0};
  p.heterogeneity = 0.0;
  p.lexical.english_fraction = 1.0;
  p.lexical.english_concentration = 0.0;
  p.lexical.mean_words_per_post = 17.6;
  GenConfig c;
  c.profiles = {p};
  c.n_pages = 500;
  c.seed = 12;
  const Dataset d = generate(c);
  double words = 0.0;
  std::size_t posts = 0;
  for (const Post& post : d.posts()) {
    if (post.kind != PostKind::Text) continue;
    words += static_cast<double>(tokenize(post.text).words.size());
    ++posts;
  }
  REQUIRE(posts >= 5000);
  CHECK(std::abs(words / static_cast<double>(posts) - 17.6) <= 0.05 * 17.6);
}

TEST_CASE("default calibration") {
  const GenConfig c = default_paper_calibration();
  CHECK_NOTHROW(validate(c));
  REQUIRE(c.profiles.size() == 7);
  const BehaviorProfile& base = c.profiles.front();
  CHECK(base.label.is_baseline());
  CHECK(base.n_users == 1408);
  CHECK(base.lexical.mean_sentence_length == 17.6);
  CHECK(base.lexical.mean_word_length == 6.9);
  CHECK(base.lexical.english_fraction == Approx(0.86));
  CHECK(profile_named(c, "SF-ALL").lexical.english_fraction == Approx(0.15));
  CHECK(profile_named(c, "AL-ALL").lexical.english_fraction == Approx(0.10));
  const BehaviorProfile& stealthy = profile_named(c, "BL-USA");
  const BehaviorProfile& naive = profile_named(c, "AL-USA");
  CHECK(stealthy.popular_page_affinity > base.popular_page_affinity);
  CHECK(naive.popular_page_affinity < 0.05);
  CHECK(stealthy.like_time_spread > naive.like_time_spread);
  CHECK(stealthy.n_users == 583);
  CHECK(profile_named(c, "MS-USA").n_users == 259);
}

TEST_CASE("invalid configurations are rejected") {
  GenConfig c;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.profiles = {simple_profile(2)};
  c.n_pages = 2;
  CHECK_THROWS_AS(generate(c), ConfigError);
  c.n_pages = 10;
  c.profiles[0].target_pages = {10};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.profiles[0].target_pages = {};
  c.profiles[0].popular_page_affinity = 1.5;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.profiles[0].popular_page_affinity = 0.5;
  c.profiles[0].like_time_spread = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.profiles[0].like_time_spread = 10;
  c.profiles[0].lexical.vocabulary_size = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("configuration JSON round-trips") {
  const GenConfig c = default_paper_calibration();
  CHECK(gen_config_from_json(to_json(c)) == c);
  try {
    gen_config_from_json(R"({"n_pages": 50, "seed": 4, "profiles": [{"label": "farm:X", "n_users": 3}]})");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("likes_per_user") != std::string::npos);
  }
  CHECK_THROWS_AS(gen_config_from_json("{\"profiles\": 3}"), ConfigError);
  CHECK_THROWS_AS(gen_config_from_json("not json"), ConfigError);
}

TEST_CASE("per-class statistics land within 10% of their targets") {
  // Richness targets are the measured values the vocabulary sizes were
  // calibrated against.
  const std::map<std::string, double> richness{{"", 0.70}, {"AL-USA", 0.49}, {"BL-USA", 0.58}};
  GenConfig c = default_paper_calibration();
  std::vector<BehaviorProfile> kept;
  for (auto p : c.profiles) {
    if (!richness.count(p.label.campaign)) continue;
    p.n_users = 500;
    kept.push_back(p);
  }
  c.profiles = kept;
  c.seed = 31;
  const Dataset d = generate(c);
  std::size_t next = 0;
  for (const BehaviorProfile& p : c.profiles) {
    double wpp = 0, awl = 0, rich = 0, share = 0;
    std::size_t n_lex = 0;
    for (std::size_t i = 0; i < p.n_users; ++i, ++next) {
      const auto posts = d.posts_of(d.accounts()[next].id);
      const NonLexicalFeatures nl = nonlexical_profile(posts);
      wpp += nl.avg_words_per_post;
      share += nl.share_fraction;
      const LexicalFeatures lx = lexical_profile(posts);
      if (lx.n_words > 0) {
        awl += lx.avg_word_length;
        rich += lx.richness;
        ++n_lex;
      }
    }
    const double n = static_cast<double>(p.n_users);
    CAPTURE(p.label.to_string());
    CHECK(std::abs(wpp / n / p.lexical.mean_words_per_post - 1.0) <= 0.10);
    CHECK(std::abs(share / n / p.engagement.share_fraction - 1.0) <= 0.10);
    CHECK(std::abs(awl / n_lex / p.lexical.mean_word_length - 1.0) <= 0.10);
    CHECK(std::abs(rich / n_lex / richness.at(p.label.campaign) - 1.0) <= 0.10);
  }
}
