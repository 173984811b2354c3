#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace likefarm {

enum class PostKind : std::uint8_t { Text, Link, Video, Photo, Shared, Other };

inline constexpr std::array<PostKind, 6> kAllPostKinds = {
    PostKind::Text,  PostKind::Link,   PostKind::Video,
    PostKind::Photo, PostKind::Shared, PostKind::Other};

std::string_view to_string(PostKind kind);
/// Parses the lowercase wire name ("text", "link", ...). Throws InvalidArgument.
PostKind parse_post_kind(std::string_view name);

enum class LabelKind : std::uint8_t { Farm, Baseline, Unknown };

/// Ground-truth class of an account. Farm labels carry the campaign name.
struct Label {
  LabelKind kind = LabelKind::Unknown;
  std::string campaign;

  static Label farm(std::string campaign_name);
  static Label baseline() { return {LabelKind::Baseline, {}}; }
  static Label unknown() { return {}; }

  /// Accepts "farm:<campaign>", "baseline" and "unknown"; anything else is
  /// Unknown.
  static Label parse(std::string_view text);
  std::string to_string() const;

  bool is_farm() const { return kind == LabelKind::Farm; }
  bool is_baseline() const { return kind == LabelKind::Baseline; }
  bool is_known() const { return kind != LabelKind::Unknown; }

  bool operator==(const Label&) const = default;
};

struct Account {
  std::string id;
  Label label;
  std::optional<double> english_ratio_cache;

  bool operator==(const Account&) const = default;
};

struct Post {
  std::string author;
  PostKind kind = PostKind::Text;
  std::string text;
  std::int64_t n_comments = 0;
  std::int64_t n_likes = 0;
  bool is_shared = false;
  std::int64_t timestamp = 0;

  bool operator==(const Post&) const = default;
};

struct LikeEvent {
  std::string user;
  std::string page;
  std::int64_t timestamp = 0;

  bool operator==(const LikeEvent&) const = default;
};

struct Page {
  std::string id;
  std::int64_t popularity = 0;

  bool operator==(const Page&) const = default;
};

/// Cross-referenced collection of accounts, posts, likes and pages.
///
/// Construction validates every invariant (unique ids, non-negative counts,
/// resolvable references) and canonicalises post order: posts are grouped
/// by author following account order, keeping the input order within each
/// author. The object is immutable afterwards.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Account> accounts, std::vector<Post> posts,
          std::vector<LikeEvent> likes, std::vector<Page> pages);

  const std::vector<Account>& accounts() const { return accounts_; }
  const std::vector<Post>& posts() const { return posts_; }
  const std::vector<LikeEvent>& likes() const { return likes_; }
  const std::vector<Page>& pages() const { return pages_; }

  const Account* find_account(std::string_view id) const;
  const Page* find_page(std::string_view id) const;

  /// Posts authored by `id`; empty for unknown ids.
  std::span<const Post> posts_of(std::string_view id) const;

  /// Distinct farm campaign names in account order of first appearance.
  std::vector<std::string> campaigns() const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<Account> accounts_;
  std::vector<Post> posts_;
  std::vector<LikeEvent> likes_;
  std::vector<Page> pages_;
  std::unordered_map<std::string, std::size_t> account_index_;
  std::unordered_map<std::string, std::size_t> page_index_;
  std::vector<std::size_t> post_offsets_;  // size accounts+1
};

/// Validates a single post against the record invariants. Throws
/// InvalidArgument with a description of the violation.
void validate_post(const Post& post);

/// Reads the JSONL files. When `pages_path` is absent, pages are derived
/// from the like events with popularity equal to the number of distinct
/// likers in the file.
Dataset load_dataset(const std::filesystem::path& accounts_path,
                     const std::filesystem::path& posts_path,
                     const std::filesystem::path& likes_path,
                     const std::optional<std::filesystem::path>& pages_path = std::nullopt);

/// Loads accounts.jsonl, posts.jsonl, likes.jsonl and (if present)
/// pages.jsonl from `dir`.
Dataset load_dataset_dir(const std::filesystem::path& dir);

/// Writes the four JSONL files into `dir` (created if missing).
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

}  // namespace likefarm
