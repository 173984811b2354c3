#include "likefarm/datamodel.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "jsonl.hpp"
#include "likefarm/error.hpp"

namespace likefarm {

namespace {

constexpr std::array<std::string_view, 6> kPostKindNames = {"text",  "link",   "video",
                                                            "photo", "shared", "other"};

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

std::string_view to_string(PostKind kind) { return kPostKindNames[static_cast<std::size_t>(kind)]; }

PostKind parse_post_kind(std::string_view name) {
  for (std::size_t i = 0; i < kPostKindNames.size(); ++i) {
    if (kPostKindNames[i] == name) return static_cast<PostKind>(i);
  }
  throw InvalidArgument("unknown post kind \"" + std::string(name) + "\"");
}

Label Label::farm(std::string campaign_name) {
  return {LabelKind::Farm, std::move(campaign_name)};
}

Label Label::parse(std::string_view text) {
  if (text == "baseline") return baseline();
  constexpr std::string_view prefix = "farm:";
  if (text.starts_with(prefix) && text.size() > prefix.size()) {
    return farm(std::string(text.substr(prefix.size())));
  }
  return unknown();
}

std::string Label::to_string() const {
  switch (kind) {
    case LabelKind::Farm:
      return "farm:" + campaign;
    case LabelKind::Baseline:
      return "baseline";
    case LabelKind::Unknown:
      break;
  }
  return "unknown";
}

void validate_post(const Post& post) {
  if (post.n_comments < 0) throw InvalidArgument("n_comments must be non-negative");
  if (post.n_likes < 0) throw InvalidArgument("n_likes must be non-negative");
  if (post.kind == PostKind::Text && blank(post.text))
    throw InvalidArgument("text post has empty text");
}

Dataset::Dataset(std::vector<Account> accounts, std::vector<Post> posts,
                 std::vector<LikeEvent> likes, std::vector<Page> pages)
    : accounts_(std::move(accounts)), likes_(std::move(likes)), pages_(std::move(pages)) {
  account_index_.reserve(accounts_.size());
  for (std::size_t i = 0; i < accounts_.size(); ++i) {
    if (!account_index_.emplace(accounts_[i].id, i).second)
      throw InvalidArgument("duplicate account id \"" + accounts_[i].id + "\"");
  }
  page_index_.reserve(pages_.size());
  for (std::size_t i = 0; i < pages_.size(); ++i) {
    if (pages_[i].popularity < 0)
      throw InvalidArgument("page \"" + pages_[i].id + "\" has negative popularity");
    if (!page_index_.emplace(pages_[i].id, i).second)
      throw InvalidArgument("duplicate page id \"" + pages_[i].id + "\"");
  }

  std::vector<std::size_t> counts(accounts_.size() + 1, 0);
  std::vector<std::size_t> owner(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    validate_post(posts[i]);
    auto it = account_index_.find(posts[i].author);
    if (it == account_index_.end())
      throw ReferenceError("post author \"" + posts[i].author + "\" is not a known account");
    owner[i] = it->second;
    ++counts[it->second + 1];
  }
  for (const LikeEvent& like : likes_) {
    if (!account_index_.contains(like.user))
      throw ReferenceError("like user \"" + like.user + "\" is not a known account");
    if (!page_index_.contains(like.page))
      throw ReferenceError("like page \"" + like.page + "\" is not a known page");
  }

  // Counting sort keeps the original order within each author.
  post_offsets_.assign(accounts_.size() + 1, 0);
  for (std::size_t a = 0; a < accounts_.size(); ++a)
    post_offsets_[a + 1] = post_offsets_[a] + counts[a + 1];
  std::vector<std::size_t> cursor(post_offsets_.begin(), post_offsets_.end() - 1);
  posts_.resize(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) posts_[cursor[owner[i]]++] = std::move(posts[i]);
}

const Account* Dataset::find_account(std::string_view id) const {
  auto it = account_index_.find(std::string(id));
  return it == account_index_.end() ? nullptr : &accounts_[it->second];
}

const Page* Dataset::find_page(std::string_view id) const {
  auto it = page_index_.find(std::string(id));
  return it == page_index_.end() ? nullptr : &pages_[it->second];
}

std::span<const Post> Dataset::posts_of(std::string_view id) const {
  auto it = account_index_.find(std::string(id));
  if (it == account_index_.end()) return {};
  const std::size_t a = it->second;
  return std::span<const Post>(posts_).subspan(post_offsets_[a],
                                               post_offsets_[a + 1] - post_offsets_[a]);
}

std::vector<std::string> Dataset::campaigns() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Account& a : accounts_) {
    if (a.label.is_farm() && seen.insert(a.label.campaign).second) out.push_back(a.label.campaign);
  }
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return accounts_ == other.accounts_ && posts_ == other.posts_ && likes_ == other.likes_ &&
         pages_ == other.pages_;
}

Dataset load_dataset(const std::filesystem::path& accounts_path,
                     const std::filesystem::path& posts_path,
                     const std::filesystem::path& likes_path,
                     const std::optional<std::filesystem::path>& pages_path) {
  using detail::Json;
  std::vector<Account> accounts;
  detail::for_each_jsonl(accounts_path, [&](const Json& obj, std::size_t) {
    Account a;
    a.id = detail::require_string(obj, "id");
    auto label = obj.find("label");
    if (label != obj.end()) {
      if (!label->is_string()) throw InvalidArgument("field \"label\" must be a string");
      a.label = Label::parse(label->get<std::string>());
    }
    auto ratio = obj.find("english_ratio");
    if (ratio != obj.end() && !ratio->is_null()) {
      const double r = detail::require_number(obj, "english_ratio");
      if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("english_ratio must lie in [0,1]");
      a.english_ratio_cache = r;
    }
    accounts.push_back(std::move(a));
  });

  std::vector<Post> posts;
  detail::for_each_jsonl(posts_path, [&](const Json& obj, std::size_t) {
    Post p;
    p.author = detail::require_string(obj, "author");
    p.kind = parse_post_kind(detail::require_string(obj, "kind"));
    auto text = obj.find("text");
    if (text != obj.end()) {
      if (!text->is_string()) throw InvalidArgument("field \"text\" must be a string");
      p.text = text->get<std::string>();
    }
    p.n_comments = detail::require_int(obj, "n_comments");
    p.n_likes = detail::require_int(obj, "n_likes");
    p.is_shared = detail::require_bool(obj, "is_shared");
    p.timestamp = detail::require_int(obj, "ts");
    validate_post(p);
    posts.push_back(std::move(p));
  });

  std::vector<LikeEvent> likes;
  detail::for_each_jsonl(likes_path, [&](const Json& obj, std::size_t) {
    likes.push_back({detail::require_string(obj, "user"), detail::require_string(obj, "page"),
                     detail::require_int(obj, "ts")});
  });

  std::vector<Page> pages;
  if (pages_path) {
    detail::for_each_jsonl(*pages_path, [&](const Json& obj, std::size_t) {
      Page p{detail::require_string(obj, "id"), detail::require_int(obj, "popularity")};
      if (p.popularity < 0) throw InvalidArgument("popularity must be non-negative");
      pages.push_back(std::move(p));
    });
  } else {
    std::map<std::string, std::set<std::string>> likers;
    for (const LikeEvent& like : likes) likers[like.page].insert(like.user);
    for (const auto& [id, users] : likers)
      pages.push_back({id, static_cast<std::int64_t>(users.size())});
  }

  return Dataset(std::move(accounts), std::move(posts), std::move(likes), std::move(pages));
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
  const auto pages = dir / "pages.jsonl";
  return load_dataset(dir / "accounts.jsonl", dir / "posts.jsonl", dir / "likes.jsonl",
                      std::filesystem::exists(pages) ? std::optional(pages) : std::nullopt);
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  using detail::Json;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  {
    auto out = detail::open_for_write(dir / "accounts.jsonl");
    for (const Account& a : dataset.accounts()) {
      Json obj;
      obj["id"] = a.id;
      obj["label"] = a.label.to_string();
      if (a.english_ratio_cache) obj["english_ratio"] = *a.english_ratio_cache;
      out << obj.dump() << '\n';
    }
  }
  {
    auto out = detail::open_for_write(dir / "posts.jsonl");
    for (const Post& p : dataset.posts()) {
      Json obj;
      obj["author"] = p.author;
      obj["kind"] = to_string(p.kind);
      obj["text"] = p.text;
      obj["n_comments"] = p.n_comments;
      obj["n_likes"] = p.n_likes;
      obj["is_shared"] = p.is_shared;
      obj["ts"] = p.timestamp;
      out << obj.dump() << '\n';
    }
  }
  {
    auto out = detail::open_for_write(dir / "likes.jsonl");
    for (const LikeEvent& l : dataset.likes()) {
      Json obj;
      obj["user"] = l.user;
      obj["page"] = l.page;
      obj["ts"] = l.timestamp;
      out << obj.dump() << '\n';
    }
  }
  {
    auto out = detail::open_for_write(dir / "pages.jsonl");
    for (const Page& p : dataset.pages()) {
      Json obj;
      obj["id"] = p.id;
      obj["popularity"] = p.popularity;
      out << obj.dump() << '\n';
    }
  }
}

}  // namespace likefarm
