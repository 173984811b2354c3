#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "likefarm/datamodel.hpp"

namespace likefarm {

/// Binary user x page biadjacency matrix stored both row-wise (CSR, user ->
/// pages) and column-wise (CSC, page -> users).
///
/// Users and pages are indexed in lexicographic id order, so the graph does
/// not depend on the order of the input events. Entries are deduplicated.
class BipartiteGraph {
 public:
  using Index = std::uint32_t;

  BipartiteGraph() = default;

  /// Builds a graph from explicit index pairs. Duplicate pairs collapse to
  /// one edge. Ids are kept in the order given (callers normally pass sorted
  /// ids).
  static BipartiteGraph from_edges(std::vector<std::string> user_ids,
                                   std::vector<std::string> page_ids,
                                   std::span<const std::pair<Index, Index>> edges);

  std::size_t n_users() const { return user_ids_.size(); }
  std::size_t n_pages() const { return page_ids_.size(); }
  std::size_t n_edges() const { return row_cols_.size(); }
  bool empty() const { return n_edges() == 0; }

  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& page_ids() const { return page_ids_; }

  std::span<const Index> pages_of(std::size_t user) const {
    return {row_cols_.data() + row_ptr_[user], row_ptr_[user + 1] - row_ptr_[user]};
  }
  std::span<const Index> users_of(std::size_t page) const {
    return {col_rows_.data() + col_ptr_[page], col_ptr_[page + 1] - col_ptr_[page]};
  }
  std::size_t user_degree(std::size_t user) const { return row_ptr_[user + 1] - row_ptr_[user]; }
  std::size_t page_degree(std::size_t page) const { return col_ptr_[page + 1] - col_ptr_[page]; }

  std::optional<std::size_t> user_index(std::string_view id) const;
  std::optional<std::size_t> page_index(std::string_view id) const;

  /// One LikeEvent (timestamp 0) per edge, row-major.
  std::vector<LikeEvent> to_likes() const;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> page_ids_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Index> row_cols_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<Index> col_rows_;
  std::unordered_map<std::string, std::size_t> user_lookup_;
  std::unordered_map<std::string, std::size_t> page_lookup_;
};

/// Deduplicates like events into a graph and removes users with fewer than
/// `min_user_degree` distinct pages and pages with fewer than
/// `min_page_degree` distinct users, repeating until nothing changes.
/// Throws EmptyGraphError when no edge survives.
BipartiteGraph build_bipartite(std::span<const LikeEvent> likes, std::size_t min_user_degree,
                               std::size_t min_page_degree);

}  // namespace likefarm
