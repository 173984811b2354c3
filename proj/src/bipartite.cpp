#include "likefarm/bipartite.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "likefarm/error.hpp"

namespace likefarm {

BipartiteGraph BipartiteGraph::from_edges(std::vector<std::string> user_ids,
                                          std::vector<std::string> page_ids,
                                          std::span<const std::pair<Index, Index>> edges) {
  BipartiteGraph g;
  g.user_ids_ = std::move(user_ids);
  g.page_ids_ = std::move(page_ids);

  std::vector<std::pair<Index, Index>> sorted(edges.begin(), edges.end());
  for (const auto& [u, p] : sorted) {
    if (u >= g.user_ids_.size() || p >= g.page_ids_.size())
      throw InvalidArgument("edge index out of range");
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  const std::size_t nu = g.user_ids_.size();
  const std::size_t np = g.page_ids_.size();
  g.row_ptr_.assign(nu + 1, 0);
  g.col_ptr_.assign(np + 1, 0);
  for (const auto& [u, p] : sorted) {
    ++g.row_ptr_[u + 1];
    ++g.col_ptr_[p + 1];
  }
  std::partial_sum(g.row_ptr_.begin(), g.row_ptr_.end(), g.row_ptr_.begin());
  std::partial_sum(g.col_ptr_.begin(), g.col_ptr_.end(), g.col_ptr_.begin());

  g.row_cols_.resize(sorted.size());
  g.col_rows_.resize(sorted.size());
  std::vector<std::size_t> col_cursor(g.col_ptr_.begin(), g.col_ptr_.end() - 1);
  for (std::size_t e = 0; e < sorted.size(); ++e) {
    g.row_cols_[e] = sorted[e].second;  // sorted by (u, p) so rows are contiguous
    g.col_rows_[col_cursor[sorted[e].second]++] = sorted[e].first;
  }

  for (std::size_t i = 0; i < nu; ++i) g.user_lookup_.emplace(g.user_ids_[i], i);
  for (std::size_t i = 0; i < np; ++i) g.page_lookup_.emplace(g.page_ids_[i], i);
  return g;
}

std::optional<std::size_t> BipartiteGraph::user_index(std::string_view id) const {
  auto it = user_lookup_.find(std::string(id));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> BipartiteGraph::page_index(std::string_view id) const {
  auto it = page_lookup_.find(std::string(id));
  if (it == page_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<LikeEvent> BipartiteGraph::to_likes() const {
  std::vector<LikeEvent> out;
  out.reserve(n_edges());
  for (std::size_t u = 0; u < n_users(); ++u) {
    for (Index p : pages_of(u)) out.push_back({user_ids_[u], page_ids_[p], 0});
  }
  return out;
}

BipartiteGraph build_bipartite(std::span<const LikeEvent> likes, std::size_t min_user_degree,
                               std::size_t min_page_degree) {
  // Index ids in sorted order so the result is independent of event order.
  std::map<std::string_view, std::size_t> users;
  std::map<std::string_view, std::size_t> pages;
  for (const LikeEvent& like : likes) {
    users.emplace(like.user, 0);
    pages.emplace(like.page, 0);
  }
  std::size_t next = 0;
  for (auto& [id, idx] : users) idx = next++;
  next = 0;
  for (auto& [id, idx] : pages) idx = next++;

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(likes.size());
  for (const LikeEvent& like : likes) edges.emplace_back(users[like.user], pages[like.page]);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::vector<bool> user_alive(users.size(), true);
  std::vector<bool> page_alive(pages.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> udeg(users.size(), 0);
    std::vector<std::size_t> pdeg(pages.size(), 0);
    for (const auto& [u, p] : edges) {
      if (user_alive[u] && page_alive[p]) {
        ++udeg[u];
        ++pdeg[p];
      }
    }
    for (std::size_t u = 0; u < users.size(); ++u) {
      if (user_alive[u] && (udeg[u] < min_user_degree || udeg[u] == 0)) {
        user_alive[u] = false;
        changed = true;
      }
    }
    for (std::size_t p = 0; p < pages.size(); ++p) {
      if (page_alive[p] && (pdeg[p] < min_page_degree || pdeg[p] == 0)) {
        page_alive[p] = false;
        changed = true;
      }
    }
  }

  std::vector<std::string> user_ids;
  std::vector<std::string> page_ids;
  std::vector<BipartiteGraph::Index> user_new(users.size(), 0);
  std::vector<BipartiteGraph::Index> page_new(pages.size(), 0);
  for (const auto& [id, idx] : users) {
    if (user_alive[idx]) {
      user_new[idx] = static_cast<BipartiteGraph::Index>(user_ids.size());
      user_ids.emplace_back(id);
    }
  }
  for (const auto& [id, idx] : pages) {
    if (page_alive[idx]) {
      page_new[idx] = static_cast<BipartiteGraph::Index>(page_ids.size());
      page_ids.emplace_back(id);
    }
  }

  std::vector<std::pair<BipartiteGraph::Index, BipartiteGraph::Index>> kept;
  for (const auto& [u, p] : edges) {
    if (user_alive[u] && page_alive[p]) kept.emplace_back(user_new[u], page_new[p]);
  }
  if (kept.empty()) {
    throw EmptyGraphError("bipartite graph is empty after degree filtering (min user degree " +
                          std::to_string(min_user_degree) + ", min page degree " +
                          std::to_string(min_page_degree) + ")");
  }
  return BipartiteGraph::from_edges(std::move(user_ids), std::move(page_ids), kept);
}

}  // namespace likefarm
