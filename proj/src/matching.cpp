#include "revr/matching.hpp"

#include <algorithm>

namespace revr {

namespace {

constexpr std::size_t kFree = static_cast<std::size_t>(-1);

bool augment(std::size_t left, const std::vector<std::vector<std::size_t>>& adj,
             std::vector<std::size_t>& match_right, std::vector<char>& visited) {
  for (std::size_t right : adj[left]) {
    if (visited[right]) continue;
    visited[right] = 1;
    if (match_right[right] == kFree || augment(match_right[right], adj, match_right, visited)) {
      match_right[right] = left;
      return true;
    }
  }
  return false;
}

}  // namespace

Matching maximum_matching(std::size_t n_left, std::size_t n_right,
                          const std::function<bool(std::size_t, std::size_t)>& compatible) {
  std::vector<std::vector<std::size_t>> adj(n_left);
  for (std::size_t i = 0; i < n_left; ++i) {
    for (std::size_t j = 0; j < n_right; ++j) {
      if (compatible(i, j)) adj[i].push_back(j);
    }
  }
  std::vector<std::size_t> match_right(n_right, kFree);
  std::vector<char> visited(n_right);
  for (std::size_t i = 0; i < n_left; ++i) {
    std::fill(visited.begin(), visited.end(), 0);
    augment(i, adj, match_right, visited);
  }
  Matching out;
  for (std::size_t j = 0; j < n_right; ++j) {
    if (match_right[j] != kFree) out.emplace_back(match_right[j], j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace revr
