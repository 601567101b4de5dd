#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace revr {

// (left index, right index) pairs, sorted by left index.
using Matching = std::vector<std::pair<std::size_t, std::size_t>>;

// Maximum-cardinality bipartite matching by augmenting paths (Kuhn).
// Left vertices are tried in order and their candidates in right-index
// order, so the result is deterministic.
Matching maximum_matching(std::size_t n_left, std::size_t n_right,
                          const std::function<bool(std::size_t, std::size_t)>& compatible);

}  // namespace revr
