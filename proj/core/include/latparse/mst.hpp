#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latparse/scores.hpp"

namespace latparse {

/// Maximum-weight spanning arborescence rooted at node 0 (Chu-Liu/Edmonds).
///
/// `weights(h, d)` is the weight of arc h -> d; -infinity forbids the arc.
/// Returns one head per node with heads[0] == kNpos, or an empty vector when
/// no arborescence exists. With `single_root`, exactly one node outside
/// `exempt` may attach to node 0; exempt nodes may attach to it freely.
std::vector<std::size_t> max_arborescence(const Matrix& weights, bool single_root,
                                          std::span<const std::size_t> exempt = {});

/// Sum of weights(heads[d], d) for d = 1..n-1.
double arborescence_weight(const Matrix& weights, std::span<const std::size_t> heads);

}  // namespace latparse
