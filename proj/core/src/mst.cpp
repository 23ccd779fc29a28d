#include "latparse/mst.hpp"

#include <algorithm>
#include <limits>

namespace latparse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Index = Eigen::Index;

std::vector<std::size_t> chu_liu_edmonds(const Matrix& w) {
  const std::size_t n = static_cast<std::size_t>(w.rows());
  std::vector<std::size_t> head(n, kNpos);
  for (std::size_t d = 1; d < n; ++d) {
    double best = kNegInf;
    for (std::size_t h = 0; h < n; ++h) {
      if (h == d) continue;
      const double s = w(static_cast<Index>(h), static_cast<Index>(d));
      if (s > best) {
        best = s;
        head[d] = h;
      }
    }
    if (head[d] == kNpos) return {};
  }

  // Look for a cycle among the greedy heads.
  std::vector<std::size_t> cycle;
  std::vector<std::size_t> mark(n, kNpos);
  for (std::size_t start = 1; start < n && cycle.empty(); ++start) {
    std::size_t v = start;
    while (v != 0 && mark[v] == kNpos) {
      mark[v] = start;
      v = head[v];
    }
    if (v != 0 && mark[v] == start) {
      std::size_t u = v;
      do {
        cycle.push_back(u);
        u = head[u];
      } while (u != v);
    }
  }
  if (cycle.empty()) return head;

  std::vector<bool> in_cycle(n, false);
  for (auto v : cycle) in_cycle[v] = true;

  // Contract the cycle into one node placed last.
  std::vector<std::size_t> to_new(n, kNpos);
  std::vector<std::size_t> to_old;
  for (std::size_t v = 0; v < n; ++v) {
    if (!in_cycle[v]) {
      to_new[v] = to_old.size();
      to_old.push_back(v);
    }
  }
  const std::size_t c = to_old.size();
  const std::size_t m = c + 1;
  Matrix cw = Matrix::Constant(static_cast<Index>(m), static_cast<Index>(m), kNegInf);
  std::vector<std::size_t> enter_at(n, kNpos);   // outside u -> cycle node it enters
  std::vector<std::size_t> leave_from(n, kNpos);  // outside v <- cycle node it leaves

  for (std::size_t u = 0; u < n; ++u) {
    if (in_cycle[u]) continue;
    const Index nu = static_cast<Index>(to_new[u]);
    for (std::size_t v = 1; v < n; ++v) {
      if (in_cycle[v] || v == u) continue;
      cw(nu, static_cast<Index>(to_new[v])) = w(static_cast<Index>(u), static_cast<Index>(v));
    }
    double best = kNegInf;
    for (auto v : cycle) {
      const double s = w(static_cast<Index>(u), static_cast<Index>(v));
      if (s == kNegInf) continue;
      const double gain = s - w(static_cast<Index>(head[v]), static_cast<Index>(v));
      if (enter_at[u] == kNpos || gain > best) {
        best = gain;
        enter_at[u] = v;
      }
    }
    cw(nu, static_cast<Index>(c)) = enter_at[u] == kNpos ? kNegInf : best;
  }
  for (std::size_t v = 1; v < n; ++v) {
    if (in_cycle[v]) continue;
    double best = kNegInf;
    for (auto x : cycle) {
      const double s = w(static_cast<Index>(x), static_cast<Index>(v));
      if (s > best) {
        best = s;
        leave_from[v] = x;
      }
    }
    cw(static_cast<Index>(c), static_cast<Index>(to_new[v])) = best;
  }

  const auto sub = chu_liu_edmonds(cw);
  if (sub.empty()) return {};

  std::vector<std::size_t> out(n, kNpos);
  for (std::size_t v = 1; v < n; ++v) {
    if (in_cycle[v]) continue;
    const std::size_t h = sub[to_new[v]];
    out[v] = h == c ? leave_from[v] : to_old[h];
  }
  const std::size_t entry_head = to_old[sub[c]];
  for (auto v : cycle) out[v] = head[v];
  out[enter_at[entry_head]] = entry_head;
  return out;
}

}  // namespace

double arborescence_weight(const Matrix& weights, std::span<const std::size_t> heads) {
  double total = 0.0;
  for (std::size_t d = 1; d < heads.size(); ++d) {
    total += weights(static_cast<Index>(heads[d]), static_cast<Index>(d));
  }
  return total;
}

std::vector<std::size_t> max_arborescence(const Matrix& weights, bool single_root,
                                          std::span<const std::size_t> exempt) {
  const std::size_t n = static_cast<std::size_t>(weights.rows());
  if (n <= 1) return std::vector<std::size_t>(n, kNpos);

  auto heads = chu_liu_edmonds(weights);
  if (!single_root || heads.empty()) return heads;

  std::vector<bool> is_exempt(n, false);
  for (auto e : exempt) is_exempt[e] = true;
  std::size_t root_children = 0;
  for (std::size_t d = 1; d < n; ++d) {
    if (!is_exempt[d] && heads[d] == 0) ++root_children;
  }
  if (root_children <= 1) return heads;

  // Try each candidate root child in turn; the best single-rooted tree wins,
  // lowest candidate index on ties.
  std::vector<std::size_t> best;
  double best_weight = kNegInf;
  Matrix restricted = weights;
  for (std::size_t r = 1; r < n; ++r) {
    if (is_exempt[r] || weights(0, static_cast<Index>(r)) == kNegInf) continue;
    for (std::size_t d = 1; d < n; ++d) {
      if (!is_exempt[d]) restricted(0, static_cast<Index>(d)) = d == r ? weights(0, static_cast<Index>(d)) : kNegInf;
    }
    auto candidate = chu_liu_edmonds(restricted);
    if (candidate.empty()) continue;
    const double s = arborescence_weight(weights, candidate);
    if (best.empty() || s > best_weight) {
      best_weight = s;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace latparse
