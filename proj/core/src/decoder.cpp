#include "latparse/decoder.hpp"

#include <limits>

#include "latparse/error.hpp"
#include "latparse/mst.hpp"

namespace latparse {

namespace {

constexpr std::size_t kRoot = LinearizedLattice::kRoot;
constexpr std::size_t kAux = LinearizedLattice::kAux;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using Index = Eigen::Index;

double score(const Matrix& m, std::size_t dep, std::size_t head) {
  return m(static_cast<Index>(dep), static_cast<Index>(head));
}

std::size_t argmax_excluding(const Eigen::Ref<const Eigen::RowVectorXd>& row, std::size_t skip) {
  std::size_t best = kNpos;
  for (Index c = 0; c < row.size(); ++c) {
    if (static_cast<std::size_t>(c) == skip) continue;
    if (best == kNpos || row(c) > row(static_cast<Index>(best))) best = static_cast<std::size_t>(c);
  }
  return best;
}

}  // namespace

std::vector<std::size_t> ConstraintMask::permitted_heads(std::size_t dep) const {
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < n_; ++h) {
    if (allowed(dep, h)) out.push_back(h);
  }
  return out;
}

ConstraintMask base_mask(const LinearizedLattice& lin) {
  const std::size_t n = lin.size();
  ConstraintMask mask(n);
  const auto& nodes = lin.nodes();
  for (std::size_t d = 2; d < n; ++d) {
    for (std::size_t h = 0; h < n; ++h) {
      if (h == d) continue;
      if (h >= 2 && nodes[h].token_idx == nodes[d].token_idx && nodes[h].analysis_idx != nodes[d].analysis_idx) {
        continue;
      }
      mask.set(d, h, true);
    }
  }
  return mask;
}

std::vector<std::size_t> greedy_heads(const Matrix& head_scores, const ConstraintMask& mask) {
  const std::size_t n = mask.size();
  std::vector<std::size_t> heads(n, kNpos);
  for (std::size_t d = 2; d < n; ++d) {
    double best = kNegInf;
    for (std::size_t h = 0; h < n; ++h) {
      if (!mask.allowed(d, h)) continue;
      const double s = score(head_scores, d, h);
      if (heads[d] == kNpos || s > best) {
        best = s;
        heads[d] = h;
      }
    }
    if (heads[d] == kNpos) throw DataError("node " + std::to_string(d) + " has no permitted head");
  }
  return heads;
}

std::vector<std::size_t> select_analyses(const LinearizedLattice& lin, std::span<const std::size_t> greedy,
                                         const Matrix& head_scores, const ConstraintMask& mask,
                                         AnalysisScoring scoring) {
  std::vector<std::size_t> chosen;
  chosen.reserve(lin.token_count());
  for (std::size_t j = 1; j <= lin.token_count(); ++j) {
    const std::size_t k = lin.analysis_count(j);

    std::size_t fully_attached = 0;
    std::size_t candidate = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      const auto range = lin.segments_of(j, i);
      bool all_non_aux = true;
      for (std::size_t d = range.begin; d < range.end; ++d) all_non_aux = all_non_aux && greedy[d] != kAux;
      if (all_non_aux) {
        ++fully_attached;
        candidate = i;
      }
    }
    if (fully_attached == 1) {
      chosen.push_back(candidate);
      continue;
    }

    std::size_t best_analysis = 1;
    double best_score = kNegInf;
    for (std::size_t i = 1; i <= k; ++i) {
      const auto range = lin.segments_of(j, i);
      double agg = scoring == AnalysisScoring::MaxSegment ? kNegInf : 0.0;
      for (std::size_t d = range.begin; d < range.end; ++d) {
        double seg_best = kNegInf;
        for (std::size_t h = 0; h < mask.size(); ++h) {
          if (h == kAux || !mask.allowed(d, h)) continue;
          seg_best = std::max(seg_best, score(head_scores, d, h));
        }
        if (scoring == AnalysisScoring::MaxSegment) {
          agg = std::max(agg, seg_best);
        } else {
          agg += seg_best / static_cast<double>(range.size());
        }
      }
      if (i == 1 || agg > best_score) {
        best_score = agg;
        best_analysis = i;
      }
    }
    chosen.push_back(best_analysis);
  }
  return chosen;
}

std::vector<std::size_t> chosen_nodes(const LinearizedLattice& lin, std::span<const std::size_t> chosen) {
  if (chosen.size() != lin.token_count()) {
    throw DataError("expected one chosen analysis per token (" + std::to_string(lin.token_count()) + "), got " +
                    std::to_string(chosen.size()));
  }
  std::vector<std::size_t> nodes;
  for (std::size_t j = 1; j <= lin.token_count(); ++j) {
    const auto range = lin.segments_of(j, chosen[j - 1]);
    for (std::size_t d = range.begin; d < range.end; ++d) nodes.push_back(d);
  }
  return nodes;
}

ConstraintMask apply_constraints(const LinearizedLattice& lin, std::span<const std::size_t> chosen) {
  const std::size_t n = lin.size();
  const auto nodes = chosen_nodes(lin, chosen);
  std::vector<bool> is_chosen(n, false);
  for (auto d : nodes) is_chosen[d] = true;

  ConstraintMask mask(n);
  for (std::size_t d = 2; d < n; ++d) {
    if (!is_chosen[d]) {
      mask.set(d, kAux, true);
      continue;
    }
    mask.set(d, kRoot, true);
    for (auto h : nodes) {
      if (h != d) mask.set(d, h, true);
    }
  }
  return mask;
}

std::vector<std::size_t> mst_decode(const Matrix& head_scores, const ConstraintMask& mask,
                                    std::span<const std::size_t> chosen, const MstOptions& options) {
  const std::size_t n = mask.size();
  if (chosen.empty()) throw DataError("mst_decode needs at least one chosen node");

  std::vector<std::size_t> heads(n, kNpos);
  std::vector<bool> is_chosen(n, false);
  for (auto d : chosen) is_chosen[d] = true;

  if (options.scope == MstScope::ChosenOnly) {
    // Local graph: 0 = ROOT, then the chosen nodes in order.
    const std::size_t m = chosen.size() + 1;
    std::vector<std::size_t> local_to_node(m, kRoot);
    for (std::size_t i = 0; i < chosen.size(); ++i) local_to_node[i + 1] = chosen[i];
    Matrix w = Matrix::Constant(static_cast<Index>(m), static_cast<Index>(m), kNegInf);
    for (std::size_t ld = 1; ld < m; ++ld) {
      for (std::size_t lh = 0; lh < m; ++lh) {
        const std::size_t d = local_to_node[ld];
        const std::size_t h = local_to_node[lh];
        if (lh != ld && mask.allowed(d, h)) w(static_cast<Index>(lh), static_cast<Index>(ld)) = score(head_scores, d, h);
      }
    }
    const auto local = max_arborescence(w, options.single_root);
    if (local.empty()) throw DataError("no spanning tree exists under the constraint mask");
    for (std::size_t ld = 1; ld < m; ++ld) heads[local_to_node[ld]] = local_to_node[local[ld]];
    for (std::size_t d = 2; d < n; ++d) {
      if (!is_chosen[d]) heads[d] = kAux;
    }
    return heads;
  }

  // AllNodes: the same search over every node, with AUX pinned under ROOT
  // and exempt from the single-root rule.
  Matrix w = Matrix::Constant(static_cast<Index>(n), static_cast<Index>(n), kNegInf);
  w(static_cast<Index>(kRoot), static_cast<Index>(kAux)) = 0.0;
  for (std::size_t d = 2; d < n; ++d) {
    for (std::size_t h = 0; h < n; ++h) {
      if (h != d && mask.allowed(d, h)) w(static_cast<Index>(h), static_cast<Index>(d)) = score(head_scores, d, h);
    }
  }
  const std::size_t exempt[] = {kAux};
  auto all = max_arborescence(w, options.single_root, exempt);
  if (all.empty()) throw DataError("no spanning tree exists under the constraint mask");
  all[kAux] = kNpos;
  return all;
}

double tree_score(const Matrix& head_scores, std::span<const std::size_t> heads,
                  std::span<const std::size_t> nodes) {
  double total = 0.0;
  for (auto d : nodes) total += score(head_scores, d, heads[d]);
  return total;
}

JointParse decode_with_analyses(const LinearizedLattice& lin, const ScoreSet& scores,
                                const OutputInventory& inventory, std::span<const std::size_t> chosen,
                                const DecoderOptions& options) {
  if (scores.node_count() != lin.size()) {
    throw DataError("score set covers " + std::to_string(scores.node_count()) + " nodes, lattice has " +
                    std::to_string(lin.size()));
  }
  const auto mask = apply_constraints(lin, chosen);
  const auto nodes = chosen_nodes(lin, chosen);
  auto heads = mst_decode(scores.head_scores, mask, nodes, options.mst);

  JointParse parse;
  parse.sent_id = lin.sent_id();
  parse.tokens = lin.tokens();
  parse.chosen_analysis.assign(chosen.begin(), chosen.end());
  parse.node_heads = heads;

  std::vector<std::size_t> output_pos(lin.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) output_pos[nodes[i]] = i + 1;

  const std::size_t aux_label = inventory.label_index(kAuxDiscard);
  for (auto d : nodes) {
    const auto& node = lin.node(d);
    ParsedSegment seg;
    seg.form = node.segment.form;
    seg.node = d;
    seg.token_idx = node.token_idx;
    const std::size_t h = heads[d];
    seg.head = h == kRoot ? 0 : output_pos[h];

    std::size_t best_label = kNpos;
    for (std::size_t l = 0; l < scores.label_count(); ++l) {
      if (l == aux_label) continue;
      if (best_label == kNpos || scores.label_score(d, h, l) > scores.label_score(d, h, best_label)) best_label = l;
    }
    if (best_label != kNpos && best_label < inventory.labels.size()) seg.label = inventory.labels[best_label];

    for (std::size_t t = 0; t < kTaskCount; ++t) {
      const auto& logits = scores.mtl_logits[t];
      if (logits.cols() == 0 || inventory.tag_sets[t].empty()) continue;
      const auto best = argmax_excluding(logits.row(static_cast<Index>(d)), kNpos);
      seg.tags[t] = inventory.tag_sets[t].at(best);
    }
    parse.segments.push_back(std::move(seg));
  }
  return parse;
}

JointParse decode(const LinearizedLattice& lin, const ScoreSet& scores, const OutputInventory& inventory,
                  const DecoderOptions& options) {
  const auto base = base_mask(lin);
  const auto greedy = greedy_heads(scores.head_scores, base);
  const auto chosen = select_analyses(lin, greedy, scores.head_scores, base, options.scoring);
  return decode_with_analyses(lin, scores, inventory, chosen, options);
}

}  // namespace latparse
