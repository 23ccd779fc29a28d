#include "latparse/gold_targets.hpp"

#include <algorithm>

#include "latparse/error.hpp"
#include "latparse/morph_analyzer.hpp"

namespace latparse {

std::size_t GoldTargets::aux_headed() const {
  return static_cast<std::size_t>(std::count(gold_head.begin(), gold_head.end(), LinearizedLattice::kAux));
}

GoldTargets build_gold_targets(const LinearizedLattice& lin, const GoldSentence& gold,
                               const OutputInventory& inventory, bool aux_label_targets) {
  const std::vector<std::size_t> path = find_gold_path(lin.delinearize(), gold);
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (path[j] == 0) {
      throw DataError("sentence '" + gold.sent_id + "': gold segmentation of token " + std::to_string(j + 1) +
                      " ('" + gold.tokens[j].form + "') is not in the lattice");
    }
  }

  const std::size_t n = lin.size();
  GoldTargets t;
  t.gold_head.assign(n, kNpos);
  t.gold_label.assign(n, kNpos);
  for (std::size_t k = 0; k < kTaskCount; ++k) {
    t.gold_tags[k].assign(n, kNpos);
    t.loss_mask[k].assign(n, false);
  }

  const std::size_t aux_label = aux_label_targets ? inventory.aux_label() : kNpos;
  for (std::size_t pos = 2; pos < n; ++pos) {
    t.gold_head[pos] = LinearizedLattice::kAux;
    t.gold_label[pos] = aux_label;
  }

  // Node position of every gold segment, in gold segment order.
  std::vector<std::size_t> node_of;
  for (std::size_t j = 1; j <= path.size(); ++j) {
    const NodeRange r = lin.segments_of(j, path[j - 1]);
    for (std::size_t pos = r.begin; pos < r.end; ++pos) node_of.push_back(pos);
  }

  const auto segments = gold.segments();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const GoldSegment& seg = *segments[s];
    const std::size_t pos = node_of[s];
    t.gold_head[pos] = seg.head == 0 ? LinearizedLattice::kRoot : node_of.at(seg.head - 1);
    const std::size_t label = inventory.label_index(seg.deprel);
    if (label == kNpos) {
      throw DataError("sentence '" + gold.sent_id + "': label '" + seg.deprel + "' not in the label set");
    }
    t.gold_label[pos] = label;
    for (std::size_t k = 0; k < kTaskCount; ++k) {
      const auto task = static_cast<FeatureTask>(k);
      if (!inventory.task_enabled(task)) continue;
      const std::string value = task_value(seg, task);
      const std::size_t tag = inventory.tag_index(task, value);
      if (tag == kNpos) {
        throw DataError("sentence '" + gold.sent_id + "': " + std::string(kTaskNames[k]) + " value '" + value +
                        "' not in the tag set");
      }
      t.gold_tags[k][pos] = tag;
      t.loss_mask[k][pos] = true;
    }
  }
  return t;
}

}  // namespace latparse
