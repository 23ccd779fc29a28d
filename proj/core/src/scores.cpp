#include "latparse/scores.hpp"

#include <algorithm>
#include <set>

#include "latparse/error.hpp"

namespace latparse {

namespace {

std::size_t find_index(const std::vector<std::string>& items, std::string_view value) {
  const auto it = std::find(items.begin(), items.end(), value);
  return it == items.end() ? kNpos : static_cast<std::size_t>(it - items.begin());
}

}  // namespace

std::size_t OutputInventory::label_index(std::string_view label) const { return find_index(labels, label); }

std::size_t OutputInventory::aux_label() const {
  const std::size_t idx = label_index(kAuxDiscard);
  if (idx == kNpos) throw DataError("label set lacks the reserved label 'aux-discard'");
  return idx;
}

std::size_t OutputInventory::tag_index(FeatureTask task, std::string_view tag) const {
  return find_index(tag_sets[static_cast<std::size_t>(task)], tag);
}

OutputInventory OutputInventory::from_treebank(const std::vector<GoldSentence>& treebank,
                                               const std::array<bool, kTaskCount>& tasks) {
  std::set<std::string> labels;
  std::array<std::set<std::string>, kTaskCount> tags;
  for (const auto& sentence : treebank) {
    for (const GoldSegment* seg : sentence.segments()) {
      if (seg->deprel != kAuxDiscard) labels.insert(seg->deprel);
      for (std::size_t k = 0; k < kTaskCount; ++k) {
        if (tasks[k]) tags[k].insert(task_value(*seg, static_cast<FeatureTask>(k)));
      }
    }
  }
  OutputInventory inv;
  inv.labels.assign(labels.begin(), labels.end());
  inv.labels.emplace_back(kAuxDiscard);
  for (std::size_t k = 0; k < kTaskCount; ++k) inv.tag_sets[k].assign(tags[k].begin(), tags[k].end());
  return inv;
}

bool ScoreSet::all_finite() const {
  if (!head_scores.allFinite()) return false;
  for (const auto& m : label_scores) {
    if (!m.allFinite()) return false;
  }
  for (const auto& m : mtl_logits) {
    if (!m.allFinite()) return false;
  }
  return true;
}

}  // namespace latparse
