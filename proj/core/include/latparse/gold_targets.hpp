#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "latparse/lattice.hpp"
#include "latparse/scores.hpp"
#include "latparse/treebank.hpp"

namespace latparse {

/// Per-node training targets for one linearized lattice. Entries for ROOT
/// and AUX are kNpos and never contribute to the loss.
struct GoldTargets {
  std::vector<std::size_t> gold_head;   // node position
  std::vector<std::size_t> gold_label;  // label index, kNpos = excluded from label CE
  std::array<std::vector<std::size_t>, kTaskCount> gold_tags;
  std::array<std::vector<bool>, kTaskCount> loss_mask;

  std::size_t size() const { return gold_head.size(); }
  std::size_t aux_headed() const;
};

/// Gold-path nodes get their gold head and label; every other segment is
/// attached to AUX with aux-discard (or no label target when
/// `aux_label_targets` is false). MTL masks select gold-path nodes of enabled
/// tasks. Throws DataError naming the first token whose gold segmentation is
/// not a lattice path, and for labels or tags outside the inventory.
GoldTargets build_gold_targets(const LinearizedLattice& lin, const GoldSentence& gold,
                               const OutputInventory& inventory, bool aux_label_targets = true);

}  // namespace latparse
