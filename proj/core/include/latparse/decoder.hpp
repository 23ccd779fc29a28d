#pragma once

// Constrained decoding of a ScoreSet into a single dependency tree whose node
// set fixes the segmentation. Decoding runs in two phases: greedy head
// proposals pick one analysis per token, then an exact maximum spanning
// arborescence is found over the chosen analyses' segments.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "latparse/lattice.hpp"
#include "latparse/scores.hpp"

namespace latparse {

/// Permitted (dependent, head) node pairs.
class ConstraintMask {
 public:
  explicit ConstraintMask(std::size_t n = 0) : n_(n), bits_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool allowed(std::size_t dep, std::size_t head) const { return bits_[dep * n_ + head] != 0; }
  void set(std::size_t dep, std::size_t head, bool ok) { bits_[dep * n_ + head] = ok ? 1 : 0; }
  std::vector<std::size_t> permitted_heads(std::size_t dep) const;

  friend bool operator==(const ConstraintMask&, const ConstraintMask&) = default;

 private:
  std::size_t n_;
  std::vector<unsigned char> bits_;
};

/// Every arc except self-arcs, arcs into ROOT/AUX, and arcs between
/// segments of different analyses of the same token. AUX is a permitted head.
ConstraintMask base_mask(const LinearizedLattice& lin);

/// Best permitted head per node (lowest index on ties); kNpos for ROOT/AUX.
std::vector<std::size_t> greedy_heads(const Matrix& head_scores, const ConstraintMask& mask);

enum class AnalysisScoring {
  MaxSegment,   // analysis score = best non-AUX head score over its segments
  MeanSegment,  // mean over segments of each one's best non-AUX head score
};

/// One 1-based analysis index per token. A token whose greedy heads attach
/// exactly one analysis entirely to non-AUX heads takes that analysis; any
/// other token falls back to the analysis with the best segment score.
std::vector<std::size_t> select_analyses(const LinearizedLattice& lin, std::span<const std::size_t> greedy,
                                         const Matrix& head_scores, const ConstraintMask& mask,
                                         AnalysisScoring scoring = AnalysisScoring::MaxSegment);

/// The base mask narrowed to a fixed analysis choice: chosen segments may
/// attach to ROOT or other chosen segments only; unchosen ones only to AUX.
ConstraintMask apply_constraints(const LinearizedLattice& lin, std::span<const std::size_t> chosen);

/// Node positions of the chosen analyses, in node order.
std::vector<std::size_t> chosen_nodes(const LinearizedLattice& lin, std::span<const std::size_t> chosen);

enum class MstScope {
  ChosenOnly,  // arborescence over ROOT + chosen segments; the rest go to AUX
  AllNodes,    // arborescence over every node, AUX pinned under ROOT
};

struct MstOptions {
  bool single_root = true;
  MstScope scope = MstScope::ChosenOnly;
};

/// Head per node: chosen nodes get their arborescence head, other segments
/// AUX, ROOT/AUX kNpos. Scores are taken as log-domain arc weights.
std::vector<std::size_t> mst_decode(const Matrix& head_scores, const ConstraintMask& mask,
                                    std::span<const std::size_t> chosen, const MstOptions& options = {});

/// Sum of head_scores(d, heads[d]) over `nodes`, accumulated in node order.
double tree_score(const Matrix& head_scores, std::span<const std::size_t> heads, std::span<const std::size_t> nodes);

struct ParsedSegment {
  std::string form;
  std::size_t node = 0;       // position in the linearized lattice
  std::size_t token_idx = 0;  // 1-based
  std::size_t head = 0;       // 1-based position among output segments, 0 = root
  std::string label;
  std::array<std::string, kTaskCount> tags;  // empty when a task is disabled
};

struct JointParse {
  std::string sent_id;
  std::vector<Token> tokens;
  std::vector<std::size_t> chosen_analysis;  // 1-based, one per token
  std::vector<ParsedSegment> segments;       // surviving segments in order
  std::vector<std::size_t> node_heads;       // full head assignment incl. AUX arcs
};

struct DecoderOptions {
  AnalysisScoring scoring = AnalysisScoring::MaxSegment;
  MstOptions mst;
};

JointParse decode(const LinearizedLattice& lin, const ScoreSet& scores, const OutputInventory& inventory,
                  const DecoderOptions& options = {});

/// Decodes with a fixed analysis choice, skipping analysis selection.
JointParse decode_with_analyses(const LinearizedLattice& lin, const ScoreSet& scores,
                                const OutputInventory& inventory, std::span<const std::size_t> chosen,
                                const DecoderOptions& options = {});

}  // namespace latparse
