#pragma once

// Synthetic treebanks with segmentation ambiguity. Function words (ADP b/l/m,
// DET h, CCONJ w) may fuse as single-letter prefixes onto the following
// content word; fused surfaces get lexicon distractors that re-split the
// surface at other boundaries. Stems never contain a prefix letter, so every
// surface has exactly one correct decomposition.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "latparse/lattice.hpp"
#include "latparse/morph_analyzer.hpp"
#include "latparse/treebank.hpp"

namespace latparse {

struct SynthWord {
  std::string form;
  std::string upos;
  FeatureList feats;
};

struct SynthGrammar {
  std::vector<SynthWord> nouns;
  std::vector<SynthWord> pronouns;
  std::vector<SynthWord> adjectives;
  std::vector<SynthWord> verbs;
  std::vector<SynthWord> adpositions;  // fusable case markers
  SynthWord article;                   // fusable determiner
  SynthWord conjunction;               // fusable coordinator

  double ambiguity = 0.5;  // probability that a content word fuses with its function words
  std::uint64_t seed = 1;  // sentence sampling; the vocabulary is fixed at construction
  std::uint64_t vocab_seed = 1;
  std::size_t min_tokens = 2;
  std::size_t max_tokens = 12;
};

/// Builds a vocabulary of `stems` nouns plus matching pronouns, adjectives
/// and verbs covering every agreement combination. Throws UsageError on an
/// ambiguity outside [0, 1] or zero stems.
SynthGrammar make_grammar(double ambiguity, std::uint64_t seed, std::size_t stems = 12);

struct SynthStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t segments = 0;
  std::size_t fused_tokens = 0;
  std::size_t ambiguous_tokens = 0;  // more than one lattice analysis
  std::size_t analyses = 0;
  std::size_t gold_first = 0;  // ambiguous tokens whose first analysis is gold

  double realized_ambiguity() const { return tokens ? static_cast<double>(ambiguous_tokens) / tokens : 0.0; }
  double analyses_per_token() const { return tokens ? static_cast<double>(analyses) / tokens : 0.0; }
};

struct SynthCorpus {
  std::vector<GoldSentence> treebank;
  Lexicon lexicon;
  SynthStats stats;
};

/// Every surface the grammar can produce with its analyses; infused by
/// construction. Distractors and analysis order depend only on the surface
/// and the vocabulary seed.
Lexicon grammar_lexicon(const SynthGrammar& grammar);

/// `n` sentences sampled with grammar.seed, plus the grammar lexicon and
/// statistics over the generated lattices. Throws UsageError on n == 0 or an
/// empty vocabulary.
SynthCorpus generate(const SynthGrammar& grammar, std::size_t n);

SynthStats corpus_stats(std::span<const GoldSentence> treebank, const Lexicon& lexicon);

/// Removes the gold analysis of a seeded `fraction` of the ambiguous surface
/// forms occurring in `treebank` (those listing more than one analysis).
Lexicon drop_gold_analyses(const Lexicon& lexicon, std::span<const GoldSentence> treebank, double fraction,
                           std::uint64_t seed);

}  // namespace latparse
