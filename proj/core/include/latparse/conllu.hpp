#pragma once

// CoNLL-U treebank reading and writing. Raw tokens are recovered from
// multiword-token range lines (`2-4  bbit`); rows outside any range are
// single-segment tokens.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "latparse/treebank.hpp"

namespace latparse {

struct JointParse;

/// Throws FormatError with a line number on malformed rows, and DataError
/// (prefixed with the sentence's first line) on invalid gold trees.
std::vector<GoldSentence> read_treebank(std::istream& in, const std::string& source = "<conllu>");
std::vector<GoldSentence> read_treebank(const std::filesystem::path& path);

void write_treebank(std::ostream& out, const std::vector<GoldSentence>& sentences);
void write_treebank(const std::filesystem::path& path, const std::vector<GoldSentence>& sentences);

/// A decoded parse as a CoNLL-U sentence: chosen analyses become range lines
/// plus rows; predicted POS fills UPOS and predicted Gender/Number/Person
/// (non-NONE values) fill FEATS.
GoldSentence to_gold_sentence(const JointParse& parse);

void write_parse(std::ostream& out, const std::vector<JointParse>& parses);

/// Raw tokenized text: one sentence per line, tokens separated by spaces.
/// Sentence ids are the 1-based line numbers of non-empty lines.
std::vector<GoldSentence> read_raw_text(std::istream& in);

}  // namespace latparse
