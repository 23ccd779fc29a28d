#pragma once

// Lattice TSV: blank-line separated sentences, one row per segment:
//
//   token_idx <TAB> analysis_idx <TAB> within_idx <TAB> form <TAB> pos_hint <TAB> feats_hint
//
// `_` marks an absent hint; feats are Key=Val|Key=Val. Each sentence may be
// preceded by `# sent_id = ...` and `# text = ...` comment lines; the text
// line carries the raw token forms (space separated), which the segment rows
// alone cannot recover.

#include <iosfwd>
#include <string>
#include <vector>

#include "latparse/lattice.hpp"

namespace latparse {

void write_lattice_tsv(std::ostream& out, const std::vector<SentenceLattice>& lattices);

/// Throws FormatError (with line number) on malformed rows or non-contiguous
/// indices.
std::vector<SentenceLattice> read_lattice_tsv(std::istream& in, const std::string& source = "<lattice>");

}  // namespace latparse
