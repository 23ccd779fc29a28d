#pragma once

// Node embeddings for linearized lattices.
//
// Each analysis is embedded inside its own sentence context: the original
// tokens with the analysed token replaced by the analysis' segments. ROOT and
// AUX are embedded from the unmodified token sequence.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "latparse/error.hpp"
#include "latparse/lattice.hpp"
#include "latparse/nn.hpp"

namespace latparse {

struct AnalysisContext {
  std::vector<std::string> context;
  std::size_t span_begin = 0;  // 0-based, half-open over `context`
  std::size_t span_end = 0;
};

/// s_1..s_{j-1}, m^1..m^r, s_{j+1}..s_k with the span covering the r
/// inserted segments. `token_idx` is 1-based; throws std::out_of_range.
AnalysisContext build_context(std::span<const Token> sentence, std::size_t token_idx, const Analysis& analysis);

/// Identifies which analysis a span belongs to; keyed lookups (precomputed
/// vectors) need it, contextual providers ignore it.
struct SpanKey {
  std::string_view sent_id;
  std::size_t token_idx = 0;
  std::size_t analysis_idx = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t dim() const = 0;

  /// One row per context position in [begin, end).
  virtual Matrix embed_span(const SpanKey& key, std::span<const std::string> context, std::size_t begin,
                            std::size_t end) const = 0;

  /// Two rows, ROOT then AUX. Defaults to the mean of the sentence's token
  /// vectors for both.
  virtual Matrix embed_virtual(std::string_view sent_id, std::span<const std::string> tokens) const;
};

/// Row-aligned with LinearizedLattice::nodes().
struct NodeEmbeddings {
  Matrix values;  // nodes x dim

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

/// Embeds every node. A provider failure aborts with an EmbeddingError naming
/// the sentence, token, analysis (and within index where known).
NodeEmbeddings embed_lattice(const EmbeddingProvider& provider, const LinearizedLattice& lin);

class EmbeddingError : public DataError {
 public:
  using DataError::DataError;
};

/// Trainable per-form lookup table. Forms outside the vocabulary hash into
/// a fixed set of shared bucket rows.
class StaticProvider final : public EmbeddingProvider {
 public:
  StaticProvider(std::size_t dim, std::size_t buckets, std::uint64_t seed);

  std::string_view name() const override { return "static"; }
  std::size_t dim() const override { return dim_; }
  Matrix embed_span(const SpanKey& key, std::span<const std::string> context, std::size_t begin,
                    std::size_t end) const override;

  /// Adds forms to the vocabulary and grows the table with seeded rows.
  void extend_vocabulary(std::span<const std::string> forms);
  void extend_vocabulary(const LinearizedLattice& lin);

  std::size_t row_of(std::string_view form) const;
  std::size_t vocabulary_size() const { return vocab_.size(); }
  std::size_t bucket_count() const { return buckets_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  /// Rows [0, vocab) are forms, then `buckets` hashed rows.
  Parameter& table() { return table_; }
  const Parameter& table() const { return table_; }

  /// Accumulates dL/d(node embeddings) into the table gradient, following
  /// the same row selection and ROOT/AUX averaging as embed_lattice.
  void accumulate_gradient(const LinearizedLattice& lin, const Matrix& node_grad);

  /// Rebuilds the provider from a stored vocabulary and table.
  static StaticProvider restore(std::size_t buckets, std::vector<std::string> vocab, Matrix table);

 private:
  std::size_t dim_;
  std::size_t buckets_;
  std::uint64_t seed_;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  Parameter table_;
};

/// Vectors read from a file, keyed by (sent_id, token, analysis, within).
///
/// TSV layout: a `dim=<d>` header line, then one record per node:
///   sent_id  token_idx  analysis_idx  within_idx  v1 ... vd
/// ROOT and AUX use token_idx 0, analysis_idx 0 and within_idx 0 / 1.
class PrecomputedProvider final : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(std::size_t dim) : dim_(dim) {}

  static PrecomputedProvider load(std::istream& in, const std::string& source = "<vectors>");
  static PrecomputedProvider load(const std::filesystem::path& path);

  std::string_view name() const override { return "precomputed"; }
  std::size_t dim() const override { return dim_; }
  Matrix embed_span(const SpanKey& key, std::span<const std::string> context, std::size_t begin,
                    std::size_t end) const override;
  Matrix embed_virtual(std::string_view sent_id, std::span<const std::string> tokens) const override;

  void insert(const std::string& sent_id, std::size_t token_idx, std::size_t analysis_idx, std::size_t within_idx,
              Vector v);
  std::size_t record_count() const { return vectors_.size(); }

  /// Writes the records for `lin` in file format, taking vectors from `emb`.
  static void write_records(std::ostream& out, const LinearizedLattice& lin, const NodeEmbeddings& emb);

 private:
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t>;
  const Vector& lookup(std::string_view sent_id, std::size_t token_idx, std::size_t analysis_idx,
                       std::size_t within_idx) const;

  std::size_t dim_;
  std::map<Key, Vector, std::less<>> vectors_;
};

/// Deterministic context-sensitive toy encoder: each position's vector is a
/// seeded hash vector of its form plus half the hash vectors of the forms
/// within `window` positions on either side.
class ToyContextProvider final : public EmbeddingProvider {
 public:
  ToyContextProvider(std::size_t dim, std::uint64_t seed, std::size_t window = 1)
      : dim_(dim), seed_(seed), window_(window) {}

  std::string_view name() const override { return "toyctx"; }
  std::size_t dim() const override { return dim_; }
  Matrix embed_span(const SpanKey& key, std::span<const std::string> context, std::size_t begin,
                    std::size_t end) const override;

  Vector form_vector(std::string_view form) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::size_t window_;
};

}  // namespace latparse
