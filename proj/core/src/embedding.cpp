#include "latparse/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "latparse/random.hpp"
#include "text_util.hpp"

namespace latparse {

using Index = Eigen::Index;

AnalysisContext build_context(std::span<const Token> sentence, std::size_t token_idx, const Analysis& analysis) {
  if (token_idx < 1 || token_idx > sentence.size()) {
    throw std::out_of_range("token index " + std::to_string(token_idx) + " outside 1.." +
                            std::to_string(sentence.size()));
  }
  AnalysisContext ctx;
  ctx.context.reserve(sentence.size() - 1 + analysis.segments.size());
  for (std::size_t j = 0; j + 1 < token_idx; ++j) ctx.context.push_back(sentence[j].form);
  ctx.span_begin = ctx.context.size();
  for (const auto& seg : analysis.segments) ctx.context.push_back(seg.form);
  ctx.span_end = ctx.context.size();
  for (std::size_t j = token_idx; j < sentence.size(); ++j) ctx.context.push_back(sentence[j].form);
  return ctx;
}

Matrix EmbeddingProvider::embed_virtual(std::string_view sent_id, std::span<const std::string> tokens) const {
  const Matrix rows = embed_span(SpanKey{sent_id, 0, 0}, tokens, 0, tokens.size());
  Matrix out(2, rows.cols());
  out.row(0) = rows.colwise().mean();
  out.row(1) = out.row(0);
  return out;
}

namespace {

std::string node_label(std::string_view sent_id, std::size_t token, std::size_t analysis) {
  return "sentence '" + std::string(sent_id) + "' token " + std::to_string(token) + " analysis " +
         std::to_string(analysis);
}

void check_rows(const Matrix& rows, std::size_t expected, std::size_t dim, const std::string& where) {
  if (static_cast<std::size_t>(rows.rows()) != expected || static_cast<std::size_t>(rows.cols()) != dim) {
    throw EmbeddingError("embedding failed for " + where + ": provider returned " + std::to_string(rows.rows()) +
                         "x" + std::to_string(rows.cols()) + ", expected " + std::to_string(expected) + "x" +
                         std::to_string(dim));
  }
  for (Index r = 0; r < rows.rows(); ++r) {
    if (!rows.row(r).allFinite()) {
      throw EmbeddingError("embedding failed for " + where + " within " + std::to_string(r + 1) +
                           ": non-finite vector");
    }
  }
}

}  // namespace

NodeEmbeddings embed_lattice(const EmbeddingProvider& provider, const LinearizedLattice& lin) {
  const std::size_t dim = provider.dim();
  if (dim == 0) throw EmbeddingError("embedding provider '" + std::string(provider.name()) + "' has dimension 0");
  NodeEmbeddings out;
  out.values.resize(static_cast<Index>(lin.size()), static_cast<Index>(dim));

  std::vector<std::string> token_forms;
  token_forms.reserve(lin.token_count());
  for (const auto& t : lin.tokens()) token_forms.push_back(t.form);

  {
    const std::string where = "sentence '" + lin.sent_id() + "' ROOT/AUX";
    Matrix virt;
    try {
      virt = provider.embed_virtual(lin.sent_id(), token_forms);
    } catch (const EmbeddingError&) {
      throw;
    } catch (const std::exception& e) {
      throw EmbeddingError("embedding failed for " + where + ": " + e.what());
    }
    check_rows(virt, 2, dim, where);
    out.values.topRows(2) = virt;
  }

  const SentenceLattice lattice = lin.delinearize();
  for (std::size_t j = 1; j <= lin.token_count(); ++j) {
    const auto& tl = lattice.tokens[j - 1];
    for (std::size_t i = 1; i <= tl.analyses.size(); ++i) {
      const AnalysisContext ctx = build_context(lin.tokens(), j, tl.analyses[i - 1]);
      const std::string where = node_label(lin.sent_id(), j, i);
      Matrix rows;
      try {
        rows = provider.embed_span(SpanKey{lin.sent_id(), j, i}, ctx.context, ctx.span_begin, ctx.span_end);
      } catch (const EmbeddingError&) {
        throw;
      } catch (const std::exception& e) {
        throw EmbeddingError("embedding failed for " + where + ": " + e.what());
      }
      const NodeRange range = lin.segments_of(j, i);
      check_rows(rows, range.size(), dim, where);
      out.values.middleRows(static_cast<Index>(range.begin), static_cast<Index>(range.size())) = rows;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void seeded_row(Matrix& table, Index row, std::uint64_t seed) {
  Rng rng(seed);
  const double limit = std::sqrt(3.0 / static_cast<double>(table.cols()));
  for (Index c = 0; c < table.cols(); ++c) table(row, c) = rng.uniform(-limit, limit);
}

}  // namespace

StaticProvider::StaticProvider(std::size_t dim, std::size_t buckets, std::uint64_t seed)
    : dim_(dim), buckets_(buckets), seed_(seed) {
  if (dim == 0 || buckets == 0) throw UsageError("static embeddings need dim > 0 and buckets > 0");
  Matrix table(static_cast<Index>(buckets), static_cast<Index>(dim));
  for (std::size_t b = 0; b < buckets; ++b) seeded_row(table, static_cast<Index>(b), mix_seed(seed, b));
  table_ = Parameter("embedding.table", std::move(table));
}

void StaticProvider::extend_vocabulary(std::span<const std::string> forms) {
  std::vector<std::string> fresh;
  for (const auto& f : forms) {
    if (index_.count(f) == 0 && std::find(fresh.begin(), fresh.end(), f) == fresh.end()) fresh.push_back(f);
  }
  if (fresh.empty()) return;
  const Index old_vocab = static_cast<Index>(vocab_.size());
  const Index added = static_cast<Index>(fresh.size());
  Matrix table(table_.value.rows() + added, static_cast<Index>(dim_));
  table.topRows(old_vocab) = table_.value.topRows(old_vocab);
  table.bottomRows(static_cast<Index>(buckets_)) = table_.value.bottomRows(static_cast<Index>(buckets_));
  for (Index k = 0; k < added; ++k) {
    const std::string& f = fresh[static_cast<std::size_t>(k)];
    seeded_row(table, old_vocab + k, mix_seed(seed_, fnv1a64(f)));
    index_.emplace(f, vocab_.size());
    vocab_.push_back(f);
  }
  table_.value = std::move(table);
  table_.zero_grad();
}

void StaticProvider::extend_vocabulary(const LinearizedLattice& lin) {
  std::vector<std::string> forms = segment_forms(lin);
  for (const auto& t : lin.tokens()) forms.push_back(t.form);
  extend_vocabulary(forms);
}

std::size_t StaticProvider::row_of(std::string_view form) const {
  const auto it = index_.find(std::string(form));
  if (it != index_.end()) return it->second;
  return vocab_.size() + static_cast<std::size_t>(fnv1a64(form) % buckets_);
}

Matrix StaticProvider::embed_span(const SpanKey&, std::span<const std::string> context, std::size_t begin,
                                  std::size_t end) const {
  Matrix out(static_cast<Index>(end - begin), static_cast<Index>(dim_));
  for (std::size_t p = begin; p < end; ++p) {
    out.row(static_cast<Index>(p - begin)) = table_.value.row(static_cast<Index>(row_of(context[p])));
  }
  return out;
}

void StaticProvider::accumulate_gradient(const LinearizedLattice& lin, const Matrix& node_grad) {
  const auto& nodes = lin.nodes();
  for (std::size_t pos = 2; pos < nodes.size(); ++pos) {
    table_.grad.row(static_cast<Index>(row_of(nodes[pos].segment.form))) += node_grad.row(static_cast<Index>(pos));
  }
  const double share = 1.0 / static_cast<double>(lin.token_count());
  const Eigen::RowVectorXd virt = (node_grad.row(0) + node_grad.row(1)) * share;
  for (const auto& t : lin.tokens()) table_.grad.row(static_cast<Index>(row_of(t.form))) += virt;
}

StaticProvider StaticProvider::restore(std::size_t buckets, std::vector<std::string> vocab, Matrix table) {
  if (static_cast<std::size_t>(table.rows()) != vocab.size() + buckets) {
    throw FormatError("<checkpoint>", 0, "static table has " + std::to_string(table.rows()) + " rows, expected " +
                                             std::to_string(vocab.size() + buckets));
  }
  StaticProvider p(static_cast<std::size_t>(table.cols()), buckets, 0);
  for (std::size_t k = 0; k < vocab.size(); ++k) p.index_.emplace(vocab[k], k);
  p.vocab_ = std::move(vocab);
  p.table_ = Parameter("embedding.table", std::move(table));
  return p;
}

// ---------------------------------------------------------------------------

PrecomputedProvider PrecomputedProvider::load(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PrecomputedProvider> provider;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (!provider) {
      if (!detail::starts_with(text, "dim=")) throw FormatError(source, line_no, "expected 'dim=<d>' header");
      const auto dim = detail::parse_size(text.substr(4));
      if (!dim || *dim == 0) throw FormatError(source, line_no, "invalid dimension");
      provider.emplace(*dim);
      continue;
    }
    const auto fields = detail::split_ws(text);
    if (fields.size() != 4 + provider->dim_) {
      throw FormatError(source, line_no,
                        "expected " + std::to_string(4 + provider->dim_) + " fields, got " +
                            std::to_string(fields.size()));
    }
    std::size_t idx[3];
    for (int k = 0; k < 3; ++k) {
      const auto v = detail::parse_size(fields[static_cast<std::size_t>(k) + 1]);
      if (!v) throw FormatError(source, line_no, "invalid index '" + std::string(fields[k + 1]) + "'");
      idx[k] = *v;
    }
    Vector vec(static_cast<Index>(provider->dim_));
    for (std::size_t d = 0; d < provider->dim_; ++d) {
      const std::string_view f = fields[4 + d];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value)) {
        throw FormatError(source, line_no, "invalid vector component '" + std::string(f) + "'");
      }
      vec(static_cast<Index>(d)) = value;
    }
    provider->insert(std::string(fields[0]), idx[0], idx[1], idx[2], std::move(vec));
  }
  if (!provider) throw FormatError(source, line_no, "missing 'dim=<d>' header");
  return std::move(*provider);
}

PrecomputedProvider PrecomputedProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingAssetError("cannot open vectors file " + path.string());
  return load(in, path.string());
}

void PrecomputedProvider::insert(const std::string& sent_id, std::size_t token_idx, std::size_t analysis_idx,
                                 std::size_t within_idx, Vector v) {
  if (static_cast<std::size_t>(v.size()) != dim_) throw DataError("precomputed vector has wrong dimension");
  vectors_[Key{sent_id, token_idx, analysis_idx, within_idx}] = std::move(v);
}

const Vector& PrecomputedProvider::lookup(std::string_view sent_id, std::size_t token_idx, std::size_t analysis_idx,
                                          std::size_t within_idx) const {
  const auto it = vectors_.find(Key{std::string(sent_id), token_idx, analysis_idx, within_idx});
  if (it == vectors_.end()) {
    throw EmbeddingError("no precomputed vector for sentence '" + std::string(sent_id) + "' token " +
                         std::to_string(token_idx) + " analysis " + std::to_string(analysis_idx) + " within " +
                         std::to_string(within_idx));
  }
  return it->second;
}

Matrix PrecomputedProvider::embed_span(const SpanKey& key, std::span<const std::string>, std::size_t begin,
                                       std::size_t end) const {
  Matrix out(static_cast<Index>(end - begin), static_cast<Index>(dim_));
  for (std::size_t p = begin; p < end; ++p) {
    out.row(static_cast<Index>(p - begin)) =
        lookup(key.sent_id, key.token_idx, key.analysis_idx, p - begin + 1).transpose();
  }
  return out;
}

Matrix PrecomputedProvider::embed_virtual(std::string_view sent_id, std::span<const std::string>) const {
  Matrix out(2, static_cast<Index>(dim_));
  out.row(0) = lookup(sent_id, 0, 0, 0).transpose();
  out.row(1) = lookup(sent_id, 0, 0, 1).transpose();
  return out;
}

void PrecomputedProvider::write_records(std::ostream& out, const LinearizedLattice& lin, const NodeEmbeddings& emb) {
  char buf[32];
  for (std::size_t pos = 0; pos < lin.size(); ++pos) {
    const auto& node = lin.node(pos);
    out << lin.sent_id() << '\t' << node.token_idx << '\t' << node.analysis_idx << '\t' << node.within_idx;
    for (Index d = 0; d < emb.values.cols(); ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", emb.values(static_cast<Index>(pos), d));
      out << '\t' << buf;
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

Vector ToyContextProvider::form_vector(std::string_view form) const {
  Rng rng(mix_seed(seed_, fnv1a64(form)));
  Vector v(static_cast<Index>(dim_));
  for (Index d = 0; d < v.size(); ++d) v(d) = rng.uniform(-1.0, 1.0);
  return v;
}

Matrix ToyContextProvider::embed_span(const SpanKey&, std::span<const std::string> context, std::size_t begin,
                                      std::size_t end) const {
  Matrix out(static_cast<Index>(end - begin), static_cast<Index>(dim_));
  for (std::size_t p = begin; p < end; ++p) {
    Vector v = form_vector(context[p]);
    const std::size_t lo = p >= window_ ? p - window_ : 0;
    const std::size_t hi = std::min(context.size(), p + window_ + 1);
    for (std::size_t q = lo; q < hi; ++q) {
      if (q != p) v += 0.5 * form_vector(context[q]);
    }
    out.row(static_cast<Index>(p - begin)) = v.transpose();
  }
  return out;
}

}  // namespace latparse
