#include "latparse/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "latparse/config.hpp"
#include "latparse/error.hpp"
#include "text_util.hpp"

namespace latparse {

namespace {

constexpr std::string_view kMagic = "latparse-checkpoint";

void write_tensor(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  char buf[40];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%a", m(r, c));
      if (c > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

void write_list(std::ostream& out, const std::string& header, const std::vector<std::string>& items) {
  out << header << ' ' << items.size() << '\n';
  for (const auto& item : items) out << item << '\n';
}

}  // namespace

void save_checkpoint(std::ostream& out, const Model& model) {
  const Scorer& scorer = model.scorer();
  const ProviderSpec& spec = model.provider_spec();
  out << kMagic << ' ' << kCheckpointVersion << '\n';
  out << "seed " << model.seed() << '\n';
  out << "provider " << provider_name(spec.kind) << '\n';
  out << "provider_buckets " << spec.static_buckets << '\n';
  out << "provider_window " << spec.toy_window << '\n';
  out << "provider_vectors " << spec.vectors.string() << '\n';

  std::ostringstream cfg;
  write_config(cfg, scorer.config());
  std::vector<std::string> cfg_lines;
  std::istringstream cfg_in(cfg.str());
  for (std::string line; std::getline(cfg_in, line);) cfg_lines.push_back(line);
  write_list(out, "config", cfg_lines);

  const OutputInventory& inv = scorer.inventory();
  write_list(out, "labels", inv.labels);
  for (std::size_t k = 0; k < kTaskCount; ++k) write_list(out, "tags " + std::string(kTaskNames[k]), inv.tag_sets[k]);

  if (const StaticProvider* table = model.static_table()) {
    write_list(out, "vocab", table->vocabulary());
    write_tensor(out, table->table().name, table->table().value);
  }
  for (const Parameter* p : scorer.parameters()) write_tensor(out, p->name, p->value);
  out << "end\n";
}

void save_checkpoint(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw MissingAssetError("cannot write checkpoint " + path.string());
  save_checkpoint(out, model);
  if (!out) throw MissingAssetError("failed writing checkpoint " + path.string());
}

namespace {

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::string require() {
    std::string line;
    if (!next(line)) fail("unexpected end of checkpoint");
    return line;
  }

  /// Reads `<key> <value>` and returns the value.
  std::string field(std::string_view key) {
    const std::string line = require();
    if (!detail::starts_with(line, key) || line.size() < key.size() || (line.size() > key.size() && line[key.size()] != ' ')) {
      fail("expected '" + std::string(key) + "'");
    }
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  }

  std::size_t size_field(std::string_view key) {
    const std::string v = field(key);
    const auto n = detail::parse_size(v);
    if (!n) fail("invalid count '" + v + "'");
    return *n;
  }

  std::vector<std::string> list(std::string_view key) {
    const std::size_t n = size_field(key);
    std::vector<std::string> items;
    for (std::size_t k = 0; k < n; ++k) items.push_back(require());
    return items;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(source_, line_no_, what); }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
};

Matrix read_tensor_body(Reader& r, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string line = r.require();
    const auto fields = detail::split_ws(line);
    if (static_cast<Eigen::Index>(fields.size()) != cols) r.fail("tensor row has wrong width");
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::string f(fields[static_cast<std::size_t>(j)]);
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size()) r.fail("invalid number '" + f + "'");
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace

Model load_checkpoint(std::istream& in, const std::string& source,
                      const std::optional<std::filesystem::path>& vectors) {
  Reader r(in, source);
  const std::string version = r.field(kMagic);
  if (version != std::to_string(kCheckpointVersion)) r.fail("unsupported checkpoint version '" + version + "'");

  const std::string seed_text = r.field("seed");
  char* end = nullptr;
  const std::uint64_t seed = std::strtoull(seed_text.c_str(), &end, 10);
  if (seed_text.empty() || end != seed_text.c_str() + seed_text.size()) r.fail("invalid seed");

  ProviderSpec spec;
  try {
    spec.kind = parse_provider_kind(r.field("provider"));
  } catch (const UsageError& e) {
    r.fail(e.what());
  }
  spec.static_buckets = r.size_field("provider_buckets");
  spec.toy_window = r.size_field("provider_window");
  spec.vectors = r.field("provider_vectors");
  if (vectors) spec.vectors = *vectors;

  ScorerConfig config;
  {
    std::ostringstream joined;
    for (const auto& line : r.list("config")) joined << line << '\n';
    std::istringstream cfg_in(joined.str());
    config = read_config(cfg_in, source + " (config)");
  }

  OutputInventory inv;
  inv.labels = r.list("labels");
  for (std::size_t k = 0; k < kTaskCount; ++k) inv.tag_sets[k] = r.list("tags " + std::string(kTaskNames[k]));

  Model model(config, inv, spec, seed);
  if (spec.kind == ProviderKind::Static) {
    std::vector<std::string> vocab = r.list("vocab");
    const std::string header_line = r.require();
    const auto header = detail::split_ws(header_line);
    if (header.size() != 4 || header[0] != "tensor") r.fail("expected the embedding table tensor");
    const auto rows = detail::parse_size(header[2]);
    const auto cols = detail::parse_size(header[3]);
    if (!rows || !cols) r.fail("invalid tensor shape");
    Matrix table = read_tensor_body(r, static_cast<Eigen::Index>(*rows), static_cast<Eigen::Index>(*cols));
    if (*rows < vocab.size()) r.fail("embedding table smaller than vocabulary");
    const std::size_t buckets = *rows - vocab.size();
    model.replace_static_table(StaticProvider::restore(buckets, std::move(vocab), std::move(table)));
  }

  std::map<std::string, bool> seen;
  for (Parameter* p : model.scorer().parameters()) seen[p->name] = false;
  while (true) {
    const std::string line = r.require();
    if (line == "end") break;
    const auto header = detail::split_ws(line);
    if (header.size() != 4 || header[0] != "tensor") r.fail("expected 'tensor <name> <rows> <cols>' or 'end'");
    const std::string name(header[1]);
    Parameter* p = model.scorer().find_parameter(name);
    if (p == nullptr) r.fail("unknown tensor '" + name + "'");
    const auto rows = detail::parse_size(header[2]);
    const auto cols = detail::parse_size(header[3]);
    if (!rows || !cols || static_cast<Eigen::Index>(*rows) != p->value.rows() ||
        static_cast<Eigen::Index>(*cols) != p->value.cols()) {
      r.fail("tensor '" + name + "' has the wrong shape");
    }
    p->value = read_tensor_body(r, p->value.rows(), p->value.cols());
    p->zero_grad();
    seen[name] = true;
  }
  for (const auto& [name, ok] : seen) {
    if (!ok) r.fail("checkpoint lacks tensor '" + name + "'");
  }
  return model;
}

Model load_checkpoint(const std::filesystem::path& path, const std::optional<std::filesystem::path>& vectors) {
  std::ifstream in(path);
  if (!in) throw MissingAssetError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, path.string(), vectors);
}

}  // namespace latparse
