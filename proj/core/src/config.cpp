#include "latparse/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "latparse/error.hpp"
#include "text_util.hpp"

namespace latparse {

namespace {

std::size_t to_size(std::string_view key, std::string_view value) {
  const auto v = detail::parse_size(value);
  if (!v) throw UsageError("config key '" + std::string(key) + "' expects a non-negative integer, got '" +
                           std::string(value) + "'");
  return *v;
}

double to_double(std::string_view key, std::string_view value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || !std::isfinite(v)) {
    throw UsageError("config key '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError("config key '" + std::string(key) + "' expects true or false, got '" + std::string(value) + "'");
}

struct Field {
  const char* key;
  std::size_t ScorerConfig::*size = nullptr;
  double ScorerConfig::*real = nullptr;
  bool ScorerConfig::*flag = nullptr;
  int task = -1;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      {"embedding_dim", &ScorerConfig::embedding_dim},
      {"shared_rnn_hidden", &ScorerConfig::shared_rnn_hidden},
      {"shared_rnn_depth", &ScorerConfig::shared_rnn_depth},
      {"branch_rnn_depth", &ScorerConfig::branch_rnn_depth},
      {"arc_mlp_size", &ScorerConfig::arc_mlp_size},
      {"label_mlp_size", &ScorerConfig::label_mlp_size},
      {"mtl_linear_size", &ScorerConfig::mtl_linear_size},
      {"embedding_dropout", nullptr, &ScorerConfig::embedding_dropout},
      {"arc_mlp_dropout", nullptr, &ScorerConfig::arc_mlp_dropout},
      {"label_mlp_dropout", nullptr, &ScorerConfig::label_mlp_dropout},
      {"batch_size", &ScorerConfig::batch_size},
      {"learning_rate", nullptr, &ScorerConfig::learning_rate},
      {"adam_beta1", nullptr, &ScorerConfig::adam_beta1},
      {"adam_beta2", nullptr, &ScorerConfig::adam_beta2},
      {"adam_epsilon", nullptr, &ScorerConfig::adam_epsilon},
      {"clip_norm", nullptr, &ScorerConfig::clip_norm},
      {"aux_label_loss", nullptr, nullptr, &ScorerConfig::aux_label_loss},
      {"virtual_offset", nullptr, nullptr, &ScorerConfig::virtual_offset},
      {"task_pos", nullptr, nullptr, nullptr, 0},
      {"task_gender", nullptr, nullptr, nullptr, 1},
      {"task_number", nullptr, nullptr, nullptr, 2},
      {"task_person", nullptr, nullptr, nullptr, 3},
  };
  return f;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

void set_config_value(ScorerConfig& config, std::string_view key, std::string_view value) {
  for (const auto& f : fields()) {
    if (key != f.key) continue;
    if (f.size) {
      config.*f.size = to_size(key, value);
    } else if (f.real) {
      config.*f.real = to_double(key, value);
    } else if (f.flag) {
      config.*f.flag = to_bool(key, value);
    } else {
      config.tasks[static_cast<std::size_t>(f.task)] = to_bool(key, value);
    }
    return;
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

ScorerConfig read_config(std::istream& in, const std::string& source, ScorerConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw FormatError(source, line_no, "expected 'key = value'");
    try {
      set_config_value(base, detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw FormatError(source, line_no, e.what());
    }
  }
  try {
    base.validate();
  } catch (const UsageError& e) {
    throw FormatError(source, 0, e.what());
  }
  return base;
}

ScorerConfig read_config(const std::filesystem::path& path, ScorerConfig base) {
  std::ifstream in(path);
  if (!in) throw MissingAssetError("cannot open config file " + path.string());
  return read_config(in, path.string(), std::move(base));
}

void write_config(std::ostream& out, const ScorerConfig& config) {
  char buf[40];
  for (const auto& f : fields()) {
    out << f.key << " = ";
    if (f.size) {
      out << config.*f.size;
    } else if (f.real) {
      std::snprintf(buf, sizeof buf, "%.17g", config.*f.real);
      out << buf;
    } else if (f.flag) {
      out << (config.*f.flag ? "true" : "false");
    } else {
      out << (config.tasks[static_cast<std::size_t>(f.task)] ? "true" : "false");
    }
    out << '\n';
  }
}

}  // namespace latparse
