#pragma once

// Flat `key = value` configuration mirroring ScorerConfig. Blank lines and
// lines starting with '#' are ignored; booleans are true/false.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "latparse/scorer.hpp"

namespace latparse {

/// Throws UsageError on an unknown key or an unparsable value.
void set_config_value(ScorerConfig& config, std::string_view key, std::string_view value);

std::vector<std::string> config_keys();

/// Applies every line of `in` on top of `base` and validates the result.
/// Malformed lines and bad values raise FormatError with the line number.
ScorerConfig read_config(std::istream& in, const std::string& source = "<config>", ScorerConfig base = {});
ScorerConfig read_config(const std::filesystem::path& path, ScorerConfig base = {});

/// Every key in config_keys() order; read_config(write_config(c)) == c.
void write_config(std::ostream& out, const ScorerConfig& config);

}  // namespace latparse
