#pragma once

// Text checkpoints: a versioned header, the seed, provider settings, the
// scorer configuration, output inventories, the static vocabulary (if any)
// and every parameter tensor as exact hexadecimal floats.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "latparse/pipeline.hpp"

namespace latparse {

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(std::ostream& out, const Model& model);
void save_checkpoint(const std::filesystem::path& path, const Model& model);

/// `vectors` overrides the stored precomputed-vectors path. Throws
/// FormatError on malformed or version-mismatched input.
Model load_checkpoint(std::istream& in, const std::string& source = "<checkpoint>",
                      const std::optional<std::filesystem::path>& vectors = std::nullopt);
Model load_checkpoint(const std::filesystem::path& path,
                      const std::optional<std::filesystem::path>& vectors = std::nullopt);

}  // namespace latparse
