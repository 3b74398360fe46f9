#pragma once

#include <filesystem>
#include <vector>

#include "tgrasp/nnet/tensor.hpp"

namespace tgrasp::nnet {

/// Little-endian f32 blob (`<base>.bin`) plus a JSON manifest
/// (`<base>.json`) listing tensor names, shapes and offsets.
void save_checkpoint(const std::filesystem::path& base,
                     const std::vector<ParamRef<float>>& entries);

/// Restores by name; throws when a manifest entry is missing or a shape
/// disagrees.
void load_checkpoint(const std::filesystem::path& base,
                     const std::vector<ParamRef<float>>& entries);

}  // namespace tgrasp::nnet
