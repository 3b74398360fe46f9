#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tgrasp/annotate.hpp"
#include "tgrasp/image.hpp"

namespace tgrasp::io {

/// Binary PPM (P6, 8-bit), values clamped from [0,1].
void write_ppm(const std::filesystem::path& path, const ImageRGB& img);
ImageRGB read_ppm(const std::filesystem::path& path);

/// Binary PGM (P5, 8-bit).
void write_pgm(const std::filesystem::path& path, const Raster& img);
void write_pgm(const std::filesystem::path& path, const BinaryFrame& frame);
Raster read_pgm(const std::filesystem::path& path);

/// Grasp map container: 16-byte header (magic "GMAP", u32 version, u32 rows,
/// u32 cols), then rows*cols little-endian f32 for Q followed by R.
void write_gmap(const std::filesystem::path& path, const GraspMap& gm);
GraspMap read_gmap(const std::filesystem::path& path);

/// FNV-1a 64-bit checksum of a file, hex encoded.
std::string file_checksum(const std::filesystem::path& path);

/// Dataset manifest: every file with its checksum, as JSON.
nlohmann::json build_manifest(const std::filesystem::path& dir,
                              const std::vector<std::string>& files);
bool verify_manifest(const std::filesystem::path& dir,
                     const nlohmann::json& manifest);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace tgrasp::io
