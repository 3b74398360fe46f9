#include "tgrasp/io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tgrasp::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  return f;
}

uint8_t to_byte(float v) {
  return static_cast<uint8_t>(std::clamp(v, 0.0f, 1.0f) * 255.0f + 0.5f);
}

void read_pnm_header(std::ifstream& f, const char* magic, int& rows, int& cols) {
  std::string m;
  f >> m;
  if (m != magic) throw std::runtime_error("bad PNM magic");
  int maxval;
  f >> cols >> rows >> maxval;
  if (maxval != 255) throw std::runtime_error("unsupported PNM maxval");
  f.get();  // single whitespace after header
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const ImageRGB& img) {
  auto f = open_out(path);
  f << "P6\n" << img.cols << " " << img.rows << "\n255\n";
  std::vector<uint8_t> buf(img.v.size());
  for (size_t i = 0; i < img.v.size(); ++i) buf[i] = to_byte(img.v[i]);
  f.write(reinterpret_cast<const char*>(buf.data()), buf.size());
}

ImageRGB read_ppm(const std::filesystem::path& path) {
  auto f = open_in(path);
  int rows, cols;
  read_pnm_header(f, "P6", rows, cols);
  ImageRGB img(rows, cols);
  std::vector<uint8_t> buf(img.v.size());
  f.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!f) throw std::runtime_error("truncated PPM: " + path.string());
  for (size_t i = 0; i < buf.size(); ++i) img.v[i] = buf[i] / 255.0f;
  return img;
}

void write_pgm(const std::filesystem::path& path, const Raster& img) {
  auto f = open_out(path);
  f << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  std::vector<uint8_t> buf(img.v.size());
  for (size_t i = 0; i < img.v.size(); ++i) buf[i] = to_byte(img.v[i]);
  f.write(reinterpret_cast<const char*>(buf.data()), buf.size());
}

void write_pgm(const std::filesystem::path& path, const BinaryFrame& frame) {
  auto f = open_out(path);
  f << "P5\n" << frame.cols << " " << frame.rows << "\n255\n";
  std::vector<uint8_t> buf(frame.v.size());
  for (size_t i = 0; i < frame.v.size(); ++i) buf[i] = frame.v[i] ? 255 : 0;
  f.write(reinterpret_cast<const char*>(buf.data()), buf.size());
}

Raster read_pgm(const std::filesystem::path& path) {
  auto f = open_in(path);
  int rows, cols;
  read_pnm_header(f, "P5", rows, cols);
  Raster img(rows, cols);
  std::vector<uint8_t> buf(img.v.size());
  f.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!f) throw std::runtime_error("truncated PGM: " + path.string());
  for (size_t i = 0; i < buf.size(); ++i) img.v[i] = buf[i] / 255.0f;
  return img;
}

static_assert(sizeof(float) == 4, "gmap format requires 32-bit float");

void write_gmap(const std::filesystem::path& path, const GraspMap& gm) {
  if (gm.Q.rows != gm.R.rows || gm.Q.cols != gm.R.cols)
    throw std::invalid_argument("write_gmap: Q/R shape mismatch");
  auto f = open_out(path);
  const char magic[4] = {'G', 'M', 'A', 'P'};
  const uint32_t version = 1;
  const uint32_t rows = static_cast<uint32_t>(gm.Q.rows);
  const uint32_t cols = static_cast<uint32_t>(gm.Q.cols);
  f.write(magic, 4);
  f.write(reinterpret_cast<const char*>(&version), 4);
  f.write(reinterpret_cast<const char*>(&rows), 4);
  f.write(reinterpret_cast<const char*>(&cols), 4);
  f.write(reinterpret_cast<const char*>(gm.Q.v.data()), gm.Q.v.size() * 4);
  f.write(reinterpret_cast<const char*>(gm.R.v.data()), gm.R.v.size() * 4);
}

GraspMap read_gmap(const std::filesystem::path& path) {
  auto f = open_in(path);
  char magic[4];
  uint32_t version, rows, cols;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&rows), 4);
  f.read(reinterpret_cast<char*>(&cols), 4);
  if (!f || std::memcmp(magic, "GMAP", 4) != 0)
    throw std::runtime_error("gmap format error: bad magic in " + path.string());
  if (version != 1)
    throw std::runtime_error("gmap format error: unsupported version");
  GraspMap gm;
  gm.Q = Raster(rows, cols);
  gm.R = Raster(rows, cols);
  f.read(reinterpret_cast<char*>(gm.Q.v.data()), gm.Q.v.size() * 4);
  f.read(reinterpret_cast<char*>(gm.R.v.data()), gm.R.v.size() * 4);
  if (!f) throw std::runtime_error("gmap format error: truncated file");
  return gm;
}

std::string file_checksum(const std::filesystem::path& path) {
  auto f = open_in(path);
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (f) {
    f.read(buf, sizeof(buf));
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<uint8_t>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

nlohmann::json build_manifest(const std::filesystem::path& dir,
                              const std::vector<std::string>& files) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& name : files)
    entries.push_back({{"file", name}, {"checksum", file_checksum(dir / name)}});
  return {{"version", 1}, {"entries", entries}};
}

bool verify_manifest(const std::filesystem::path& dir,
                     const nlohmann::json& manifest) {
  for (const auto& e : manifest.at("entries")) {
    const std::filesystem::path p = dir / e.at("file").get<std::string>();
    if (!std::filesystem::exists(p)) return false;
    if (file_checksum(p) != e.at("checksum").get<std::string>()) return false;
  }
  return true;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
  auto f = open_in(path);
  nlohmann::json j;
  f >> j;
  return j;
}

}  // namespace tgrasp::io
