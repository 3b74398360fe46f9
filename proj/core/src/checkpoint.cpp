#include "tgrasp/nnet/checkpoint.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

namespace tgrasp::nnet {

void save_checkpoint(const std::filesystem::path& base,
                     const std::vector<ParamRef<float>>& entries) {
  std::ofstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("checkpoint: cannot write blob");
  nlohmann::json manifest;
  manifest["format"] = "tgrasp-checkpoint";
  manifest["version"] = 1;
  nlohmann::json tensors = nlohmann::json::array();
  size_t offset = 0;
  for (const auto& e : entries) {
    bin.write(reinterpret_cast<const char*>(e.value->data()),
              e.value->size() * sizeof(float));
    tensors.push_back({{"name", e.name}, {"shape", e.shape},
                       {"offset", offset}, {"size", e.value->size()}});
    offset += e.value->size();
  }
  manifest["tensors"] = tensors;
  std::ofstream js(base.string() + ".json");
  if (!js) throw std::runtime_error("checkpoint: cannot write manifest");
  js << manifest.dump(2) << "\n";
}

void load_checkpoint(const std::filesystem::path& base,
                     const std::vector<ParamRef<float>>& entries) {
  std::ifstream js(base.string() + ".json");
  if (!js) throw std::runtime_error("checkpoint: missing manifest " +
                                    base.string() + ".json");
  nlohmann::json manifest;
  js >> manifest;
  if (manifest.value("format", "") != "tgrasp-checkpoint")
    throw std::runtime_error("checkpoint: bad manifest format");

  struct Entry {
    size_t offset, size;
    std::vector<int> shape;
  };
  std::map<std::string, Entry> index;
  for (const auto& t : manifest.at("tensors"))
    index[t.at("name").get<std::string>()] = {
        t.at("offset").get<size_t>(), t.at("size").get<size_t>(),
        t.at("shape").get<std::vector<int>>()};

  std::ifstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("checkpoint: missing blob");
  for (const auto& e : entries) {
    auto it = index.find(e.name);
    if (it == index.end())
      throw std::runtime_error("checkpoint: missing tensor " + e.name);
    if (it->second.size != e.value->size() || it->second.shape != e.shape)
      throw std::runtime_error("checkpoint: shape mismatch for " + e.name);
    bin.seekg(static_cast<std::streamoff>(it->second.offset * sizeof(float)));
    bin.read(reinterpret_cast<char*>(e.value->data()),
             e.value->size() * sizeof(float));
    if (!bin) throw std::runtime_error("checkpoint: truncated blob");
  }
}

}  // namespace tgrasp::nnet
