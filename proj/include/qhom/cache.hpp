#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qhom/common.hpp"

namespace qhom {

// Content-addressed payload cache on disk. Keys are canonical strings built
// by the caller from everything that affects the payload (coefficient hash,
// Lambda, delta, N, eta set, tolerances, stage name); the filename is the
// FNV hash of the key. Entries carry a payload checksum; a corrupt entry is
// a miss with a warning. Writers are serialized, reads are lock-free.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::optional<std::string> lookup(const std::string& key) {
    std::ifstream in(path_of(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header)) return corrupt(key);
    std::istringstream hs(header);
    std::string magic, stored_sum;
    hs >> magic >> stored_sum;
    if (magic != "qhom-cache-v1") return corrupt(key);
    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (Fnv64().add(payload).hex() != stored_sum) return corrupt(key);
    return payload;
  }

  void store(const std::string& key, const std::string& payload) {
    std::lock_guard<std::mutex> lock(mu_);
    auto target = path_of(key);
    auto tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << "qhom-cache-v1 " << Fnv64().add(payload).hex() << "\n" << payload;
    }
    std::filesystem::rename(tmp, target);
  }

  std::vector<std::string> take_warnings() {
    std::lock_guard<std::mutex> lock(mu_);
    return std::exchange(warnings_, {});
  }

  std::filesystem::path path_of(const std::string& key) const {
    return dir_ / (Fnv64().add(key).hex() + ".qc");
  }

 private:
  std::optional<std::string> corrupt(const std::string& key) {
    std::lock_guard<std::mutex> lock(mu_);
    warnings_.push_back("corrupt cache entry for key '" + key + "' treated as miss");
    return std::nullopt;
  }

  std::filesystem::path dir_;
  std::mutex mu_;
  std::vector<std::string> warnings_;
};

}  // namespace qhom
