#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jca/rng.hpp"
#include "jca/subsequence.hpp"

namespace jca::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-scale, scale);
  return m;
}

/// Random sub-sequence with labels in [-0.9, 0.9].
inline SubSequence random_subsequence(const JcaDims& dims, Rng& rng, const std::string& id = "s") {
  std::vector<double> val(dims.clips), aro(dims.clips);
  for (auto& v : val) v = rng.uniform(-0.9, 0.9);
  for (auto& v : aro) v = rng.uniform(-0.9, 0.9);
  return SubSequence(id, ModalityFeatures(random_matrix(dims.clips, dims.audio_dim, rng), Modality::Audio),
                     ModalityFeatures(random_matrix(dims.clips, dims.visual_dim, rng), Modality::Visual),
                     std::move(val), std::move(aro));
}

inline std::vector<SubSequence> random_batch(const JcaDims& dims, std::size_t n, Rng& rng) {
  std::vector<SubSequence> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_subsequence(dims, rng, "s" + std::to_string(i)));
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ static_cast<std::uint64_t>(
                                                 std::filesystem::file_time_type::clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() / ("jca-" + tag + "-" + std::to_string(rng.next_u64() % 1000000007));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace jca::testing
