#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "kftrack/geometry.hpp"

namespace testing {

namespace fs = std::filesystem;

// Test-side randomness is std::mt19937_64 so oracles never share a generator
// with the code under test.
using Gen = std::mt19937_64;

inline double uniform(Gen& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(Gen& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

// Integral top-left pixel box inside a grid.
struct PixelBox {
  int x, y, w, h;
  kftrack::BBox box() const { return kftrack::BBox::from_top_left(x, y, w, h); }
};

inline PixelBox random_pixel_box(Gen& g, int grid) {
  const int w = uniform_int(g, 1, grid / 2);
  const int h = uniform_int(g, 1, grid / 2);
  return {uniform_int(g, 0, grid - w), uniform_int(g, 0, grid - h), w, h};
}

inline std::vector<std::uint8_t> raster(const PixelBox& b, int grid) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(grid) * grid, 0);
  for (int r = b.y; r < b.y + b.h; ++r)
    for (int c = b.x; c < b.x + b.w; ++c) bits[static_cast<std::size_t>(r) * grid + c] = 1;
  return bits;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("kftrack_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& p) const { return path_ / p; }

 private:
  fs::path path_;
};

}  // namespace testing
