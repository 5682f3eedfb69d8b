#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "smoothride/route.hpp"

namespace fixtures {

/// Fresh, empty scratch directory for one test.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "smoothride_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Plan with every offset at `offset` and every speed at `speed`.
inline smoothride::MotionPlan uniform_plan(std::size_t n, double offset, double speed) {
  return {std::vector<double>(n, offset), std::vector<double>(n, speed)};
}

}  // namespace fixtures
