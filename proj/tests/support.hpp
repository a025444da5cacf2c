#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "scc/params.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return SCC_TEST_DATA_DIR; }
inline std::filesystem::path scenario_dir() { return SCC_TEST_SCENARIO_DIR; }

inline const scc::Params& desk() {
  static const scc::Params p = scc::load_params(data_dir() / "desk.params");
  return p;
}

inline const scc::Params& full() {
  static const scc::Params p = scc::load_params(data_dir() / "dice2016.params");
  return p;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("scc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
