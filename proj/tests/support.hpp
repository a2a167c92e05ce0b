#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "valuecast/error.hpp"
#include "valuecast/features.hpp"

namespace support {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(VALUECAST_FIXTURE_DIR) / name;
}

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(VALUECAST_DATA_DIR) / name;
}

// Code of the valuecast::Error thrown by f, or nullopt-like sentinel -1.
inline int error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const valuecast::Error& e) {
    return static_cast<int>(e.code());
  }
  return -1;
}

inline int code(valuecast::ErrorCode c) { return static_cast<int>(c); }

// Synthetic players pushed through ingest and feature extraction.
valuecast::features::FeatureMatrix synthetic_matrix(std::size_t n, std::uint64_t seed);

// The bundled n = 500 benchmark dataset read from data/synthetic.
valuecast::features::FeatureMatrix bundled_matrix();

}  // namespace support
