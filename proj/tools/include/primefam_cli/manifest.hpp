// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace primefam::cli {

/// 64-bit FNV-1a over a file's bytes, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

/// manifest.json of one output directory. The constructor writes it with
/// status "running"; finalize() rewrites it with output hashes and wall time.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, std::string subcommand, nlohmann::json config);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void finalize();

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  void write(bool done);

  std::filesystem::path dir_;
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace primefam::cli
