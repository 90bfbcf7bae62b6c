// SPDX-License-Identifier: Apache-2.0
#include "primefam_cli/manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include "primefam/error.hpp"

namespace primefam::cli {

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

Manifest::Manifest(std::filesystem::path dir, std::string subcommand, nlohmann::json config)
    : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  doc_["subcommand"] = std::move(subcommand);
  doc_["config"] = std::move(config);
  doc_["version"] = PRIMEFAM_VERSION;
  doc_["inputs"] = nlohmann::json::object();
  doc_["outputs"] = nlohmann::json::object();
  write(false);
}

void Manifest::add_input(const std::filesystem::path& path) { doc_["inputs"][path.string()] = hash_file(path); }

void Manifest::add_output(const std::filesystem::path& path) {
  doc_["outputs"][path.filename().string()] = hash_file(path);
}

void Manifest::finalize() { write(true); }

void Manifest::write(bool done) {
  doc_["status"] = done ? "complete" : "running";
  if (done)
    doc_["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc_.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace primefam::cli
