// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace primefam {

/// Shortest decimal text that round-trips to the same double ("NA" for nullopt).
std::string format_number(std::optional<double> v);
/// Fixed-point text with `digits` decimals ("NA" for nullopt).
std::string format_fixed(std::optional<double> v, int digits);

/// A small string table used for every report CSV. Missing numeric values are "NA".
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  /// Index of a column; throws SchemaError if absent.
  std::size_t column(const std::string& name) const;
  std::optional<double> number(std::size_t row, const std::string& col) const;

  friend bool operator==(const Table&, const Table&) = default;
};

void write_csv(const Table& t, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

/// GitHub-flavoured markdown rendering.
std::string to_markdown(const Table& t);

}  // namespace primefam
