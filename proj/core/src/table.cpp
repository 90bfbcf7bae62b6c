// SPDX-License-Identifier: Apache-2.0
#include "primefam/table.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "primefam/error.hpp"

namespace primefam {

std::string format_number(std::optional<double> v) {
  if (!v) return "NA";
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *v);
  return std::string(buf.data(), ptr);
}

std::string format_fixed(std::optional<double> v, int digits) {
  if (!v) return "NA";
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), *v, std::chars_format::fixed, digits);
  std::string s(buf.data(), ptr);
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.000"
  return s;
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw InvalidArgument("Table::add_row: expected " + std::to_string(columns.size()) + " cells, got " +
                          std::to_string(row.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw SchemaError("table has no column '" + name + "'");
}

std::optional<double> Table::number(std::size_t row, const std::string& col) const {
  const std::string& cell = rows.at(row).at(column(col));
  if (cell == "NA" || cell.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) throw SchemaError("not a number: '" + cell + "'");
  return v;
}

void write_csv(const Table& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].find_first_of(",\"\n") != std::string::npos)
        throw InvalidArgument("write_csv: cell contains a delimiter: '" + cells[i] + "'");
      out << (i ? "," : "") << cells[i];
    }
    out << '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) cells.push_back(cur);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty CSV");
  t.columns = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != t.columns.size()) throw SchemaError(path.string() + ": ragged row");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string to_markdown(const Table& t) {
  std::ostringstream md;
  md << '|';
  for (const auto& c : t.columns) md << ' ' << c << " |";
  md << "\n|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) md << (i == 0 ? " --- |" : " ---: |");
  md << '\n';
  for (const auto& r : t.rows) {
    md << '|';
    for (const auto& c : r) md << ' ' << c << " |";
    md << '\n';
  }
  return md.str();
}

}  // namespace primefam
