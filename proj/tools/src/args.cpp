// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <limits>

#include "primefam/error.hpp"
#include "primefam_cli/cli.hpp"

namespace primefam::cli {

namespace {

bool mul_ok(std::uint64_t& v, std::uint64_t m) {
  if (v != 0 && m > std::numeric_limits<std::uint64_t>::max() / v) return false;
  v *= m;
  return true;
}

}  // namespace

std::uint64_t parse_scale(std::string_view text) {
  const std::string shown(text);
  auto bad = [&]() { return InvalidArgument("not a non-negative integer: '" + shown + "'"); };
  std::size_t i = 0;
  std::string mant_int, mant_frac;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) mant_int += text[i++];
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) mant_frac += text[i++];
  }
  if (mant_int.empty() && mant_frac.empty()) throw bad();
  long exp = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    if (i < text.size() && text[i] == '+') ++i;
    if (i == text.size()) throw bad();
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      exp = exp * 10 + (text[i] - '0');
      if (exp > 40) throw OverflowError("scale out of range: '" + shown + "'");
    }
  }
  if (i != text.size()) throw bad();

  // Shift the decimal point right by `exp`; leftover fractional digits must be zero.
  std::string digits = mant_int;
  std::size_t take = std::min<std::size_t>(mant_frac.size(), static_cast<std::size_t>(exp));
  digits += mant_frac.substr(0, take);
  for (char c : mant_frac.substr(take))
    if (c != '0') throw bad();
  std::uint64_t v = 0;
  for (char c : digits) {
    if (!mul_ok(v, 10)) throw OverflowError("scale out of range: '" + shown + "'");
    const auto d = static_cast<std::uint64_t>(c - '0');
    if (v > std::numeric_limits<std::uint64_t>::max() - d) throw OverflowError("scale out of range: '" + shown + "'");
    v += d;
  }
  for (long k = static_cast<long>(take); k < exp; ++k)
    if (!mul_ok(v, 10)) throw OverflowError("scale out of range: '" + shown + "'");
  return v;
}

std::vector<std::uint64_t> parse_scale_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_scale(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string scale_label(std::uint64_t v) {
  if (v == 0) return "0";
  int e = 0;
  std::uint64_t m = v;
  while (m % 10 == 0) {
    m /= 10;
    ++e;
  }
  if (e < 3) return std::to_string(v);
  return std::to_string(m) + "e" + std::to_string(e);
}

}  // namespace primefam::cli
