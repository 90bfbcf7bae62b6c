// SPDX-License-Identifier: Apache-2.0
#include "primefam/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "primefam/error.hpp"
#include "primefam/parallel.hpp"
#include "primefam/rng.hpp"

namespace primefam {
namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t kMaxU64 = std::numeric_limits<std::uint64_t>::max();

struct Part {
  std::uint64_t anchor;
  std::size_t count;
  std::uint64_t window;
};

std::vector<Part> split_parts(const SampleSpec& spec) {
  if (spec.mode == SampleMode::single_scale) {
    return {{spec.anchor, spec.count, spec.window ? spec.window : default_window(spec.anchor)}};
  }
  std::vector<Part> parts;
  const std::size_t base = spec.count / kTrainAnchors.size();
  std::size_t extra = spec.count % kTrainAnchors.size();
  for (std::uint64_t a : kTrainAnchors) {
    const std::size_t c = base + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
    parts.push_back({a, c, spec.window ? spec.window : default_window(a)});
  }
  return parts;
}

// Distinct primes for one anchor, in draw order.
std::vector<std::uint64_t> draw_primes(const Part& part, std::uint64_t seed, unsigned threads) {
  if (part.anchor < 3) throw InvalidArgument("sample_primes: anchor must be >= 3");
  if (part.anchor > kMaxU64 - 1000 || part.window > kMaxU64 - 1000 - part.anchor)
    throw InvalidArgument("sample_primes: window does not fit in 64 bits above anchor");
  if (part.count == 0) return {};
  if (part.window / 100 < part.count)
    throw InvalidArgument("sample_primes: window " + std::to_string(part.window) + " too small for " +
                          std::to_string(part.count) + " primes (need window >= 100 * count)");

  const CounterRng rng = CounterRng::derive(seed, Stream::dataset, {part.anchor, part.window});
  const std::uint64_t span = part.window + 1;
  // About ln(anchor + window) draws per accepted prime; bit width overestimates it.
  const auto bits = static_cast<std::size_t>(std::bit_width(part.anchor + part.window));
  const std::size_t budget = 10 * bits * part.count + 1000;

  std::vector<std::uint64_t> out;
  out.reserve(part.count);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(part.count * 2);
  std::size_t position = 0;
  while (out.size() < part.count) {
    if (position >= budget)
      throw InvalidArgument("sample_primes: exhausted " + std::to_string(budget) + " draws before reaching " +
                            std::to_string(part.count) + " distinct primes; enlarge the window");
    const std::size_t need = part.count - out.size();
    const std::size_t round = std::min(budget - position, need * bits + 64);
    std::vector<std::uint8_t> accepted(round);
    std::vector<std::uint64_t> drawn(round);
    parallel_for(round, threads, [&](std::size_t i) {
      // Multiply-shift range reduction; the bias is below window / 2^64.
      drawn[i] = part.anchor + static_cast<std::uint64_t>((static_cast<u128>(rng.at(position + i)) * span) >> 64);
      accepted[i] = numtheory::is_prime(drawn[i]) ? 1 : 0;
    });
    position += round;
    for (std::size_t i = 0; i < round && out.size() < part.count; ++i)
      if (accepted[i] && seen.insert(drawn[i]).second) out.push_back(drawn[i]);
  }
  return out;
}

std::string mode_text(SampleMode m) { return m == SampleMode::train_mix ? "train_mix" : "single_scale"; }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::uint64_t parse_u64(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw SchemaError(path.string() + ":" + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = {"p", "p_prev", "p_next", "g_minus", "g_plus"};
    for (Family f : kFamilies) c.push_back("y_" + std::string(family_name(f)));
    c.emplace_back("split");
    return c;
  }();
  return cols;
}

}  // namespace

std::uint64_t default_window(std::uint64_t anchor) noexcept {
  return anchor <= 1'000'000'000ULL ? 10'000'000ULL : 1'000'000'000ULL;
}

std::vector<FamilyLabels> DataSet::labels() const {
  std::vector<FamilyLabels> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.labels);
  return out;
}

void DataSet::refresh_prevalence() {
  if (rows.empty()) {
    prevalence = {};
    return;
  }
  const auto l = labels();
  prevalence = family_prevalence(l);
}

DataSet sample_primes(const SampleSpec& spec, unsigned threads) {
  if (spec.count == 0) throw InvalidArgument("sample_primes: count must be >= 1");
  std::vector<std::uint64_t> primes;
  for (const Part& part : split_parts(spec)) {
    auto drawn = draw_primes(part, spec.seed, threads);
    primes.insert(primes.end(), drawn.begin(), drawn.end());
  }
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  if (primes.size() != spec.count)
    throw InvalidArgument("sample_primes: sub-range windows overlap; got " + std::to_string(primes.size()) +
                          " distinct primes");

  DataSet ds;
  ds.spec = spec;
  ds.rows.resize(primes.size());
  parallel_for(primes.size(), threads, [&](std::size_t i) {
    DataRow& row = ds.rows[i];
    row.ctx = numtheory::make_context(primes[i]);
    row.labels = label_prime(row.ctx);
    row.split = spec.tag;
  });
  ds.refresh_prevalence();
  return ds;
}

std::vector<SampleSpec> standard_suite_specs(std::uint64_t seed) {
  std::vector<SampleSpec> specs;
  specs.push_back({kTrainAnchors[0], 200'000, 0, seed, SampleMode::train_mix, "train"});
  specs.push_back({500'000'000ULL, 20'000, 0, seed, SampleMode::single_scale, "val"});
  specs.push_back({10'000'000'000ULL, 10'000, 0, seed, SampleMode::single_scale, "ood10"});
  specs.push_back({1'000'000'000'000ULL, 10'000, 0, seed, SampleMode::single_scale, "ood12"});
  specs.push_back({100'000'000'000'000ULL, 8'000, 0, seed, SampleMode::single_scale, "ood14"});
  specs.push_back({10'000'000'000'000'000ULL, 15'000, 0, seed, SampleMode::single_scale, "ood16"});
  return specs;
}

std::map<std::string, DataSet> standard_suite(std::uint64_t seed, unsigned threads) {
  std::map<std::string, DataSet> suite;
  for (const SampleSpec& spec : standard_suite_specs(seed)) suite.emplace(spec.tag, sample_primes(spec, threads));

  const auto& train = suite.at("train").rows;
  const auto& val = suite.at("val").rows;
  std::unordered_set<std::uint64_t> train_primes;
  for (const auto& r : train) train_primes.insert(r.ctx.p);
  for (const auto& r : val)
    if (train_primes.count(r.ctx.p)) throw InvalidArgument("standard_suite: val overlaps train at p=" + std::to_string(r.ctx.p));
  return suite;
}

void save_csv(const DataSet& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const SampleSpec& s = ds.spec;
  out << kDatasetVersionLine << '\n';
  out << "# spec anchor=" << s.anchor << " count=" << s.count << " window=" << s.window << " seed=" << s.seed
      << " mode=" << mode_text(s.mode) << " tag=" << s.tag << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const DataRow& r : ds.rows) {
    out << r.ctx.p << ',' << r.ctx.p_prev << ',' << r.ctx.p_next << ',' << r.ctx.g_minus << ',' << r.ctx.g_plus;
    for (Family f : kFamilies) out << ',' << (r.labels[f] ? '1' : '0');
    out << ',' << r.split << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

DataSet load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw SchemaError(path.string() + ": empty file");
  ++lineno;
  if (line != kDatasetVersionLine)
    throw SchemaError(path.string() + ": expected '" + kDatasetVersionLine + "', found '" + line + "'");

  DataSet ds;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# spec ", 0) == 0) {
      std::istringstream kv(line.substr(7));
      std::string tok;
      while (kv >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "anchor") ds.spec.anchor = parse_u64(val, path, lineno);
        else if (key == "count") ds.spec.count = parse_u64(val, path, lineno);
        else if (key == "window") ds.spec.window = parse_u64(val, path, lineno);
        else if (key == "seed") ds.spec.seed = parse_u64(val, path, lineno);
        else if (key == "mode") ds.spec.mode = val == "train_mix" ? SampleMode::train_mix : SampleMode::single_scale;
        else if (key == "tag") ds.spec.tag = val;
      }
      continue;
    }
    if (line.rfind('#', 0) == 0) continue;
    break;  // header row
  }
  if (line.empty() || line[0] == '#') throw SchemaError(path.string() + ": missing header row");

  const auto header = split_fields(line);
  std::vector<std::size_t> index;
  for (const auto& col : csv_columns()) {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw SchemaError(path.string() + ": missing column '" + col + "'");
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size())
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(f.size()));
    DataRow r;
    r.ctx.p = parse_u64(f[index[0]], path, lineno);
    r.ctx.p_prev = parse_u64(f[index[1]], path, lineno);
    r.ctx.p_next = parse_u64(f[index[2]], path, lineno);
    r.ctx.g_minus = parse_u64(f[index[3]], path, lineno);
    r.ctx.g_plus = parse_u64(f[index[4]], path, lineno);
    if (!numtheory::is_well_formed(r.ctx))
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": inconsistent prime context");
    for (std::size_t k = 0; k < kFamilyCount; ++k) {
      const std::string& v = f[index[5 + k]];
      if (v != "0" && v != "1")
        throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": label must be 0 or 1");
      r.labels[kFamilies[k]] = v == "1";
    }
    r.split = f[index[12]];
    if (!ds.rows.empty() && ds.rows.back().ctx.p >= r.ctx.p)
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": rows must be strictly ascending in p");
    ds.rows.push_back(std::move(r));
  }
  ds.refresh_prevalence();
  return ds;
}

}  // namespace primefam
