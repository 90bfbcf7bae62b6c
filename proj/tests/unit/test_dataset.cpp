// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "primefam/dataset.hpp"
#include "primefam/error.hpp"

using namespace primefam;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "primefam_test_dataset";
  fs::create_directories(dir);
  return dir / name;
}

SampleSpec small(std::uint64_t anchor, std::size_t count, std::uint64_t seed) {
  SampleSpec s;
  s.anchor = anchor;
  s.count = count;
  s.seed = seed;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary | std::ios::trunc) << text; }

}  // namespace

TEST_CASE("sampling is deterministic and seed dependent") {
  const DataSet a = sample_primes(small(1000, 5, 42));
  const DataSet b = sample_primes(small(1000, 5, 42));
  CHECK(a == b);
  CHECK(a.size() == 5);
  CHECK(!(sample_primes(small(1000, 5, 43)) == a));
}

TEST_CASE("thread count does not change the sample") {
  const SampleSpec s = small(100'000'000, 3000, 7);
  CHECK(sample_primes(s, 1) == sample_primes(s, 4));
}

TEST_CASE("rows are distinct ascending primes inside the window with oracle labels") {
  SampleSpec s = small(10'000, 300, 3);
  s.window = 100'000;
  const DataSet ds = sample_primes(s);
  REQUIRE(ds.size() == 300);
  std::map<std::uint64_t, oracle::SieveLabels> truth;
  for (const auto& o : oracle::sieve_labels(s.anchor + s.window + 1000)) truth[o.p] = o;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.rows[i];
    if (i) CHECK(ds.rows[i - 1].ctx.p < r.ctx.p);
    CHECK(r.ctx.p >= s.anchor);
    CHECK(r.ctx.p <= s.anchor + s.window);
    REQUIRE(truth.count(r.ctx.p));
    const auto& o = truth[r.ctx.p];
    CHECK(r.labels == FamilyLabels{o.twin, o.sophie_germain, o.safe, o.cousin, o.sexy, o.chen, o.isolated});
    CHECK(numtheory::is_well_formed(r.ctx));
    CHECK(r.split == "sample");
  }
  CHECK(ds.prevalence == family_prevalence(ds.labels()));
}

TEST_CASE("every prime in a small window is reachable") {
  // Rejection sampling must not skip primes that follow short gaps.
  SampleSpec s = small(1'000'000, 70, 11);
  s.window = 7'000;
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    s.seed = seed;
    for (const auto& r : sample_primes(s).rows) seen.insert(r.ctx.p);
  }
  std::size_t in_window = 0;
  const auto prime = oracle::sieve(s.anchor + s.window);
  for (std::uint64_t n = s.anchor; n < prime.size(); ++n) in_window += prime[n];
  CHECK(seen.size() == in_window);
}

TEST_CASE("train_mix splits the count over three anchors") {
  SampleSpec s = small(0, 3000, 5);
  s.mode = SampleMode::train_mix;
  const DataSet ds = sample_primes(s);
  REQUIRE(ds.size() == 3000);
  std::array<std::size_t, 3> per{};
  for (const auto& r : ds.rows)
    for (std::size_t i = 0; i < 3; ++i)
      if (r.ctx.p >= kTrainAnchors[i] && r.ctx.p <= kTrainAnchors[i] + default_window(kTrainAnchors[i])) ++per[i];
  CHECK(per == std::array<std::size_t, 3>{1000, 1000, 1000});
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(sample_primes(small(1000, 0, 1)), InvalidArgument);
  SampleSpec tight = small(1000, 50, 1);
  tight.window = 4999;
  CHECK_THROWS_AS(sample_primes(tight), InvalidArgument);
  tight.window = 5000;
  CHECK_NOTHROW(sample_primes(tight));
  SampleSpec huge = small(~0ULL - 10, 1, 1);
  huge.window = 1000;
  CHECK_THROWS_AS(sample_primes(huge), InvalidArgument);
}

TEST_CASE("default window") {
  CHECK(default_window(500'000'000) == 10'000'000);
  CHECK(default_window(1'000'000'000) == 10'000'000);
  CHECK(default_window(10'000'000'000ULL) == 1'000'000'000);
}

TEST_CASE("csv round trip is the identity") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    SampleSpec s = small(1'000'000'000'000ULL, 3, seed);
    s.tag = "ood12";
    const DataSet ds = sample_primes(s);
    const fs::path p = temp_path("rt_" + std::to_string(seed) + ".csv");
    save_csv(ds, p);
    CHECK(load_csv(p) == ds);
    const std::string first = slurp(p);
    save_csv(load_csv(p), p);
    CHECK(slurp(p) == first);
  }
}

TEST_CASE("csv schema errors") {
  const DataSet ds = sample_primes(small(1000, 3, 9));
  const fs::path good = temp_path("good.csv");
  save_csv(ds, good);
  const std::string text = slurp(good);
  const fs::path bad = temp_path("bad.csv");

  SUBCASE("version line") {
    std::string t = text;
    t.replace(t.find("v1"), 2, "v9");
    write(bad, t);
    CHECK_THROWS_AS(load_csv(bad), SchemaError);
  }
  SUBCASE("missing column") {
    std::string t = text;
    const auto pos = t.find(",y_chen");
    t.erase(pos, 7);
    write(bad, t);
    CHECK_THROWS_AS(load_csv(bad), SchemaError);
  }
  SUBCASE("label out of range") {
    std::string t = text;
    const auto row = t.find('\n', t.find("p,p_prev")) + 1;
    const auto field = t.find(",0,", row);
    REQUIRE(field != std::string::npos);
    t.replace(field, 3, ",2,");
    write(bad, t);
    CHECK_THROWS_AS(load_csv(bad), SchemaError);
  }
  SUBCASE("empty file") {
    write(bad, "");
    CHECK_THROWS_AS(load_csv(bad), SchemaError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_csv(temp_path("nope.csv")), IoError); }
}

TEST_CASE("standard suite sizes, disjointness and prevalence ordering") {
  const auto suite = standard_suite(42);
  CHECK(suite.at("train").size() == 200'000);
  CHECK(suite.at("val").size() == 20'000);
  CHECK(suite.at("ood10").size() == 10'000);
  CHECK(suite.at("ood12").size() == 10'000);
  CHECK(suite.at("ood14").size() == 8'000);
  CHECK(suite.at("ood16").size() == 15'000);
  std::set<std::uint64_t> train;
  for (const auto& r : suite.at("train").rows) train.insert(r.ctx.p);
  std::size_t overlap = 0;
  for (const auto& r : suite.at("val").rows) overlap += train.count(r.ctx.p);
  CHECK(overlap == 0);
  const auto& v = suite.at("val").prevalence;
  const auto idx = [](Family f) { return static_cast<std::size_t>(f); };
  CHECK(v[idx(Family::sexy)] > v[idx(Family::twin)]);
  CHECK(v[idx(Family::twin)] > v[idx(Family::safe)]);
  CHECK(std::abs(v[idx(Family::twin)] - 0.129) <= 0.01);
  const auto specs = standard_suite_specs(42);
  CHECK(specs.size() == suite.size());
  for (const auto& s : specs) CHECK(suite.at(s.tag).spec == s);
}
