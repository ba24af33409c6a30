#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "test_support.hpp"
#include "usnl/data.hpp"
#include "usnl/errors.hpp"

using namespace usnl;

TEST_CASE("build_store canonicalizes orientation") {
  const std::vector<RawTriple> raw{{3, 1, 5.0}};
  const auto s = build_store(raw, 4);
  REQUIRE(s.size() == 1);
  CHECK(s.entries()[0] == Entry{1, 3, 5.0});
  CHECK(s.scale() == 1.0);
  CHECK(s.n() == 4);
}

TEST_CASE("build_store keeps self-loops") {
  const std::vector<RawTriple> raw{{0, 0, 2.0}};
  const auto s = build_store(raw, 1);
  REQUIRE(s.size() == 1);
  CHECK(s.entries()[0] == Entry{0, 0, 2.0});
  CHECK(s.diagonal_count() == 1);
  CHECK(s.known_count() == 1);
}

TEST_CASE("build_store merges both orientations into one entry") {
  const std::vector<RawTriple> raw{{1, 2, 4.0}, {2, 1, 4.0}};
  std::size_t merged = 0;
  const auto s = build_store(raw, 3, &merged);
  REQUIRE(s.size() == 1);
  CHECK(s.entries()[0] == Entry{1, 2, 4.0});
  CHECK(merged == 1);
  CHECK(s.known_count() == 2);
}

TEST_CASE("duplicate merge matches a group-by oracle with last-wins") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> idx(0, 9);
  std::uniform_real_distribution<double> val(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RawTriple> raw;
    std::map<std::pair<Index, Index>, double> oracle;
    for (int k = 0; k < 60; ++k) {
      RawTriple t{idx(rng), idx(rng), val(rng)};
      raw.push_back(t);
      oracle[{std::min(t.i, t.j), std::max(t.i, t.j)}] = t.value;
    }
    const auto s = build_store(raw, 10);
    REQUIRE(s.size() == oracle.size());
    std::size_t k = 0;
    for (const auto& [pair, v] : oracle) {
      CHECK(s.entries()[k].i == pair.first);
      CHECK(s.entries()[k].j == pair.second);
      CHECK(s.entries()[k].value == v);
      ++k;
    }
    CHECK(s.size() <= 10 * 11 / 2);
  }
}

TEST_CASE("build_store rejects bad triples") {
  const std::vector<RawTriple> negative{{0, 1, -0.5}};
  CHECK_THROWS_AS(build_store(negative, 3), DataError);
  const std::vector<RawTriple> out_of_range{{0, 3, 1.0}};
  CHECK_THROWS_AS(build_store(out_of_range, 3), DataError);
  CHECK_THROWS_AS(build_store({}, 3), DataError);
  try {
    build_store(negative, 3);
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
  }
}

TEST_CASE("density uses n^2 and matches published network densities") {
  // published network sizes: known entries, n -> percent to two decimals
  CHECK(std::round(density(1021786, 4181) * 10000.0) / 100.0 == doctest::Approx(5.85));
  CHECK(std::round(density(1182124, 5194) * 10000.0) / 100.0 == doctest::Approx(4.38));
  CHECK(std::round(density(2795876, 2573) * 10000.0) / 100.0 == doctest::Approx(42.23));
  CHECK(std::round(density(95188, 16726) * 10000.0) / 100.0 == doctest::Approx(0.03));
  CHECK(density(0, 10) == 0.0);
  CHECK_THROWS_AS(density(0, 0), DataError);
}

TEST_CASE("make_folds balances and is deterministic") {
  SUBCASE("divisible count") {
    const auto plan = make_folds(100, 3);
    for (auto s : plan.fold_sizes()) CHECK(s == 10);
  }
  SUBCASE("million-scale count matches integer division") {
    const std::size_t count = 1021786;
    const auto plan = make_folds(count, 11);
    const std::size_t q = count / kFoldCount, r = count % kFoldCount;
    std::size_t big = 0;
    for (auto s : plan.fold_sizes()) {
      CHECK((s == q || s == q + 1));
      big += s == q + 1;
    }
    CHECK(big == r);
  }
  SUBCASE("same seed, same plan; other seed, other plan") {
    const auto store = testing::random_store(30, 200, 5);
    CHECK(make_folds(store, 9) == make_folds(store, 9));
    CHECK_FALSE(make_folds(store, 9) == make_folds(store, 10));
  }
  CHECK_THROWS_AS(make_folds(9, 1), DataError);
}

TEST_CASE("split assigns 7/1/2 roles with wraparound") {
  std::vector<std::uint8_t> one_each(10);
  for (int k = 0; k < 10; ++k) one_each[k] = static_cast<std::uint8_t>(k);
  const FoldPlan plan(one_each);

  const auto s0 = plan.split(0);
  CHECK(s0.train.size() == 7);
  CHECK(s0.validation.size() == 1);
  CHECK(s0.test.size() == 2);

  const auto s9 = plan.split(9);
  CHECK(s9.validation == std::vector<Position>{9});
  CHECK(s9.test == std::vector<Position>{0, 1});

  CHECK_THROWS(plan.split(10));
  CHECK_THROWS(plan.split(-1));
}

TEST_CASE("split is a disjoint cover for every rotation") {
  for (std::size_t count : {10u, 57u, 1000u}) {
    const auto plan = make_folds(count, count);
    std::vector<int> test_hits(count, 0);
    for (int r = 0; r < kFoldCount; ++r) {
      const auto s = plan.split(r);
      std::vector<int> seen(count, 0);
      for (auto p : s.train) ++seen[p];
      for (auto p : s.validation) ++seen[p];
      for (auto p : s.test) ++seen[p], ++test_hits[p];
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      CHECK(std::is_sorted(s.train.begin(), s.train.end()));
    }
    CHECK(std::all_of(test_hits.begin(), test_hits.end(), [](int c) { return c == 2; }));
  }
}

TEST_CASE("rescaled keeps pairs and multiplies scale") {
  const auto s = testing::random_store(8, 20, 2);
  const auto r = s.rescaled(4.0);
  REQUIRE(r.size() == s.size());
  CHECK(r.scale() == 4.0);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(r.entries()[k].value * 4.0 == doctest::Approx(s.entries()[k].value));
  CHECK_THROWS_AS(s.rescaled(0.0), DataError);
}

TEST_CASE("restore_store rejects duplicates") {
  CHECK_THROWS_AS(restore_store(3, {{0, 1, 1.0}, {1, 0, 1.0}}, 1.0), DataError);
  CHECK_THROWS_AS(restore_store(3, {{0, 1, 1.0}}, 0.0), DataError);
  const auto s = restore_store(3, {{2, 1, 0.5}, {0, 0, 1.0}}, 2.0);
  CHECK(s.entries()[0] == Entry{0, 0, 1.0});
  CHECK(s.entries()[1] == Entry{1, 2, 0.5});
}
