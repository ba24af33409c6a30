#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "usnl/errors.hpp"
#include "usnl/ingest.hpp"

using namespace usnl;

namespace {

Ingested edges(const std::string& text, bool normalize = true) {
  std::istringstream in(text);
  return parse_edge_list(in, EdgeListOptions{normalize});
}

Ingested mtx(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market(in);
}

std::string error_of(const std::string& text) {
  try {
    edges(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("both orientations of a pair collapse to one normalized entry") {
  const auto ing = edges("a b 800\nb a 800\n");
  REQUIRE(ing.store.size() == 1);
  CHECK(ing.store.entry(0) == Entry{0, 1, 1.0});
  CHECK(ing.store.scale() == 800.0);
  CHECK(ing.report.merged_duplicates == 1);
  CHECK(ing.report.known == 2);
  CHECK(ing.store.labels() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("self-loops count on the diagonal") {
  const auto ing = edges("p p 500\np q 250\n");
  CHECK(ing.report.diagonal_count == 1);
  CHECK(ing.report.known == 3);
  CHECK(ing.report.raw_max == 500.0);
  CHECK(ing.store.entry(0) == Entry{0, 0, 1.0});
  CHECK(ing.store.entry(1) == Entry{0, 1, 0.5});
}

TEST_CASE("header, comments and blank lines") {
  const auto ing = edges("source target weight\n\n# note\nx y 2\ny z 4\n");
  CHECK(ing.report.n == 3);
  CHECK(ing.store.size() == 2);
  CHECK(ing.store.entry(1).value == 1.0);
}

TEST_CASE("normalization can be disabled") {
  const auto ing = edges("a b 3\nb c 6\n", false);
  CHECK(ing.store.scale() == 1.0);
  CHECK(ing.store.entry(1).value == 6.0);
}

TEST_CASE("malformed edge lists are rejected with line numbers") {
  CHECK(error_of("a b 1\nb c\n").find("line 2") != std::string::npos);
  CHECK(error_of("a b 1\nb c oops\n").find("line 2") != std::string::npos);
  CHECK(error_of("a b -1\n").find("line 1") != std::string::npos);
  CHECK(error_of("a b 1\nc d nan\n").find("line 2") != std::string::npos);
  CHECK_FALSE(error_of("").empty());
  CHECK_FALSE(error_of("# only a comment\n").empty());
  CHECK_FALSE(error_of("h1 h2 h3\n").empty());
}

TEST_CASE("MatrixMarket symmetric pattern") {
  const auto ing = mtx("%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n3 3 2\n2 1\n3 1\n");
  REQUIRE(ing.store.size() == 2);
  CHECK(ing.store.entry(0) == Entry{0, 1, 1.0});
  CHECK(ing.store.entry(1) == Entry{0, 2, 1.0});
  CHECK(ing.store.scale() == 1.0);
  CHECK(ing.report.n == 3);
  CHECK(ing.report.known == 4);
  CHECK(ing.store.labels().empty());
}

TEST_CASE("MatrixMarket real values are normalized") {
  const auto ing = mtx("%%MatrixMarket matrix coordinate real symmetric\n4 4 3\n1 1 2.0\n4 2 8\n3 2 4\n");
  CHECK(ing.store.scale() == 8.0);
  CHECK(ing.store.entry(0) == Entry{0, 0, 0.25});
  CHECK(ing.store.entry(2) == Entry{1, 3, 1.0});
  CHECK(ing.report.density == doctest::Approx(5.0 / 16.0));
}

TEST_CASE("MatrixMarket rejections") {
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix array real symmetric\n2 2\n1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate real symmetric\n2 3 1\n1 2 1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 2 1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n2 2 1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n"), DataError);
  CHECK_THROWS_AS(mtx("%%MatrixMarket matrix coordinate complex symmetric\n2 2 1\n1 2 1 0\n"), DataError);
  CHECK_THROWS_AS(mtx(""), DataError);
}

TEST_CASE("store files round-trip with labels") {
  testing::TempDir dir;
  const std::string src = dir.file("g.txt");
  {
    std::ofstream out(src);
    out << "u v 0.3\nv w 1e-7\nw u 123456.789\nu u 17\nz v 0.1\n";
  }
  const auto ing = parse_edge_list(src);
  const std::string path = dir.file("g.store");
  export_store(ing.store, path);
  const auto back = import_store(path);
  CHECK(back == ing.store);
  CHECK(back.labels() == ing.store.labels());

  // value * scale recovers the raw weight
  std::map<std::pair<std::string, std::string>, double> raw{
      {{"u", "v"}, 0.3}, {{"v", "w"}, 1e-7}, {{"u", "w"}, 123456.789}, {{"u", "u"}, 17}, {{"v", "z"}, 0.1}};
  for (const auto& e : back.entries()) {
    auto a = back.labels()[e.i], b = back.labels()[e.j];
    if (b < a) std::swap(a, b);
    REQUIRE(raw.count({a, b}) == 1);
    CHECK(std::fabs(e.value * back.scale() - raw[{a, b}]) <= 1e-9 * raw[{a, b}]);
  }
  // labels and indices are in bijection
  CHECK(std::set<std::string>(back.labels().begin(), back.labels().end()).size() == back.n());
}

TEST_CASE("store text rejects inconsistent content") {
  std::istringstream short_body("3 2 1\n0 1 0.5\n");
  CHECK_THROWS_AS(read_store(short_body), DataError);
  std::istringstream bad_header("3 x 1\n");
  CHECK_THROWS_AS(read_store(bad_header), DataError);
  std::istringstream dup("3 2 1\n0 1 0.5\n1 0 0.5\n");
  CHECK_THROWS_AS(read_store(dup), DataError);
  std::istringstream range("3 1 1\n0 3 0.5\n");
  CHECK_THROWS_AS(read_store(range), DataError);
}

TEST_CASE("write_store is exact for awkward doubles") {
  const std::vector<RawTriple> raw{{0, 1, 0.1}, {1, 2, 1.0 / 3.0}, {2, 2, 5e-324}};
  const auto store = build_store(raw, 3);
  std::stringstream io;
  write_store(io, store);
  CHECK(read_store(io) == store);
}

TEST_CASE("report text") {
  const auto ing = edges("a b 2\n");
  std::ostringstream out;
  write_report(out, ing.report);
  CHECK(out.str() ==
        "n=2\npairs=1\nknown=2\ndensity=0.5\ndensity_percent=50.00%\ndiagonal_count=0\n"
        "raw_max=2\nscale=2\nmerged_duplicates=0\n");
}
