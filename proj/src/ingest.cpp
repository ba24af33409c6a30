#include "usnl/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/core.h>

#include "numtext.hpp"
#include "usnl/errors.hpp"

namespace usnl {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    const std::size_t start = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path));
  return in;
}

Ingested finish(std::vector<RawTriple> raw, std::size_t n, bool normalize,
                std::vector<std::string> labels) {
  std::size_t merged = 0;
  TripleStore store = build_store(raw, n, &merged);
  double raw_max = 0.0;
  for (const auto& e : store.entries()) raw_max = std::max(raw_max, e.value);
  if (normalize && raw_max > 0.0) store = store.rescaled(raw_max);
  if (!labels.empty()) store = store.with_labels(std::move(labels));
  IngestReport report = make_report(store, raw_max, merged);
  return {std::move(store), report};
}

}  // namespace

Ingested parse_edge_list(std::istream& in, const EdgeListOptions& options) {
  std::unordered_map<std::string, Index> index_of;
  std::vector<std::string> labels;
  std::vector<RawTriple> raw;
  auto intern = [&](std::string_view label) {
    auto [it, inserted] = index_of.try_emplace(std::string(label), static_cast<Index>(labels.size()));
    if (inserted) labels.emplace_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const bool first = !seen_content;
    seen_content = true;
    if (tok.size() != 3) {
      throw DataError(fmt::format("line {}: expected `node_a node_b weight`, got {} field(s)", line_no, tok.size()));
    }
    const auto w = detail::parse_double(tok[2]);
    if (!w) {
      if (first) continue;  // header
      throw DataError(fmt::format("line {}: weight `{}` is not a number", line_no, tok[2]));
    }
    if (!(*w >= 0.0) || !std::isfinite(*w)) {
      throw DataError(fmt::format("line {}: negative or non-finite weight {}", line_no, tok[2]));
    }
    const Index a = intern(tok[0]);
    const Index b = intern(tok[1]);
    raw.push_back({a, b, *w});
  }
  if (raw.empty()) throw DataError("edge list contains no entries");
  const std::size_t n = labels.size();
  return finish(std::move(raw), n, options.normalize, std::move(labels));
}

Ingested parse_edge_list(const std::string& path, const EdgeListOptions& options) {
  auto in = open_input(path);
  return parse_edge_list(in, options);
}

Ingested parse_matrix_market(std::istream& in, bool normalize) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("MatrixMarket: empty file");
  const auto banner = split_ws(line);
  if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket" || lower(banner[1]) != "matrix") {
    throw DataError("MatrixMarket: missing `%%MatrixMarket matrix ...` banner");
  }
  if (lower(banner[2]) != "coordinate") throw DataError("MatrixMarket: only coordinate format is supported");
  const std::string field = lower(banner[3]);
  if (field != "real" && field != "integer" && field != "pattern" && field != "double") {
    throw DataError(fmt::format("MatrixMarket: unsupported field `{}`", banner[3]));
  }
  const std::string symmetry = lower(banner[4]);
  if (symmetry != "symmetric") {
    throw DataError(fmt::format("MatrixMarket: symmetry `{}` rejected; only symmetric matrices are accepted", banner[4]));
  }
  const bool pattern = field == "pattern";

  std::size_t line_no = 1;
  std::size_t rows = 0, cols = 0, nnz = 0;
  bool have_size = false;
  std::vector<RawTriple> raw;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '%') continue;
    if (!have_size) {
      const auto r = tok.size() == 3 ? detail::parse_int<std::size_t>(tok[0]) : std::nullopt;
      const auto c = tok.size() == 3 ? detail::parse_int<std::size_t>(tok[1]) : std::nullopt;
      const auto z = tok.size() == 3 ? detail::parse_int<std::size_t>(tok[2]) : std::nullopt;
      if (!r || !c || !z) throw DataError(fmt::format("line {}: expected `rows cols entries`", line_no));
      if (*r != *c) throw DataError(fmt::format("line {}: matrix is {}x{}, not square", line_no, *r, *c));
      rows = *r;
      cols = *c;
      nnz = *z;
      have_size = true;
      raw.reserve(nnz);
      continue;
    }
    if (tok.size() != (pattern ? 2u : 3u)) {
      throw DataError(fmt::format("line {}: expected {} fields, got {}", line_no, pattern ? 2 : 3, tok.size()));
    }
    const auto i = detail::parse_int<std::size_t>(tok[0]);
    const auto j = detail::parse_int<std::size_t>(tok[1]);
    if (!i || !j || *i < 1 || *j < 1 || *i > rows || *j > cols) {
      throw DataError(fmt::format("line {}: index out of the declared {}x{} range", line_no, rows, cols));
    }
    double w = 1.0;
    if (!pattern) {
      const auto v = detail::parse_double(tok[2]);
      if (!v) throw DataError(fmt::format("line {}: value `{}` is not a number", line_no, tok[2]));
      if (!(*v >= 0.0) || !std::isfinite(*v)) throw DataError(fmt::format("line {}: negative or non-finite value", line_no));
      w = *v;
    }
    if (raw.size() == nnz) {
      throw DataError(fmt::format("line {}: more entries than the {} declared in the header", line_no, nnz));
    }
    raw.push_back({static_cast<Index>(*i - 1), static_cast<Index>(*j - 1), w});
  }
  if (!have_size) throw DataError("MatrixMarket: missing size line");
  if (raw.size() != nnz) {
    throw DataError(fmt::format("MatrixMarket: header declares {} entries, file has {}", nnz, raw.size()));
  }
  if (raw.empty()) throw DataError("MatrixMarket: no entries");
  return finish(std::move(raw), rows, normalize, {});
}

Ingested parse_matrix_market(const std::string& path, bool normalize) {
  auto in = open_input(path);
  return parse_matrix_market(in, normalize);
}

IngestReport make_report(const TripleStore& store, double raw_max, std::size_t merged) {
  IngestReport r;
  r.n = store.n();
  r.pairs = store.size();
  r.known = store.known_count();
  r.density = density(store);
  r.diagonal_count = store.diagonal_count();
  r.raw_max = raw_max;
  r.scale = store.scale();
  r.merged_duplicates = merged;
  return r;
}

void write_report(std::ostream& out, const IngestReport& r) {
  out << "n=" << r.n << '\n'
      << "pairs=" << r.pairs << '\n'
      << "known=" << r.known << '\n'
      << "density=" << fmt::format("{:.6g}", r.density) << '\n'
      << "density_percent=" << fmt::format("{:.2f}%", 100.0 * r.density) << '\n'
      << "diagonal_count=" << r.diagonal_count << '\n'
      << "raw_max=" << detail::shortest(r.raw_max) << '\n'
      << "scale=" << detail::shortest(r.scale) << '\n'
      << "merged_duplicates=" << r.merged_duplicates << '\n';
}

void write_store(std::ostream& out, const TripleStore& store) {
  out << store.n() << ' ' << store.size() << ' ' << detail::shortest(store.scale()) << '\n';
  for (const auto& e : store.entries()) {
    out << e.i << ' ' << e.j << ' ' << detail::shortest(e.value) << '\n';
  }
}

void export_store(const TripleStore& store, const std::string& path) {
  {
    std::ofstream out(path);
    if (!out) throw DataError(fmt::format("cannot open {} for writing", path));
    write_store(out, store);
    if (!out) throw DataError(fmt::format("write to {} failed", path));
  }
  const std::string label_path = path + ".labels";
  if (!store.labels().empty()) {
    std::ofstream out(label_path);
    if (!out) throw DataError(fmt::format("cannot open {} for writing", label_path));
    for (const auto& l : store.labels()) out << l << '\n';
  } else {
    std::error_code ec;
    std::filesystem::remove(label_path, ec);
  }
}

TripleStore read_store(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("store: missing header");
  const auto head = split_ws(line);
  const auto n = head.size() == 3 ? detail::parse_int<std::size_t>(head[0]) : std::nullopt;
  const auto count = head.size() == 3 ? detail::parse_int<std::size_t>(head[1]) : std::nullopt;
  const auto scale = head.size() == 3 ? detail::parse_double(head[2]) : std::nullopt;
  if (!n || !count || !scale) throw DataError("store: header must be `n entries scale`");

  std::vector<Entry> entries;
  entries.reserve(*count);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const auto i = tok.size() == 3 ? detail::parse_int<Index>(tok[0]) : std::nullopt;
    const auto j = tok.size() == 3 ? detail::parse_int<Index>(tok[1]) : std::nullopt;
    const auto v = tok.size() == 3 ? detail::parse_double(tok[2]) : std::nullopt;
    if (!i || !j || !v) throw DataError(fmt::format("store line {}: expected `i j value`", line_no));
    entries.push_back({*i, *j, *v});
  }
  if (entries.size() != *count) {
    throw DataError(fmt::format("store: header declares {} entries, found {}", *count, entries.size()));
  }
  return restore_store(*n, std::move(entries), *scale);
}

TripleStore import_store(const std::string& path) {
  auto in = open_input(path);
  TripleStore store = read_store(in);
  std::ifstream labels_in(path + ".labels");
  if (labels_in) {
    std::vector<std::string> labels;
    std::string l;
    while (std::getline(labels_in, l)) labels.push_back(l);
    store = store.with_labels(std::move(labels));
  }
  return store;
}

}  // namespace usnl
