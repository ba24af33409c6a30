#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "usnl/data.hpp"

namespace usnl {

struct IngestReport {
  std::size_t n = 0;
  /// Canonical (i <= j) pairs held by the store.
  std::size_t pairs = 0;
  /// Known entries of the full symmetric matrix (off-diagonal pairs twice).
  std::size_t known = 0;
  double density = 0.0;
  std::size_t diagonal_count = 0;
  double raw_max = 0.0;
  double scale = 1.0;
  std::size_t merged_duplicates = 0;
};

struct Ingested {
  TripleStore store;
  IngestReport report;
};

struct EdgeListOptions {
  bool normalize = true;
};

/// Whitespace-separated `node_a node_b weight` lines. The first non-blank
/// line may be a header (detected by a non-numeric weight field). Labels map
/// to indices in first-appearance order. Lines starting with '#' are skipped.
Ingested parse_edge_list(const std::string& path, const EdgeListOptions& options = {});
Ingested parse_edge_list(std::istream& in, const EdgeListOptions& options = {});

/// Coordinate-format symmetric MatrixMarket (real, integer or pattern).
/// Pattern entries get weight 1.
Ingested parse_matrix_market(const std::string& path, bool normalize = true);
Ingested parse_matrix_market(std::istream& in, bool normalize = true);

IngestReport make_report(const TripleStore& store, double raw_max, std::size_t merged);
void write_report(std::ostream& out, const IngestReport& report);

/// Store text: header `n |entries| scale`, then `i j value` per entry.
/// Labels, if any, go to `<path>.labels`, one per line.
void export_store(const TripleStore& store, const std::string& path);
void write_store(std::ostream& out, const TripleStore& store);
TripleStore import_store(const std::string& path);
TripleStore read_store(std::istream& in);

}  // namespace usnl
