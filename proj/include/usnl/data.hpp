#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace usnl {

using Index = std::uint32_t;
/// Position of an entry inside TripleStore::entries().
using Position = std::uint32_t;

/// One known weight of the symmetric matrix, stored once with i <= j.
struct Entry {
  Index i = 0;
  Index j = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct RawTriple {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
};

/// Sparse storage of the known entries of a symmetric nonnegative matrix.
///
/// Each undirected pair appears once in canonical orientation (i <= j),
/// sorted by (i, j). Immutable after construction; safe to share read-only
/// across concurrent training runs.
class TripleStore {
 public:
  TripleStore() = default;

  std::size_t n() const noexcept { return n_; }
  std::span<const Entry> entries() const noexcept { return entries_; }
  const Entry& entry(Position p) const { return entries_.at(p); }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Divisor applied to the raw weights at ingestion (1 when unnormalized).
  double scale() const noexcept { return scale_; }

  /// Known entries of the full matrix: off-diagonal pairs count twice.
  std::size_t known_count() const noexcept { return 2 * entries_.size() - diagonal_count_; }
  std::size_t diagonal_count() const noexcept { return diagonal_count_; }

  /// Optional entity labels, index-aligned (empty when the source had none).
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Same entries with values divided by `divisor`; scale is multiplied by it.
  TripleStore rescaled(double divisor) const;
  TripleStore with_labels(std::vector<std::string> labels) const;

  friend bool operator==(const TripleStore&, const TripleStore&) = default;

 private:
  friend TripleStore build_store(std::span<const RawTriple>, std::size_t, std::size_t*);
  friend TripleStore restore_store(std::size_t, std::vector<Entry>, double);

  std::size_t n_ = 0;
  std::vector<Entry> entries_;
  double scale_ = 1.0;
  std::size_t diagonal_count_ = 0;
  std::vector<std::string> labels_;
};

/// Canonicalizes to i <= j, merges duplicate pairs (last occurrence wins,
/// one warning summarizing the merge count on stderr) and sorts by (i, j).
/// Throws DataError on a negative or non-finite value, an index >= n, or an
/// empty input. `merged`, if given, receives the number of dropped duplicates.
TripleStore build_store(std::span<const RawTriple> raw, std::size_t n,
                        std::size_t* merged = nullptr);

/// Rebuilds a store from already-canonical entries and a recorded scale,
/// validating the same invariants as build_store. Duplicate pairs are an
/// error here.
TripleStore restore_store(std::size_t n, std::vector<Entry> entries, double scale);

/// Known-entry count over n^2.
double density(std::size_t known, std::size_t n);
double density(const TripleStore& store);

inline constexpr int kFoldCount = 10;

struct Split {
  std::vector<Position> train;
  std::vector<Position> validation;
  std::vector<Position> test;
};

/// Tenfold partition of a store's entry positions.
class FoldPlan {
 public:
  FoldPlan() = default;
  explicit FoldPlan(std::vector<std::uint8_t> fold_of);

  std::span<const std::uint8_t> fold_of() const noexcept { return fold_of_; }
  std::size_t size() const noexcept { return fold_of_.size(); }
  std::array<std::size_t, kFoldCount> fold_sizes() const;

  /// validation = fold r; test = folds (r+1)%10 and (r+2)%10; train = the
  /// other seven. Each list is ascending.
  Split split(int rotation) const;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;

 private:
  std::vector<std::uint8_t> fold_of_;
};

/// Seeded Fisher-Yates shuffle of the positions, dealt round-robin into ten
/// folds. Throws DataError when fewer than ten entries exist.
FoldPlan make_folds(std::size_t entry_count, std::uint64_t seed);
FoldPlan make_folds(const TripleStore& store, std::uint64_t seed);

}  // namespace usnl
