#include "usnl/data.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <utility>

#include <fmt/core.h>

#include "usnl/errors.hpp"

namespace usnl {

DivergenceError::DivergenceError(std::size_t iteration, std::vector<double> history)
    : std::runtime_error(fmt::format("training diverged at iteration {}", iteration)),
      iteration_(iteration),
      history_(std::move(history)) {}

DivergenceError::DivergenceError(const std::string& what) : std::runtime_error(what), iteration_(0) {}

namespace {

void check_value(std::size_t n, Index i, Index j, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DataError(fmt::format("invalid weight in triple ({}, {}, {}): must be finite and >= 0", i, j, value));
  }
  if (i >= n || j >= n) {
    throw DataError(fmt::format("index out of range in triple ({}, {}, {}): n = {}", i, j, value, n));
  }
}

std::size_t count_diagonal(std::span<const Entry> entries) {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const Entry& e) { return e.i == e.j; }));
}

bool pair_less(const Entry& a, const Entry& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

}  // namespace

TripleStore build_store(std::span<const RawTriple> raw, std::size_t n, std::size_t* merged) {
  if (raw.empty()) throw DataError("cannot build a store from zero entries");

  std::vector<Entry> entries;
  entries.reserve(raw.size());
  for (const auto& t : raw) {
    check_value(n, t.i, t.j, t.value);
    entries.push_back({std::min(t.i, t.j), std::max(t.i, t.j), t.value});
  }

  // stable sort keeps input order within a pair, so the last one wins below
  std::stable_sort(entries.begin(), entries.end(), pair_less);
  std::size_t out = 0;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (out > 0 && entries[out - 1].i == entries[k].i && entries[out - 1].j == entries[k].j) {
      entries[out - 1] = entries[k];
    } else {
      entries[out++] = entries[k];
    }
  }
  const std::size_t dropped = entries.size() - out;
  entries.resize(out);
  entries.shrink_to_fit();
  if (dropped > 0) {
    std::cerr << fmt::format("warning: merged {} duplicate pair(s); last occurrence kept\n", dropped);
  }
  if (merged) *merged = dropped;

  TripleStore store;
  store.n_ = n;
  store.diagonal_count_ = count_diagonal(entries);
  store.entries_ = std::move(entries);
  store.scale_ = 1.0;
  return store;
}

TripleStore restore_store(std::size_t n, std::vector<Entry> entries, double scale) {
  if (entries.empty()) throw DataError("cannot build a store from zero entries");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DataError(fmt::format("invalid scale {}", scale));
  for (auto& e : entries) {
    check_value(n, e.i, e.j, e.value);
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(entries.begin(), entries.end(), pair_less);
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k - 1].i == entries[k].i && entries[k - 1].j == entries[k].j) {
      throw DataError(fmt::format("duplicate pair ({}, {})", entries[k].i, entries[k].j));
    }
  }
  TripleStore store;
  store.n_ = n;
  store.diagonal_count_ = count_diagonal(entries);
  store.entries_ = std::move(entries);
  store.scale_ = scale;
  return store;
}

TripleStore TripleStore::rescaled(double divisor) const {
  if (!(divisor > 0.0) || !std::isfinite(divisor)) {
    throw DataError(fmt::format("invalid normalization divisor {}", divisor));
  }
  TripleStore out = *this;
  for (auto& e : out.entries_) e.value /= divisor;
  out.scale_ = scale_ * divisor;
  return out;
}

TripleStore TripleStore::with_labels(std::vector<std::string> labels) const {
  if (!labels.empty() && labels.size() != n_) {
    throw DataError(fmt::format("label count {} does not match n = {}", labels.size(), n_));
  }
  TripleStore out = *this;
  out.labels_ = std::move(labels);
  return out;
}

double density(std::size_t known, std::size_t n) {
  if (n == 0) throw DataError("density of an empty entity set");
  const double nn = static_cast<double>(n);
  return static_cast<double>(known) / (nn * nn);
}

double density(const TripleStore& store) { return density(store.known_count(), store.n()); }

FoldPlan::FoldPlan(std::vector<std::uint8_t> fold_of) : fold_of_(std::move(fold_of)) {
  for (auto f : fold_of_) {
    if (f >= kFoldCount) throw DataError(fmt::format("fold id {} out of range", f));
  }
}

std::array<std::size_t, kFoldCount> FoldPlan::fold_sizes() const {
  std::array<std::size_t, kFoldCount> sizes{};
  for (auto f : fold_of_) ++sizes[f];
  return sizes;
}

Split FoldPlan::split(int rotation) const {
  if (rotation < 0 || rotation >= kFoldCount) {
    throw std::out_of_range(fmt::format("rotation {} not in [0, {})", rotation, kFoldCount));
  }
  const int test_a = (rotation + 1) % kFoldCount;
  const int test_b = (rotation + 2) % kFoldCount;
  Split s;
  const auto sizes = fold_sizes();
  s.validation.reserve(sizes[rotation]);
  s.test.reserve(sizes[test_a] + sizes[test_b]);
  s.train.reserve(fold_of_.size() - s.validation.capacity() - s.test.capacity());
  for (std::size_t p = 0; p < fold_of_.size(); ++p) {
    const int f = fold_of_[p];
    const auto pos = static_cast<Position>(p);
    if (f == rotation) {
      s.validation.push_back(pos);
    } else if (f == test_a || f == test_b) {
      s.test.push_back(pos);
    } else {
      s.train.push_back(pos);
    }
  }
  return s;
}

FoldPlan make_folds(std::size_t entry_count, std::uint64_t seed) {
  if (entry_count < kFoldCount) {
    throw DataError(fmt::format("need at least {} entries for tenfold splitting, got {}", kFoldCount, entry_count));
  }
  std::vector<Position> order(entry_count);
  std::iota(order.begin(), order.end(), Position{0});
  std::mt19937_64 rng(seed);
  for (std::size_t k = entry_count - 1; k > 0; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k);
    std::swap(order[k], order[pick(rng)]);
  }
  std::vector<std::uint8_t> fold_of(entry_count);
  for (std::size_t k = 0; k < entry_count; ++k) {
    fold_of[order[k]] = static_cast<std::uint8_t>(k % kFoldCount);
  }
  return FoldPlan(std::move(fold_of));
}

FoldPlan make_folds(const TripleStore& store, std::uint64_t seed) { return make_folds(store.size(), seed); }

}  // namespace usnl
