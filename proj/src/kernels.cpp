#include "usnl/kernels.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace usnl {

namespace {

void check_positions(const FactorState& state, const TripleStore& store,
                     std::span<const Position> positions) {
  if (state.n() != store.n()) {
    throw std::invalid_argument(fmt::format("state has {} rows but store has n = {}", state.n(), store.n()));
  }
  if (!positions.empty()) {
    const auto hi = *std::max_element(positions.begin(), positions.end());
    if (hi >= store.size()) {
      throw std::out_of_range(fmt::format("position {} beyond {} entries", hi, store.size()));
    }
  }
}

inline double residual_sq(const FactorState& state, const Entry& e) {
  const double r = e.value - state.predict_unchecked(e.i, e.j);
  return r * r;
}

inline double loss_term(const FactorState& state, const Entry& e) {
  const auto yi = state.row(e.i);
  const auto yj = state.row(e.j);
  double pred = 0.0;
  double reg = 0.0;
  for (std::size_t k = 0; k < yi.size(); ++k) {
    const double xi = apply(state.kind(), yi[k]);
    const double xj = apply(state.kind(), yj[k]);
    pred += xi * xj;
    reg += xi * xi + xj * xj;
  }
  const double r = e.value - pred;
  return 0.5 * (r * r + state.lambda() * reg);
}

// Fixed block boundaries make the result independent of the thread count.
template <class Term>
double blocked_sum(std::span<const Position> positions, std::span<const Entry> entries, Term term) {
  const std::size_t count = positions.size();
  const std::size_t blocks = (count + parallel::kBlock - 1) / parallel::kBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * parallel::kBlock;
    const std::size_t hi = std::min(count, lo + parallel::kBlock);
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += term(entries[positions[k]]);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

// Terms over a pre-mapped X; same per-entry arithmetic order as the
// references, so each term is bit-identical to its serial counterpart.
struct Mapped {
  const double* x;
  std::size_t d;
  double lambda;

  double residual_sq(const Entry& e) const {
    const double* xi = x + std::size_t{e.i} * d;
    const double* xj = x + std::size_t{e.j} * d;
    double pred = 0.0;
    for (std::size_t k = 0; k < d; ++k) pred += xi[k] * xj[k];
    const double r = e.value - pred;
    return r * r;
  }

  double loss(const Entry& e) const {
    const double* xi = x + std::size_t{e.i} * d;
    const double* xj = x + std::size_t{e.j} * d;
    double pred = 0.0;
    double reg = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      pred += xi[k] * xj[k];
      reg += xi[k] * xi[k] + xj[k] * xj[k];
    }
    const double r = e.value - pred;
    return 0.5 * (r * r + lambda * reg);
  }
};

}  // namespace

namespace parallel {

double squared_residual_sum(const FactorState& state, const TripleStore& store,
                            std::span<const Position> positions) {
  check_positions(state, store, positions);
  const auto x = map_factors(state);
  const Mapped m{x.data(), state.d(), state.lambda()};
  return blocked_sum(positions, store.entries(), [&](const Entry& e) { return m.residual_sq(e); });
}

double loss_sum(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions) {
  check_positions(state, store, positions);
  const auto x = map_factors(state);
  const Mapped m{x.data(), state.d(), state.lambda()};
  return blocked_sum(positions, store.entries(), [&](const Entry& e) { return m.loss(e); });
}

std::vector<double> map_factors(const FactorState& state) {
  const auto y = state.parameters();
  std::vector<double> x(y.size());
  const auto kind = state.kind();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(y.size()); ++k) {
    x[static_cast<std::size_t>(k)] = apply(kind, y[static_cast<std::size_t>(k)]);
  }
  return x;
}

}  // namespace parallel

namespace reference {

double squared_residual_sum(const FactorState& state, const TripleStore& store,
                            std::span<const Position> positions) {
  check_positions(state, store, positions);
  double s = 0.0;
  for (auto p : positions) s += residual_sq(state, store.entries()[p]);
  return s;
}

double loss_sum(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions) {
  check_positions(state, store, positions);
  double s = 0.0;
  for (auto p : positions) s += loss_term(state, store.entries()[p]);
  return s;
}

std::vector<double> map_factors(const FactorState& state) { return state.factors(); }

}  // namespace reference

}  // namespace usnl
