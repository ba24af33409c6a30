#include "usnl/model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/core.h>

#include "numtext.hpp"
#include "usnl/errors.hpp"

namespace usnl {

FactorState::FactorState(std::size_t n, std::size_t d, MappingKind kind, double lambda,
                         std::vector<double> y)
    : n_(n), d_(d), kind_(kind), lambda_(lambda), y_(std::move(y)) {
  if (n_ == 0 || d_ == 0) throw std::invalid_argument("factor state needs n >= 1 and d >= 1");
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (y_.size() != n_ * d_) {
    throw std::invalid_argument(fmt::format("expected {} parameters, got {}", n_ * d_, y_.size()));
  }
}

std::vector<double> FactorState::factors() const {
  std::vector<double> x(y_.size());
  for (std::size_t k = 0; k < y_.size(); ++k) x[k] = usnl::apply(kind_, y_[k]);
  return x;
}

double FactorState::predict_unchecked(Index i, Index j) const noexcept {
  const double* yi = y_.data() + std::size_t{i} * d_;
  const double* yj = y_.data() + std::size_t{j} * d_;
  double sum = 0.0;
  for (std::size_t k = 0; k < d_; ++k) sum += usnl::apply(kind_, yi[k]) * usnl::apply(kind_, yj[k]);
  return sum;
}

double FactorState::predict(Index i, Index j) const {
  if (i >= n_ || j >= n_) {
    throw std::out_of_range(fmt::format("predict({}, {}) with n = {}", i, j, n_));
  }
  return predict_unchecked(i, j);
}

double FactorState::instance_loss(const Entry& e) const {
  const double err = e.value - predict(e.i, e.j);
  double reg = 0.0;
  for (std::size_t k = 0; k < d_; ++k) {
    const double xi = factor(e.i, k);
    const double xj = factor(e.j, k);
    reg += xi * xi + xj * xj;
  }
  return 0.5 * (err * err + lambda_ * reg);
}

void FactorState::instance_gradient(const Entry& e, std::span<double> grad_i,
                                    std::span<double> grad_j) const {
  if (grad_i.size() != d_ || grad_j.size() != d_) {
    throw std::invalid_argument("gradient buffers must hold d values");
  }
  const double err = e.value - predict(e.i, e.j);
  const auto yi = row(e.i);
  const auto yj = row(e.j);
  for (std::size_t k = 0; k < d_; ++k) {
    const double xi = usnl::apply(kind_, yi[k]);
    const double xj = usnl::apply(kind_, yj[k]);
    grad_i[k] = usnl::derivative(kind_, yi[k]) * (lambda_ * xi - err * xj);
    grad_j[k] = usnl::derivative(kind_, yj[k]) * (lambda_ * xj - err * xi);
  }
}

FactorState init_factors(std::size_t n, std::size_t d, MappingKind kind, double lambda,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> y(n * d);
  if (kind == MappingKind::Sigmoid) {
    std::uniform_real_distribution<double> u(-3.0, -1.0);
    for (auto& v : y) v = u(rng);
  } else {
    // 0.1 - U[0, 0.099) lies in (0.001, 0.1]: every unit starts alive
    std::uniform_real_distribution<double> u(0.0, 0.099);
    for (auto& v : y) v = 0.1 - u(rng);
  }
  return FactorState(n, d, kind, lambda, std::move(y));
}

double total_loss(const FactorState& state, const TripleStore& store,
                  std::span<const Position> positions) {
  double sum = 0.0;
  for (auto p : positions) sum += state.instance_loss(store.entry(p));
  return sum;
}

void write_checkpoint(std::ostream& out, const FactorState& state, double scale) {
  out << state.n() << ' ' << state.d() << ' ' << to_string(state.kind()) << ' '
      << detail::shortest(state.lambda()) << ' ' << detail::shortest(scale) << '\n';
  for (Index i = 0; i < state.n(); ++i) {
    const auto r = state.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (k) out << ' ';
      out << detail::shortest(r[k]);
    }
    out << '\n';
  }
}

void save_checkpoint(const std::string& path, const FactorState& state, double scale) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot open {} for writing", path));
  write_checkpoint(out, state, scale);
  if (!out) throw DataError(fmt::format("write to {} failed", path));
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("checkpoint: missing header");
  std::istringstream header(line);
  std::string n_s, d_s, kind_s, lambda_s, scale_s, extra;
  if (!(header >> n_s >> d_s >> kind_s >> lambda_s >> scale_s) || (header >> extra)) {
    throw DataError("checkpoint: header must be `n d kind lambda scale`");
  }
  const auto n = detail::parse_int<std::size_t>(n_s);
  const auto d = detail::parse_int<std::size_t>(d_s);
  const auto kind = parse_mapping(kind_s);
  const auto lambda = detail::parse_double(lambda_s);
  const auto scale = detail::parse_double(scale_s);
  if (!n || !d || !kind || !lambda || !scale || *n == 0 || *d == 0 || *lambda < 0.0 || !(*scale > 0.0)) {
    throw DataError("checkpoint: invalid header values");
  }

  std::vector<double> y;
  y.reserve(*n * *d);
  for (std::size_t i = 0; i < *n; ++i) {
    if (!std::getline(in, line)) throw DataError(fmt::format("checkpoint: expected {} rows, got {}", *n, i));
    std::istringstream row(line);
    std::string tok;
    std::size_t k = 0;
    while (row >> tok) {
      const auto v = detail::parse_double(tok);
      if (!v || !std::isfinite(*v)) throw DataError(fmt::format("checkpoint: bad value on row {}", i + 1));
      y.push_back(*v);
      ++k;
    }
    if (k != *d) throw DataError(fmt::format("checkpoint: row {} has {} values, expected {}", i + 1, k, *d));
  }
  return {FactorState(*n, *d, *kind, *lambda, std::move(y)), *scale};
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open {}", path));
  return read_checkpoint(in);
}

}  // namespace usnl
