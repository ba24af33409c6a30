#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "usnl/data.hpp"
#include "usnl/mapping.hpp"

namespace usnl {

/// Decision parameters Y (n x d, row-major, unconstrained) for a symmetric
/// latent factor model. The output factors are X = f(Y), computed on demand
/// and never stored.
///
/// Single writer: concurrent reads are fine while no update is in flight.
class FactorState {
 public:
  FactorState() = default;
  /// Takes ownership of explicit parameters; y.size() must equal n * d.
  FactorState(std::size_t n, std::size_t d, MappingKind kind, double lambda,
              std::vector<double> y);

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  MappingKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }

  std::span<const double> row(Index i) const noexcept { return {y_.data() + std::size_t{i} * d_, d_}; }
  std::span<double> row(Index i) noexcept { return {y_.data() + std::size_t{i} * d_, d_}; }
  std::span<const double> parameters() const noexcept { return y_; }

  /// x_{i,k} = f(y_{i,k})
  double factor(Index i, std::size_t k) const noexcept { return usnl::apply(kind_, y_[std::size_t{i} * d_ + k]); }
  /// Whole X view, row-major.
  std::vector<double> factors() const;

  /// Sum over k of f(y_ik) f(y_jk). Throws std::out_of_range on a bad index.
  double predict(Index i, Index j) const;
  /// Unchecked variant for inner loops.
  double predict_unchecked(Index i, Index j) const noexcept;

  /// 1/2 [ (r - r_hat)^2 + lambda (|x_i|^2 + |x_j|^2) ]
  double instance_loss(const Entry& e) const;

  /// Analytic partials of instance_loss with respect to rows i and j of Y:
  ///   d/dy_ik = f'(y_ik) (lambda f(y_ik) - e_ij f(y_jk)),  e_ij = r_ij - r_hat_ij
  /// Both spans must hold d values. For a diagonal entry only grad_i is
  /// meaningful (the second role is treated as constant).
  void instance_gradient(const Entry& e, std::span<double> grad_i, std::span<double> grad_j) const;

  friend bool operator==(const FactorState&, const FactorState&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  MappingKind kind_ = MappingKind::Relu;
  double lambda_ = 0.0;
  std::vector<double> y_;
};

/// Random initialization. Absolute/Relu: y ~ U(0.001, 0.1]; Sigmoid:
/// y ~ U[-3, -1]. Deterministic per seed.
FactorState init_factors(std::size_t n, std::size_t d, MappingKind kind, double lambda,
                         std::uint64_t seed);

/// Sum of instance_loss over the positions, in the given order.
double total_loss(const FactorState& state, const TripleStore& store,
                  std::span<const Position> positions);

/// Checkpoint text: header `n d kind lambda scale`, then n rows of d values
/// of Y. Values are written in shortest round-trip form.
void write_checkpoint(std::ostream& out, const FactorState& state, double scale);
void save_checkpoint(const std::string& path, const FactorState& state, double scale);

struct Checkpoint {
  FactorState state;
  double scale = 1.0;
};
Checkpoint read_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace usnl
