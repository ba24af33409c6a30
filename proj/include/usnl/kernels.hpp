#pragma once

// Reductions over entry subsets. Each kernel has an OpenMP version (used by
// the library) and a plain serial reference kept for tests and benchmarks.
//
// The OpenMP versions map X = f(Y) once per call, sum fixed-size blocks of
// positions independently and then add the block partials in block order, so their result does not
// depend on the thread count. They agree with the serial references up to
// floating-point reassociation.

#include <cstddef>
#include <span>
#include <vector>

#include "usnl/data.hpp"
#include "usnl/model.hpp"

namespace usnl {

namespace parallel {

inline constexpr std::size_t kBlock = 2048;

/// Sum of (r_ij - r_hat_ij)^2.
double squared_residual_sum(const FactorState& state, const TripleStore& store,
                            std::span<const Position> positions);
/// Sum of instance_loss.
double loss_sum(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions);
/// X = f(Y), row-major.
std::vector<double> map_factors(const FactorState& state);

}  // namespace parallel

namespace reference {

double squared_residual_sum(const FactorState& state, const TripleStore& store,
                            std::span<const Position> positions);
double loss_sum(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions);
std::vector<double> map_factors(const FactorState& state);

}  // namespace reference

}  // namespace usnl
