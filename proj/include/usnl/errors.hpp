#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace usnl {

/// Malformed or contract-violating input data (bad files, negative weights,
/// out-of-range indices, empty position sets).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A training run produced a non-finite parameter or RMSE.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t iteration, std::vector<double> history);
  explicit DivergenceError(const std::string& what);

  std::size_t iteration() const noexcept { return iteration_; }
  /// Monitor RMSE values recorded before the failing epoch.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::size_t iteration_;
  std::vector<double> history_;
};

}  // namespace usnl
