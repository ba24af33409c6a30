#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "usnl/data.hpp"
#include "usnl/model.hpp"
#include "usnl/train.hpp"

namespace usnl {

struct EvalResult {
  double rmse = 0.0;
  std::size_t count = 0;
};

/// sqrt(sum (r - r_hat)^2 / |positions|). Throws DataError on an empty set.
EvalResult rmse(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions);

struct CvSummary {
  std::string dataset;
  TrainConfig cfg;
  std::array<RestartSummary, kFoldCount> per_rotation;
  /// Over every non-diverged (rotation x restart) run.
  MeanStd test_rmse;
  MeanStd iterations;
  MeanStd wall_time;
  std::size_t runs = 0;
  std::size_t diverged = 0;
};

/// Tenfold cross-validation: one fold plan from `fold_seed`, then for every
/// rotation cfg.restarts runs scored on the pooled two-fold test set.
CvSummary cross_validate(const TripleStore& store, const TrainConfig& cfg, std::uint64_t fold_seed,
                         std::string dataset = "store", int jobs = 0);

/// Header: dataset,mapping,d,eta,lambda,rmse_mean,rmse_std,iters_mean,
/// iters_std,time_mean,time_std. With include_timing = false the two time
/// columns hold "NA" so the output is a pure function of the inputs.
void write_cv_csv(std::ostream& out, std::span<const CvSummary> rows, bool include_timing = true);
/// Plain-text RMSE / iteration / time tables, one column per mapping.
void write_cv_tables(std::ostream& out, std::span<const CvSummary> rows);

/// "0.1298 ± 6.2E-5" style: mean to `mean_digits` decimals, std in
/// two-significant-digit scientific notation.
std::string format_rmse(const MeanStd& v);
/// "688 ± 22.35" style.
std::string format_plain(const MeanStd& v, int mean_digits, int std_digits);

struct SyntheticData {
  TripleStore store;
  /// Ground-truth factors (n x rank, row-major) on the normalized scale, so
  /// that truth * truth^T reproduces the stored values when noise == 0.
  std::vector<double> truth;
  std::size_t rank = 0;
};

/// X* ~ U(0,1)^{n x rank}, R = X* X*^T; each upper-triangle pair (diagonal
/// included) is kept with probability `density`; Gaussian noise of std
/// `noise` is added, negatives clipped to 0, and values divided by their max.
SyntheticData make_synthetic(std::size_t n, std::size_t rank, double density, double noise,
                             std::uint64_t seed);

}  // namespace usnl
