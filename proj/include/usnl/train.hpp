#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "usnl/data.hpp"
#include "usnl/mapping.hpp"
#include "usnl/model.hpp"

namespace usnl {

/// Which subset's RMSE drives the delta-termination test.
enum class Monitor { Validation, Training };

struct TrainConfig {
  std::size_t d = 20;
  double eta = 0.01;
  double lambda = 0.03;
  MappingKind kind = MappingKind::Relu;
  std::size_t max_iters = 1000;
  double tol = 1e-5;
  std::uint64_t seed = 1;
  std::size_t restarts = 20;
  Monitor monitor = Monitor::Validation;

  /// Throws std::invalid_argument unless eta > 0, tol > 0, lambda >= 0,
  /// d >= 1, max_iters >= 1 and restarts >= 1.
  void validate() const;
};

enum class StopReason { Delta, MaxIters };
std::string_view to_string(StopReason reason) noexcept;

struct TrainReport {
  /// Monitor RMSE after each epoch; size() == converged_at.
  std::vector<double> rmse_history;
  std::size_t converged_at = 0;
  double wall_time = 0.0;
  FactorState final_state;
  StopReason stop_reason = StopReason::MaxIters;
};

using Rng = std::mt19937_64;

/// Called after every epoch with (iteration, rmse, delta); delta is NaN at
/// the first iteration.
using ProgressFn = std::function<void(std::size_t, double, double)>;

/// One SGD pass. `order` is reshuffled in place (Fisher-Yates from `rng`),
/// then every entry it names is visited once. Per entry the residual and all
/// mapped values are read before either row is written:
///
///   y_ik += eta * f'(y_ik) * (f(y_jk) e_ij - lambda f(y_ik))
///
/// and symmetrically for y_jk. A diagonal entry updates its row once.
/// Throws DivergenceError (carrying `iteration`) if a parameter becomes
/// non-finite.
void sgd_epoch(FactorState& state, const TripleStore& store, std::span<Position> order,
               double eta, Rng& rng, std::size_t iteration = 0);

/// Runs epochs until |rmse_t - rmse_{t-1}| < tol (t >= 2) or t == max_iters.
/// The state is initialized from cfg.seed; cfg.restarts is ignored.
TrainReport train(const TripleStore& store, std::span<const Position> train_positions,
                  std::span<const Position> validation_positions, const TrainConfig& cfg,
                  const ProgressFn& progress = {});

struct MeanStd {
  double mean = 0.0;
  /// Population standard deviation (0 for a single sample).
  double std = 0.0;
};
MeanStd summarize(std::span<const double> values);

/// Outcome of one full training run scored on a held-out test set.
struct RunOutcome {
  std::uint64_t seed = 0;
  bool diverged = false;
  std::size_t diverged_at = 0;
  std::size_t converged_at = 0;
  StopReason stop_reason = StopReason::MaxIters;
  double validation_rmse = 0.0;
  double test_rmse = 0.0;
  double wall_time = 0.0;
};

struct RunTask {
  const Split* split = nullptr;
  TrainConfig cfg;
};

/// Executes independent runs on up to `jobs` threads (jobs <= 0 means all
/// cores). Output order matches the task order regardless of scheduling.
std::vector<RunOutcome> run_batch(const TripleStore& store, std::span<const RunTask> tasks, int jobs);

struct RestartSummary {
  std::vector<RunOutcome> runs;
  MeanStd test_rmse;
  MeanStd iterations;
  MeanStd wall_time;
  /// Diverged runs are excluded from the means above.
  std::size_t diverged = 0;
};

/// Aggregates a set of outcomes into means over the non-diverged runs.
RestartSummary aggregate(std::vector<RunOutcome> runs);

/// cfg.restarts runs on one rotation, seeds cfg.seed + 0 .. cfg.seed + restarts - 1.
RestartSummary multi_restart(const TripleStore& store, const FoldPlan& plan, int rotation,
                             const TrainConfig& cfg, int jobs = 0);

struct GridPoint {
  double eta = 0.0;
  double lambda = 0.0;
  bool diverged = false;
  double validation_rmse = 0.0;
  std::size_t converged_at = 0;
};

struct GridResult {
  double eta = 0.0;
  double lambda = 0.0;
  double validation_rmse = 0.0;
  std::vector<GridPoint> points;
};

/// Lowest validation RMSE among non-diverged points, ties to smaller eta
/// then smaller lambda. Returns nullptr when every point diverged.
const GridPoint* select_best(std::span<const GridPoint> points);

/// One single-restart run per (eta, lambda) on the given rotation; returns
/// the pair with the lowest final validation RMSE, ties to smaller eta then
/// smaller lambda. Throws DataError on an empty grid and DivergenceError if
/// every point diverged.
GridResult grid_search(const TripleStore& store, const FoldPlan& plan, int rotation,
                       const TrainConfig& cfg_template, std::span<const double> etas,
                       std::span<const double> lambdas, int jobs = 0);

}  // namespace usnl
