#include "usnl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <fmt/core.h>
#include <omp.h>

#include "usnl/errors.hpp"
#include "usnl/eval.hpp"

namespace usnl {

void TrainConfig::validate() const {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be > 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
}

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::Delta ? "delta" : "max_iters";
}

void sgd_epoch(FactorState& state, const TripleStore& store, std::span<Position> order,
               double eta, Rng& rng, std::size_t iteration) {
  if (state.n() != store.n()) {
    throw std::invalid_argument(fmt::format("state has {} rows but store has n = {}", state.n(), store.n()));
  }
  const auto entries = store.entries();
  for (auto p : order) {
    if (p >= entries.size()) throw std::out_of_range(fmt::format("position {} beyond {} entries", p, entries.size()));
  }

  for (std::size_t k = order.size(); k > 1; --k) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::swap(order[k - 1], order[pick(rng)]);
  }

  const std::size_t d = state.d();
  const MappingKind kind = state.kind();
  const double lambda = state.lambda();
  std::vector<double> cache(4 * d);
  double* fi = cache.data();
  double* fj = fi + d;
  double* gi = fj + d;
  double* gj = gi + d;

  for (auto p : order) {
    const Entry& e = entries[p];
    auto yi = state.row(e.i);
    auto yj = state.row(e.j);

    double pred = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      fi[k] = apply(kind, yi[k]);
      fj[k] = apply(kind, yj[k]);
      gi[k] = derivative(kind, yi[k]);
      gj[k] = derivative(kind, yj[k]);
      pred += fi[k] * fj[k];
    }
    const double err = e.value - pred;

    bool finite = true;
    if (e.i == e.j) {
      for (std::size_t k = 0; k < d; ++k) {
        yi[k] += eta * gi[k] * (fj[k] * err - lambda * fi[k]);
        finite &= std::isfinite(yi[k]);
      }
    } else {
      for (std::size_t k = 0; k < d; ++k) {
        yi[k] += eta * gi[k] * (fj[k] * err - lambda * fi[k]);
        yj[k] += eta * gj[k] * (fi[k] * err - lambda * fj[k]);
        finite &= std::isfinite(yi[k]) && std::isfinite(yj[k]);
      }
    }
    if (!finite) throw DivergenceError(iteration, {});
  }
}

namespace {

Rng shuffle_stream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  return Rng(seq);
}

void check_disjoint(std::size_t count, std::span<const Position> a, std::span<const Position> b) {
  std::vector<bool> seen(count, false);
  for (auto p : a) {
    if (p >= count) throw std::out_of_range(fmt::format("position {} beyond {} entries", p, count));
    seen[p] = true;
  }
  for (auto p : b) {
    if (p >= count) throw std::out_of_range(fmt::format("position {} beyond {} entries", p, count));
    if (seen[p]) throw std::invalid_argument(fmt::format("position {} is in both training and validation sets", p));
  }
}

}  // namespace

TrainReport train(const TripleStore& store, std::span<const Position> train_positions,
                  std::span<const Position> validation_positions, const TrainConfig& cfg,
                  const ProgressFn& progress) {
  cfg.validate();
  check_disjoint(store.size(), train_positions, validation_positions);
  const auto monitor = cfg.monitor == Monitor::Validation ? validation_positions : train_positions;
  if (monitor.empty()) throw DataError("the monitored position set is empty");

  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  report.final_state = init_factors(store.n(), cfg.d, cfg.kind, cfg.lambda, cfg.seed);
  Rng rng = shuffle_stream(cfg.seed);
  std::vector<Position> order(train_positions.begin(), train_positions.end());

  for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
    try {
      sgd_epoch(report.final_state, store, order, cfg.eta, rng, t);
    } catch (const DivergenceError&) {
      throw DivergenceError(t, std::move(report.rmse_history));
    }
    const double r = rmse(report.final_state, store, monitor).rmse;
    if (!std::isfinite(r)) throw DivergenceError(t, std::move(report.rmse_history));

    const double delta = report.rmse_history.empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : std::fabs(r - report.rmse_history.back());
    report.rmse_history.push_back(r);
    if (progress) progress(t, r, delta);

    if (t >= 2 && delta < cfg.tol) {
      report.stop_reason = StopReason::Delta;
      break;
    }
    if (t == cfg.max_iters) report.stop_reason = StopReason::MaxIters;
  }
  report.converged_at = report.rmse_history.size();
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

MeanStd summarize(std::span<const double> values) {
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

std::vector<RunOutcome> run_batch(const TripleStore& store, std::span<const RunTask> tasks, int jobs) {
  std::vector<RunOutcome> out(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks.size()); ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const RunTask& task = tasks[idx];
    RunOutcome& o = out[idx];
    o.seed = task.cfg.seed;
    try {
      if (!task.split) throw std::invalid_argument("run task without a split");
      const auto report = train(store, task.split->train, task.split->validation, task.cfg);
      o.converged_at = report.converged_at;
      o.stop_reason = report.stop_reason;
      o.wall_time = report.wall_time;
      o.validation_rmse = task.split->validation.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : rmse(report.final_state, store, task.split->validation).rmse;
      o.test_rmse = task.split->test.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : rmse(report.final_state, store, task.split->test).rmse;
    } catch (const DivergenceError& e) {
      o.diverged = true;
      o.diverged_at = e.iteration();
    } catch (...) {
      failures[idx] = std::current_exception();
    }
  }

  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

RestartSummary aggregate(std::vector<RunOutcome> runs) {
  RestartSummary s;
  std::vector<double> rmses, iters, times;
  for (const auto& r : runs) {
    if (r.diverged) {
      ++s.diverged;
      continue;
    }
    rmses.push_back(r.test_rmse);
    iters.push_back(static_cast<double>(r.converged_at));
    times.push_back(r.wall_time);
  }
  s.test_rmse = summarize(rmses);
  s.iterations = summarize(iters);
  s.wall_time = summarize(times);
  s.runs = std::move(runs);
  return s;
}

RestartSummary multi_restart(const TripleStore& store, const FoldPlan& plan, int rotation,
                             const TrainConfig& cfg, int jobs) {
  cfg.validate();
  const Split split = plan.split(rotation);
  std::vector<RunTask> tasks(cfg.restarts, RunTask{&split, cfg});
  for (std::size_t r = 0; r < tasks.size(); ++r) tasks[r].cfg.seed = cfg.seed + r;
  return aggregate(run_batch(store, tasks, jobs));
}

const GridPoint* select_best(std::span<const GridPoint> points) {
  const GridPoint* best = nullptr;
  for (const auto& pt : points) {
    if (pt.diverged) continue;
    if (!best || std::tie(pt.validation_rmse, pt.eta, pt.lambda) <
                     std::tie(best->validation_rmse, best->eta, best->lambda)) {
      best = &pt;
    }
  }
  return best;
}

GridResult grid_search(const TripleStore& store, const FoldPlan& plan, int rotation,
                       const TrainConfig& cfg_template, std::span<const double> etas,
                       std::span<const double> lambdas, int jobs) {
  if (etas.empty() || lambdas.empty()) throw DataError("grid search needs at least one eta and one lambda");
  const Split split = plan.split(rotation);

  std::vector<RunTask> tasks;
  tasks.reserve(etas.size() * lambdas.size());
  for (double eta : etas) {
    for (double lambda : lambdas) {
      TrainConfig cfg = cfg_template;
      cfg.eta = eta;
      cfg.lambda = lambda;
      cfg.restarts = 1;
      cfg.validate();
      tasks.push_back({&split, cfg});
    }
  }
  const auto outcomes = run_batch(store, tasks, jobs);

  GridResult result;
  result.points.reserve(outcomes.size());
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const auto& o = outcomes[k];
    GridPoint pt{tasks[k].cfg.eta, tasks[k].cfg.lambda, o.diverged || !std::isfinite(o.validation_rmse),
                 o.validation_rmse, o.converged_at};
    result.points.push_back(pt);
  }
  const GridPoint* best = select_best(result.points);
  if (!best) throw DivergenceError("every grid point diverged");
  result.eta = best->eta;
  result.lambda = best->lambda;
  result.validation_rmse = best->validation_rmse;
  return result;
}

}  // namespace usnl
