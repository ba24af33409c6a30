#include "usnl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string_view>

#include <fmt/core.h>

#include "numtext.hpp"
#include "usnl/errors.hpp"
#include "usnl/kernels.hpp"

namespace usnl {

EvalResult rmse(const FactorState& state, const TripleStore& store,
                std::span<const Position> positions) {
  if (positions.empty()) throw DataError("RMSE over an empty position set");
  const double sse = parallel::squared_residual_sum(state, store, positions);
  return {std::sqrt(sse / static_cast<double>(positions.size())), positions.size()};
}

CvSummary cross_validate(const TripleStore& store, const TrainConfig& cfg, std::uint64_t fold_seed,
                         std::string dataset, int jobs) {
  cfg.validate();
  const FoldPlan plan = make_folds(store, fold_seed);
  std::array<Split, kFoldCount> splits;
  for (int r = 0; r < kFoldCount; ++r) splits[r] = plan.split(r);

  std::vector<RunTask> tasks;
  tasks.reserve(kFoldCount * cfg.restarts);
  for (int r = 0; r < kFoldCount; ++r) {
    for (std::size_t k = 0; k < cfg.restarts; ++k) {
      RunTask task{&splits[r], cfg};
      task.cfg.seed = cfg.seed + k;
      tasks.push_back(task);
    }
  }
  auto outcomes = run_batch(store, tasks, jobs);

  CvSummary summary;
  summary.dataset = std::move(dataset);
  summary.cfg = cfg;
  summary.runs = outcomes.size();
  for (int r = 0; r < kFoldCount; ++r) {
    const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(r * cfg.restarts);
    summary.per_rotation[r] =
        aggregate(std::vector<RunOutcome>(first, first + static_cast<std::ptrdiff_t>(cfg.restarts)));
  }
  const RestartSummary all = aggregate(std::move(outcomes));
  summary.test_rmse = all.test_rmse;
  summary.iterations = all.iterations;
  summary.wall_time = all.wall_time;
  summary.diverged = all.diverged;
  return summary;
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

}  // namespace

void write_cv_csv(std::ostream& out, std::span<const CvSummary> rows, bool include_timing) {
  out << "dataset,mapping,d,eta,lambda,rmse_mean,rmse_std,iters_mean,iters_std,time_mean,time_std\n";
  for (const auto& s : rows) {
    out << s.dataset << ',' << to_string(s.cfg.kind) << ',' << s.cfg.d << ','
        << detail::shortest(s.cfg.eta) << ',' << detail::shortest(s.cfg.lambda) << ','
        << num(s.test_rmse.mean) << ',' << num(s.test_rmse.std) << ',' << num(s.iterations.mean) << ','
        << num(s.iterations.std) << ',';
    if (include_timing) {
      out << num(s.wall_time.mean) << ',' << num(s.wall_time.std) << '\n';
    } else {
      out << "NA,NA\n";
    }
  }
}

std::string format_rmse(const MeanStd& v) {
  if (!std::isfinite(v.mean)) return "Failure";
  std::string sd;
  if (v.std == 0.0) {
    sd = "0";
  } else {
    int exp10 = static_cast<int>(std::floor(std::log10(v.std)));
    double mant = v.std / std::pow(10.0, exp10);
    if (std::round(mant * 10.0) >= 100.0) {
      mant /= 10.0;
      ++exp10;
    }
    sd = fmt::format("{:.1f}E{}", mant, exp10);
  }
  return fmt::format("{:.4f} ± {}", v.mean, sd);
}

std::string format_plain(const MeanStd& v, int mean_digits, int std_digits) {
  if (!std::isfinite(v.mean)) return "Failure";
  return fmt::format("{:.{}f} ± {:.{}f}", v.mean, mean_digits, v.std, std_digits);
}

void write_cv_tables(std::ostream& out, std::span<const CvSummary> rows) {
  std::vector<std::string> datasets;
  std::vector<MappingKind> kinds;
  for (const auto& s : rows) {
    if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end()) datasets.push_back(s.dataset);
    if (std::find(kinds.begin(), kinds.end(), s.cfg.kind) == kinds.end()) kinds.push_back(s.cfg.kind);
  }
  auto lookup = [&](const std::string& ds, MappingKind k) -> const CvSummary* {
    for (const auto& s : rows) {
      if (s.dataset == ds && s.cfg.kind == k) return &s;
    }
    return nullptr;
  };

  struct Table {
    std::string_view title;
    std::string (*cell)(const CvSummary&);
  };
  const Table tables[] = {
      {"RMSE", [](const CvSummary& s) { return format_rmse(s.test_rmse); }},
      {"Converging iteration count", [](const CvSummary& s) { return format_plain(s.iterations, 0, 2); }},
      {"Total time cost (seconds)", [](const CvSummary& s) { return format_plain(s.wall_time, 3, 3); }},
  };

  bool first = true;
  for (const auto& t : tables) {
    if (!first) out << '\n';
    first = false;
    out << t.title << '\n' << fmt::format("{:<12}", "No.");
    for (auto k : kinds) out << fmt::format("{:<24}", to_string(k));
    out << '\n';
    for (const auto& ds : datasets) {
      out << fmt::format("{:<12}", ds);
      for (auto k : kinds) {
        const auto* s = lookup(ds, k);
        // width counts bytes; pad by hand so the two-byte '±' lines up
        const std::string cell = s ? t.cell(*s) : std::string("-");
        const std::size_t glyphs = cell.size() - (cell.find("±") != std::string::npos ? 1 : 0);
        out << cell << std::string(glyphs < 24 ? 24 - glyphs : 1, ' ');
      }
      out << '\n';
    }
  }
}

SyntheticData make_synthetic(std::size_t n, std::size_t rank, double density, double noise,
                             std::uint64_t seed) {
  if (n < 1) throw DataError("synthetic data needs n >= 1");
  if (rank < 1) throw DataError("synthetic data needs rank >= 1");
  if (!(density > 0.0 && density <= 1.0)) throw DataError("synthetic density must lie in (0, 1]");
  if (!(noise >= 0.0)) throw DataError("synthetic noise must be >= 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> truth(n * rank);
  for (auto& v : truth) v = unit(rng);

  std::bernoulli_distribution keep(density);
  std::normal_distribution<double> gauss(0.0, noise > 0.0 ? noise : 1.0);
  std::vector<RawTriple> raw;
  raw.reserve(static_cast<std::size_t>(density * static_cast<double>(n * (n + 1) / 2)) + 16);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (!keep(rng)) continue;
      double v = 0.0;
      for (std::size_t k = 0; k < rank; ++k) v += truth[i * rank + k] * truth[j * rank + k];
      if (noise > 0.0) v = std::max(0.0, v + gauss(rng));
      raw.push_back({static_cast<Index>(i), static_cast<Index>(j), v});
    }
  }
  if (raw.empty()) throw DataError("synthetic sampling kept no entries; raise density or n");

  TripleStore store = build_store(raw, n);
  double max = 0.0;
  for (const auto& e : store.entries()) max = std::max(max, e.value);
  if (max > 0.0) {
    store = store.rescaled(max);
    const double shrink = 1.0 / std::sqrt(max);
    for (auto& v : truth) v *= shrink;
  }
  return {std::move(store), std::move(truth), rank};
}

}  // namespace usnl
