#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "usnl/data.hpp"
#include "usnl/errors.hpp"
#include "usnl/eval.hpp"
#include "usnl/ingest.hpp"
#include "usnl/model.hpp"
#include "usnl/train.hpp"

namespace usnl::cli {

namespace {

struct TrainFlags {
  std::size_t dim = 20;
  std::size_t max_iters = 1000;
  double tol = 1e-5;
  std::size_t restarts = 20;
  double eta = 0.01;
  double lambda = 0.03;
  std::string mapping = "relu";
  std::uint64_t seed = 1;
  std::string monitor = "validation";
  int jobs = 0;

  TrainConfig config() const {
    TrainConfig c;
    c.d = dim;
    c.max_iters = max_iters;
    c.tol = tol;
    c.restarts = restarts;
    c.eta = eta;
    c.lambda = lambda;
    c.kind = *parse_mapping(mapping);
    c.seed = seed;
    c.monitor = monitor == "training" ? Monitor::Training : Monitor::Validation;
    return c;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--dim", f.dim, "Latent dimension d")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", f.max_iters, "Epoch limit")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.tol, "Stop when |RMSE_t - RMSE_{t-1}| < tol")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--restarts", f.restarts, "Random initializations per rotation")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--eta", f.eta, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "Regularization coefficient")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--mapping", f.mapping, "Nonnegative mapping")->capture_default_str()->check(CLI::IsMember({"sigmoid", "abs", "relu"}));
  cmd->add_option("--seed", f.seed, "Base RNG seed")->capture_default_str();
  cmd->add_option("--monitor", f.monitor, "Subset whose RMSE drives termination")->capture_default_str()->check(CLI::IsMember({"validation", "training"}));
  cmd->add_option("--jobs", f.jobs, "Parallel runs (0 = all logical cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot open {} for writing", path));
  return out;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

int run_ingest(const std::string& input, std::string format, const std::string& output, bool no_normalize) {
  if (format == "auto") format = std::filesystem::path(input).extension() == ".mtx" ? "mtx" : "edges";
  const Ingested ing = format == "mtx" ? parse_matrix_market(input, !no_normalize)
                                       : parse_edge_list(input, EdgeListOptions{!no_normalize});
  export_store(ing.store, output);
  auto rep = open_output(output + ".report");
  write_report(rep, ing.report);
  write_report(std::cout, ing.report);
  return kOk;
}

int run_train(const std::string& store_path, const TrainFlags& flags, int rotation, std::uint64_t fold_seed,
              const std::string& output, std::string checkpoint, const std::string& history, bool verbose,
              bool no_timing) {
  const TripleStore store = import_store(store_path);
  const TrainConfig cfg = flags.config();
  const FoldPlan plan = make_folds(store, fold_seed);
  const Split split = plan.split(rotation);

  ProgressFn progress;
  if (verbose) {
    progress = [](std::size_t t, double r, double delta) {
      std::cerr << fmt::format("iter={} rmse={:.10g} delta={:.10g}\n", t, r, delta);
    };
  }
  const TrainReport report = train(store, split.train, split.validation, cfg, progress);
  const double val = rmse(report.final_state, store, split.validation).rmse;
  const double test = rmse(report.final_state, store, split.test).rmse;

  auto out = open_output(output);
  out << "dataset,mapping,d,eta,lambda,seed,rotation,converged_at,stop_reason,validation_rmse,test_rmse,wall_time\n";
  out << fmt::format("{},{},{},{},{},{},{},{},{},{:.10g},{:.10g},{}\n", stem_of(store_path), to_string(cfg.kind),
                     cfg.d, cfg.eta, cfg.lambda, cfg.seed, rotation, report.converged_at,
                     to_string(report.stop_reason), val, test,
                     no_timing ? std::string("NA") : fmt::format("{:.10g}", report.wall_time));

  if (!history.empty()) {
    auto h = open_output(history);
    h << "iter,rmse\n";
    for (std::size_t t = 0; t < report.rmse_history.size(); ++t) {
      h << fmt::format("{},{:.10g}\n", t + 1, report.rmse_history[t]);
    }
  }
  if (checkpoint.empty()) checkpoint = output + ".ckpt";
  save_checkpoint(checkpoint, report.final_state, store.scale());
  std::cout << fmt::format("converged_at={} stop_reason={} validation_rmse={:.6g} test_rmse={:.6g}\n",
                           report.converged_at, to_string(report.stop_reason), val, test);
  return kOk;
}

int run_cv(const std::string& store_path, const TrainFlags& flags, std::uint64_t fold_seed, std::string dataset,
           const std::string& output, const std::string& table, bool no_timing) {
  const TripleStore store = import_store(store_path);
  if (dataset.empty()) dataset = stem_of(store_path);
  const CvSummary summary = cross_validate(store, flags.config(), fold_seed, dataset, flags.jobs);
  const std::vector<CvSummary> rows{summary};
  auto out = open_output(output);
  write_cv_csv(out, rows, !no_timing);
  if (!table.empty()) {
    auto t = open_output(table);
    write_cv_tables(t, rows);
  }
  write_cv_tables(std::cout, rows);
  if (summary.diverged > 0) {
    std::cerr << fmt::format("warning: {} of {} runs diverged and were excluded\n", summary.diverged, summary.runs);
  }
  return summary.diverged == summary.runs ? kDivergence : kOk;
}

int run_grid(const std::string& store_path, const TrainFlags& flags, std::vector<double> etas,
             std::vector<double> lambdas, int rotation, std::uint64_t fold_seed, const std::string& output) {
  const TripleStore store = import_store(store_path);
  const FoldPlan plan = make_folds(store, fold_seed);
  const GridResult g = grid_search(store, plan, rotation, flags.config(), etas, lambdas, flags.jobs);
  for (const auto& p : g.points) {
    std::cout << fmt::format("eta={} lambda={} {}\n", p.eta, p.lambda,
                             p.diverged ? std::string("diverged")
                                        : fmt::format("validation_rmse={:.6g} iters={}", p.validation_rmse, p.converged_at));
  }
  auto out = open_output(output);
  out << "eta,lambda,validation_rmse\n" << fmt::format("{},{},{:.10g}\n", g.eta, g.lambda, g.validation_rmse);
  std::cout << fmt::format("best eta={} lambda={} validation_rmse={:.6g}\n", g.eta, g.lambda, g.validation_rmse);
  return kOk;
}

int run_synth(std::size_t n, std::size_t rank, double density_frac, double noise, std::uint64_t seed,
              const std::string& output) {
  const SyntheticData syn = make_synthetic(n, rank, density_frac, noise, seed);
  export_store(syn.store, output);
  auto t = open_output(output + ".truth");
  t << n << ' ' << rank << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < rank; ++k) t << (k ? " " : "") << fmt::format("{}", syn.truth[i * rank + k]);
    t << '\n';
  }
  std::cout << fmt::format("n={} pairs={} known={}\n", syn.store.n(), syn.store.size(), syn.store.known_count());
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Unconstrained symmetric nonnegative latent factor analysis"};
  app.require_subcommand(1);

  std::string input, output, format = "auto", store_path, checkpoint, history, table, dataset;
  bool no_normalize = false, verbose = false, no_timing = false;
  int rotation = 0;
  std::uint64_t fold_seed = 0;
  bool fold_seed_set = false;
  TrainFlags flags;
  std::vector<double> etas{0.001, 0.005, 0.01, 0.05};
  std::vector<double> lambdas{0.0, 0.001, 0.01, 0.03};
  std::size_t syn_n = 200, syn_rank = 4;
  double syn_density = 0.2, syn_noise = 0.0;
  std::uint64_t syn_seed = 1;

  auto* ingest = app.add_subcommand("ingest", "Parse an edge list or MatrixMarket file into a store");
  ingest->add_option("--input", input, "Source file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", format, "edges, mtx, or auto (by extension)")->capture_default_str()->check(CLI::IsMember({"auto", "edges", "mtx"}));
  ingest->add_option("--output", output, "Store file to write")->required();
  ingest->add_flag("--no-normalize", no_normalize, "Keep raw weights instead of dividing by the maximum");

  auto fold_seed_opt = [&](CLI::App* cmd) {
    cmd->add_option("--fold-seed", fold_seed, "Seed for the tenfold partition (defaults to --seed)")
        ->each([&](const std::string&) { fold_seed_set = true; });
  };

  auto* trn = app.add_subcommand("train", "Single training run on one rotation");
  trn->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  trn->add_option("--output", output, "Report CSV")->required();
  trn->add_option("--checkpoint", checkpoint, "Factor checkpoint (default <output>.ckpt)");
  trn->add_option("--history", history, "Per-iteration RMSE CSV");
  trn->add_option("--rotation", rotation, "Fold rotation 0..9")->capture_default_str()->check(CLI::Range(0, kFoldCount - 1));
  trn->add_flag("--verbose", verbose, "Print iter=<t> rmse=<v> delta=<d> per epoch");
  trn->add_flag("--no-timing", no_timing, "Write NA for wall_time for reproducible output");
  fold_seed_opt(trn);
  add_train_flags(trn, flags);

  auto* cv = app.add_subcommand("cv", "Tenfold cross-validation with restarts");
  cv->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  cv->add_option("--output", output, "Summary CSV")->required();
  cv->add_option("--table", table, "Plain-text RMSE / iteration / time tables");
  cv->add_option("--dataset", dataset, "Dataset name in the CSV (default: store file stem)");
  cv->add_flag("--no-timing", no_timing, "Write NA in the time columns for reproducible output");
  fold_seed_opt(cv);
  add_train_flags(cv, flags);

  auto* grid = app.add_subcommand("grid", "Select (eta, lambda) on a validation split");
  grid->add_option("--store", store_path, "Store file")->required()->check(CLI::ExistingFile);
  grid->add_option("--output", output, "Best-pair CSV")->required();
  grid->add_option("--etas", etas, "Learning rates")->delimiter(',')->capture_default_str();
  grid->add_option("--lambdas", lambdas, "Regularization coefficients")->delimiter(',')->capture_default_str();
  grid->add_option("--rotation", rotation, "Fold rotation 0..9")->capture_default_str()->check(CLI::Range(0, kFoldCount - 1));
  fold_seed_opt(grid);
  add_train_flags(grid, flags);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic low-rank store with ground truth");
  synth->add_option("--n", syn_n, "Entities")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--rank", syn_rank, "True rank")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--density", syn_density, "Fraction of upper-triangle pairs kept")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth->add_option("--noise", syn_noise, "Gaussian noise std")->capture_default_str()->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", syn_seed, "RNG seed")->capture_default_str();
  synth->add_option("--output", output, "Store file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (!fold_seed_set) fold_seed = flags.seed;

  try {
    if (*ingest) return run_ingest(input, format, output, no_normalize);
    if (*trn) return run_train(store_path, flags, rotation, fold_seed, output, checkpoint, history, verbose,
                                 no_timing);
    if (*cv) return run_cv(store_path, flags, fold_seed, dataset, output, table, no_timing);
    if (*grid) return run_grid(store_path, flags, etas, lambdas, rotation, fold_seed, output);
    if (*synth) return run_synth(syn_n, syn_rank, syn_density, syn_noise, syn_seed, output);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace usnl::cli
