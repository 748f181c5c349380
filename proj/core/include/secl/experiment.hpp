#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "secl/config.hpp"
#include "secl/graph.hpp"
#include "secl/metrics.hpp"
#include "secl/trainer.hpp"

namespace secl {

struct ExperimentOptions {
  // Exact output directory. When unset a directory named
  // "<dataset>-<config hash>-<UTC timestamp>" is created under out_root.
  std::optional<std::filesystem::path> out_dir;
  std::filesystem::path out_root = "runs";
  bool write_artifacts = true;
  // Called after each finished run with its 0-based index.
  std::function<void(int, const RunRecord&)> on_run;
  TrainOptions train;
};

struct ExperimentResult {
  MetricsReport report;
  std::vector<RunRecord> runs;
  std::filesystem::path directory;  // empty when artifacts are off
  bool failed = false;
  std::string failure;  // message of the aborting run
};

// Display name of the trained variant: "SECL" or "SECL-M", "SECL-CL",
// "SECL-SL" for the ablations.
std::string method_name(Ablation a);

// config.runs trainings with seeds seed, seed + 1, ... Artifacts:
//   metrics.json    config, per-run and aggregate metrics
//   metrics.csv     dataset,method,seed,acc,nmi,ari,f1,q,wall_time_s
//   loss_log.csv    run,epoch,l_cl,l_sl,l_m,total
//   timing.csv      run,seed,wall_time_s
//   embeddings_run<k>.bin, labels_run<k>.txt
// With config.deterministic the wall-clock column of metrics.csv reads NA,
// so every file except timing.csv is a pure function of the inputs. A run
// that aborts stops the experiment; finished runs are still written.
ExperimentResult run_experiment(const TrainConfig& config, const Graph& g,
                                const ExperimentOptions& options = {});

// Grid for sweep(). Either lambda1 x lambda2, filter_depth or tau is set.
struct SweepGrid {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<int> filter_depth;
  std::vector<double> tau;

  // The configs of every cell, in row-major order over lambda1 x lambda2.
  // Throws ConfigError for an empty or mixed grid.
  std::vector<TrainConfig> cells(const TrainConfig& base) const;
};

struct SweepRow {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int filter_depth = 0;
  double tau = 0.0;
  MetricsReport report;
  bool failed = false;
};

// One experiment per grid cell. Writes sweep.csv (one row per cell with the
// cell coordinates and mean/std of each metric) and each cell's artifacts
// under cell_<i>/ when artifacts are on.
std::vector<SweepRow> sweep(const TrainConfig& base, const Graph& g, const SweepGrid& grid,
                            const ExperimentOptions& options = {});

// Runs the four objective variants and writes ablation.csv.
struct AblationRow {
  Ablation ablation = Ablation::kFull;
  MetricsReport report;
  bool failed = false;
};
std::vector<AblationRow> ablate(const TrainConfig& base, const Graph& g,
                                const ExperimentOptions& options = {});

struct TimeReport {
  double seconds = 0.0;
  int epochs = 0;
};

// Times one training of config.epochs epochs with evaluation off. Graph
// preprocessing is included.
TimeReport time_report(const TrainConfig& config, const Graph& g);

// "mean,std" CSV-ready columns for every metric, in the order
// acc,nmi,ari,f1,f1_weighted,q.
std::string aggregate_csv_header();
std::string aggregate_csv_fields(const MetricsReport& r);

}  // namespace secl
