#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "secl/config.hpp"
#include "secl/error.hpp"
#include "secl/experiment.hpp"
#include "secl/graph.hpp"
#include "secl/metrics.hpp"
#include "secl/synthetic.hpp"
#include "secl/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitError = 1;
constexpr int kExitFailedRun = 3;

// Flags shared by every training subcommand; unset values keep the config's.
struct Overrides {
  std::string config;
  std::string data_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> epochs;
  std::string ablation;
  bool deterministic = false;
  std::string out;
  std::string out_root = "runs";
  int log_every = 0;
};

void add_overrides(CLI::App& cmd, Overrides& o) {
  cmd.add_option("-c,--config", o.config, "INI configuration file")->required()->check(CLI::ExistingFile);
  cmd.add_option("--data-dir", o.data_dir, "Directory that relative data paths resolve against");
  cmd.add_option("--seed", o.seed, "Base seed; run k uses seed + k");
  cmd.add_option("--runs", o.runs, "Number of seeds")->check(CLI::PositiveNumber);
  cmd.add_option("--epochs", o.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd.add_option("--ablation", o.ablation, "full, no-M, no-CL or no-SL");
  cmd.add_flag("--deterministic", o.deterministic, "Keep wall-clock values out of the comparable outputs");
  cmd.add_option("--out", o.out, "Exact output directory");
  cmd.add_option("--out-root", o.out_root, "Parent of auto-named output directories")->capture_default_str();
  cmd.add_option("--log-every", o.log_every, "Print the loss every N epochs (0 = quiet)");
}

secl::TrainConfig resolve_config(const Overrides& o) {
  std::optional<fs::path> root;
  if (!o.data_dir.empty()) {
    root = o.data_dir;
  } else if (const char* env = std::getenv("SECL_DATA_DIR"); env != nullptr && *env != '\0') {
    root = env;
  }
  secl::TrainConfig c = secl::load_config(o.config, root);
  if (o.seed) c.seed = *o.seed;
  if (o.runs) c.runs = *o.runs;
  if (o.epochs) c.epochs = *o.epochs;
  if (!o.ablation.empty()) c.ablation = secl::parse_ablation(o.ablation);
  if (o.deterministic) c.deterministic = true;
  c.validate();
  return c;
}

secl::Graph load(const secl::TrainConfig& c) {
  secl::Graph g = secl::load_graph(c.edges, c.attributes, c.labels);
  std::fprintf(stderr, "%s\n",
               fmt::format("{}: N={} m={} (edge records {}) d={} classes={}", c.dataset, g.num_nodes,
                           g.num_edges(), g.raw_edge_records, g.num_attributes(),
                           g.labels ? std::to_string(g.num_classes()) : std::string("n/a"))
                   .c_str());
  return g;
}

secl::ExperimentOptions experiment_options(const Overrides& o) {
  secl::ExperimentOptions opts;
  if (!o.out.empty()) opts.out_dir = fs::path(o.out);
  opts.out_root = o.out_root;
  if (o.log_every > 0) {
    const int every = o.log_every;
    opts.train.on_epoch = [every](int epoch, const secl::LossBreakdown& b) {
      if (epoch % every == 0 || epoch == 1) {
        std::fprintf(stderr, "%s\n",
                     fmt::format("epoch {:4d}  total {:.6f}  l_sl {:.6f}  l_cl {:.6f}  l_m {:.6f}", epoch,
                                 b.total, b.l_sl, b.l_cl, b.l_m)
                         .c_str());
      }
    };
  }
  opts.on_run = [](int k, const secl::RunRecord& rec) {
    const secl::MetricValues& v = rec.evaluation.values;
    std::fprintf(stderr, "%s\n",
                 fmt::format("run {} seed {}: acc {:.4f} nmi {:.4f} ari {:.4f} f1 {:.4f} q {:.4f} ({:.1f}s)", k,
                             rec.seed, v.acc, v.nmi, v.ari, v.f1, v.modularity_q, rec.wall_seconds)
                     .c_str());
  };
  return opts;
}

void print_report(const std::string& label, const secl::MetricsReport& r) {
  auto pct = [](const secl::MetricStats& s) { return fmt::format("{:.2f}±{:.2f}", 100 * s.mean, 100 * s.std); };
  fmt::print("{}  ACC {}  NMI {}  ARI {}  F1 {}  Q {}\n", label, pct(r.acc), pct(r.nmi), pct(r.ari), pct(r.f1),
             fmt::format("{:.4f}±{:.4f}", r.modularity_q.mean, r.modularity_q.std));
}

int finish(const secl::ExperimentResult& r, const secl::TrainConfig& c) {
  print_report(fmt::format("{} {} ({} runs)", c.dataset, secl::method_name(c.ablation), r.runs.size()), r.report);
  if (!r.directory.empty()) fmt::print("artifacts: {}\n", r.directory.string());
  if (r.failed) {
    std::fprintf(stderr, "experiment failed: %s\n", r.failure.c_str());
    return kExitFailedRun;
  }
  return 0;
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(item, &used));
      } else {
        out.push_back(std::stod(item, &used));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw secl::ConfigError("invalid grid value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-enhanced contrastive graph clustering"};
  app.set_version_flag("--version", std::string(secl::library_version()));
  app.require_subcommand(1);

  Overrides train_o, exp_o, sweep_o, ablate_o, time_o, dump_o;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one seed and report its metrics");
  add_overrides(*train_cmd, train_o);
  CLI::App* exp_cmd = app.add_subcommand("experiment", "Train every seed and aggregate mean and std");
  add_overrides(*exp_cmd, exp_o);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Grid over lambda1 x lambda2, filter depth or temperature");
  add_overrides(*sweep_cmd, sweep_o);
  std::string grid_l1, grid_l2, grid_r, grid_tau;
  sweep_cmd->add_option("--lambda1", grid_l1, "Comma-separated lambda1 values");
  sweep_cmd->add_option("--lambda2", grid_l2, "Comma-separated lambda2 values");
  sweep_cmd->add_option("--filter-depth", grid_r, "Comma-separated filter depths");
  sweep_cmd->add_option("--tau", grid_tau, "Comma-separated temperatures");

  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Compare the full objective with each term removed");
  add_overrides(*ablate_cmd, ablate_o);
  CLI::App* time_cmd = app.add_subcommand("time", "Wall-clock seconds of one training");
  add_overrides(*time_cmd, time_o);

  CLI::App* dump_cmd = app.add_subcommand("dump-embeddings", "Train one seed and write the final h2");
  add_overrides(*dump_cmd, dump_o);
  std::string dump_path;
  dump_cmd->add_option("-o,--output", dump_path, "Binary embedding file")->required();

  CLI::App* eval_cmd = app.add_subcommand("eval-labels", "Metrics of a precomputed labeling");
  std::string eval_pred, eval_truth, eval_edges, eval_attrs;
  bool eval_arithmetic = false;
  eval_cmd->add_option("--pred", eval_pred, "Predicted labels, one per line")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", eval_truth, "True labels, one per line")->check(CLI::ExistingFile);
  eval_cmd->add_option("--edges", eval_edges, "Edge list, enables modularity")->check(CLI::ExistingFile);
  eval_cmd->add_option("--attributes", eval_attrs, "Attribute file matching --edges")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--nmi-arithmetic", eval_arithmetic, "Arithmetic-mean NMI normalization");

  CLI::App* gen_cmd = app.add_subcommand("generate", "Write a planted-partition graph in the on-disk formats");
  secl::PlantedPartitionSpec gen;
  std::string gen_dir;
  gen_cmd->add_option("--dir", gen_dir, "Output directory")->required();
  gen_cmd->add_option("--nodes", gen.nodes)->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes)->capture_default_str();
  gen_cmd->add_option("--p-in", gen.p_in)->capture_default_str();
  gen_cmd->add_option("--p-out", gen.p_out)->capture_default_str();
  gen_cmd->add_option("--attributes", gen.attributes)->capture_default_str();
  gen_cmd->add_option("--signal", gen.signal)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      secl::TrainConfig c = resolve_config(train_o);
      c.runs = 1;
      const secl::Graph g = load(c);
      return finish(secl::run_experiment(c, g, experiment_options(train_o)), c);
    }
    if (*exp_cmd) {
      const secl::TrainConfig c = resolve_config(exp_o);
      const secl::Graph g = load(c);
      return finish(secl::run_experiment(c, g, experiment_options(exp_o)), c);
    }
    if (*sweep_cmd) {
      const secl::TrainConfig c = resolve_config(sweep_o);
      secl::SweepGrid grid{parse_list<double>(grid_l1), parse_list<double>(grid_l2), parse_list<int>(grid_r),
                           parse_list<double>(grid_tau)};
      grid.cells(c);
      const secl::Graph g = load(c);
      const auto rows = secl::sweep(c, g, grid, experiment_options(sweep_o));
      bool failed = false;
      for (const auto& row : rows) {
        print_report(fmt::format("l1={} l2={} r={} tau={}", row.lambda1, row.lambda2, row.filter_depth, row.tau),
                     row.report);
        failed = failed || row.failed;
      }
      return failed ? kExitFailedRun : 0;
    }
    if (*ablate_cmd) {
      const secl::TrainConfig c = resolve_config(ablate_o);
      const secl::Graph g = load(c);
      const auto rows = secl::ablate(c, g, experiment_options(ablate_o));
      bool failed = false;
      for (const auto& row : rows) {
        print_report(secl::method_name(row.ablation), row.report);
        failed = failed || row.failed;
      }
      return failed ? kExitFailedRun : 0;
    }
    if (*time_cmd) {
      const secl::TrainConfig c = resolve_config(time_o);
      const secl::Graph g = load(c);
      const secl::TimeReport t = secl::time_report(c, g);
      fmt::print("{} {} epochs: {:.3f} s\n", c.dataset, t.epochs, t.seconds);
      return 0;
    }
    if (*dump_cmd) {
      const secl::TrainConfig c = resolve_config(dump_o);
      const secl::Graph g = load(c);
      secl::TrainOptions opts;
      opts.evaluate = false;
      opts.on_epoch = experiment_options(dump_o).train.on_epoch;
      const secl::TrainResult r = secl::train(c, g, opts);
      secl::write_matrix_binary(dump_path, r.h2);
      fmt::print("wrote {} x {} embedding to {}\n", r.h2.rows(), r.h2.cols(), dump_path);
      return 0;
    }
    if (*eval_cmd) {
      const std::vector<int> pred = secl::read_labels(eval_pred);
      const auto norm = eval_arithmetic ? secl::NmiNormalization::kArithmetic : secl::NmiNormalization::kGeometric;
      if (!eval_truth.empty()) {
        const std::vector<int> truth = secl::read_labels(eval_truth);
        fmt::print("acc {:.6f}\nnmi {:.6f}\nari {:.6f}\nf1 {:.6f}\nf1_weighted {:.6f}\n", secl::accuracy(pred, truth),
                   secl::nmi(pred, truth, norm), secl::ari(pred, truth), secl::f1_macro(pred, truth),
                   secl::f1_weighted(pred, truth));
      }
      if (!eval_edges.empty()) {
        if (eval_attrs.empty()) throw secl::ConfigError("--edges needs --attributes to fix the node count");
        const secl::Graph g = secl::load_graph(eval_edges, eval_attrs);
        fmt::print("q {:.6f}\n", secl::modularity_score(pred, g));
      }
      if (eval_truth.empty() && eval_edges.empty()) throw secl::ConfigError("nothing to evaluate: pass --truth or --edges");
      return 0;
    }
    if (*gen_cmd) {
      const secl::Graph g = secl::make_planted_partition(gen);
      const fs::path dir(gen_dir);
      fs::create_directories(dir);
      secl::write_graph(g, dir / "edges.txt", dir / "attributes.txt", dir / "labels.txt");
      fmt::print("wrote N={} m={} d={} to {}\n", g.num_nodes, g.num_edges(), g.num_attributes(), dir.string());
      return 0;
    }
  } catch (const secl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
