#include "secl/experiment.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "secl/error.hpp"

namespace secl {
namespace fs = std::filesystem;
using nlohmann::json;

std::string method_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "SECL";
    case Ablation::kNoModularity: return "SECL-M";
    case Ablation::kNoContrastive: return "SECL-CL";
    case Ablation::kNoStructural: return "SECL-SL";
  }
  return "SECL";
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path resolve_directory(const TrainConfig& config, const ExperimentOptions& options,
                           std::string_view prefix) {
  if (options.out_dir) return *options.out_dir;
  return options.out_root / fmt::format("{}{}-{}-{}", prefix, config.dataset, config.hash(), utc_timestamp());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

json stats_json(const MetricStats& s) { return {{"mean", s.mean}, {"std", s.std}}; }

json values_json(const MetricValues& v) {
  return {{"acc", v.acc}, {"nmi", v.nmi}, {"ari", v.ari},
          {"f1", v.f1},   {"f1_weighted", v.f1_weighted}, {"q", v.modularity_q}};
}

void write_artifacts(const fs::path& dir, const TrainConfig& config, const ExperimentResult& r,
                     const std::vector<TrainResult>& trained) {
  fs::create_directories(dir);
  const std::string method = method_name(config.ablation);

  json doc;
  doc["dataset"] = config.dataset;
  doc["method"] = method;
  doc["version"] = std::string(library_version());
  doc["config_hash"] = config.hash();
  doc["config"] = config.canonical();
  doc["f1_averaging"] = "macro";
  doc["nmi_normalization"] = "geometric";
  doc["failed"] = r.failed;
  if (r.failed) doc["failure"] = r.failure;
  doc["has_truth"] = !r.runs.empty() && r.runs.front().evaluation.has_truth;
  json runs = json::array();
  for (const RunRecord& rec : r.runs) {
    json item = values_json(rec.evaluation.values);
    item["seed"] = rec.seed;
    if (!config.deterministic) item["wall_time_s"] = rec.wall_seconds;
    runs.push_back(item);
  }
  doc["runs"] = runs;
  doc["aggregate"] = {{"acc", stats_json(r.report.acc)},
                      {"nmi", stats_json(r.report.nmi)},
                      {"ari", stats_json(r.report.ari)},
                      {"f1", stats_json(r.report.f1)},
                      {"f1_weighted", stats_json(r.report.f1_weighted)},
                      {"q", stats_json(r.report.modularity_q)}};
  open_out(dir / "metrics.json") << doc.dump(2) << '\n';

  auto csv = open_out(dir / "metrics.csv");
  csv << "dataset,method,seed,acc,nmi,ari,f1,q,wall_time_s\n";
  for (const RunRecord& rec : r.runs) {
    const MetricValues& v = rec.evaluation.values;
    csv << fmt::format("{},{},{},{},{},{},{},{},{}\n", config.dataset, method, rec.seed, num(v.acc),
                       num(v.nmi), num(v.ari), num(v.f1), num(v.modularity_q),
                       config.deterministic ? std::string("NA") : num(rec.wall_seconds));
  }

  auto timing = open_out(dir / "timing.csv");
  timing << "run,seed,wall_time_s\n";
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    timing << fmt::format("{},{},{}\n", k, r.runs[k].seed, num(r.runs[k].wall_seconds));
  }

  auto log = open_out(dir / "loss_log.csv");
  log << "run,epoch,l_cl,l_sl,l_m,total\n";
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    const auto& entries = r.runs[k].loss_log;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const LossBreakdown& b = entries[e];
      log << fmt::format("{},{},{},{},{},{}\n", k, e + 1, num(b.l_cl), num(b.l_sl), num(b.l_m), num(b.total));
    }
  }

  for (std::size_t k = 0; k < trained.size(); ++k) {
    write_matrix_binary(dir / fmt::format("embeddings_run{}.bin", k), trained[k].h2);
    write_labels(dir / fmt::format("labels_run{}.txt", k), trained[k].record.labels);
  }
}

}  // namespace

ExperimentResult run_experiment(const TrainConfig& config, const Graph& g, const ExperimentOptions& options) {
  config.validate();
  ExperimentResult result;
  std::vector<TrainResult> trained;
  const TrainingContext ctx = TrainingContext::build(config, g);
  for (int k = 0; k < config.runs; ++k) {
    TrainConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(k);
    try {
      TrainResult t = train(run_config, g, ctx, options.train);
      result.report.add(t.record.evaluation.values);
      result.runs.push_back(t.record);
      if (options.on_run) options.on_run(k, t.record);
      if (options.write_artifacts) {
        trained.push_back(std::move(t));
      }
    } catch (const Error& e) {
      result.failed = true;
      result.failure = fmt::format("run {} (seed {}): {}", k, run_config.seed, e.what());
      break;
    }
  }
  result.report.aggregate();
  if (options.write_artifacts) {
    result.directory = resolve_directory(config, options, "");
    write_artifacts(result.directory, config, result, trained);
  }
  return result;
}

std::vector<TrainConfig> SweepGrid::cells(const TrainConfig& base) const {
  const bool lambdas = !lambda1.empty() || !lambda2.empty();
  const int axes = (lambdas ? 1 : 0) + (filter_depth.empty() ? 0 : 1) + (tau.empty() ? 0 : 1);
  if (axes == 0) throw ConfigError("empty sweep grid");
  if (axes > 1) throw ConfigError("sweep grid must vary lambda1 x lambda2, filter_depth or tau, not several");
  std::vector<TrainConfig> out;
  if (lambdas) {
    if (lambda1.empty() || lambda2.empty()) throw ConfigError("empty sweep grid: lambda sweep needs both axes");
    for (double l1 : lambda1) {
      for (double l2 : lambda2) {
        TrainConfig c = base;
        c.lambda1 = l1;
        c.lambda2 = l2;
        out.push_back(c);
      }
    }
  }
  for (int r : filter_depth) {
    TrainConfig c = base;
    c.filter_depth = r;
    out.push_back(c);
  }
  for (double t : tau) {
    TrainConfig c = base;
    c.tau = t;
    out.push_back(c);
  }
  for (const TrainConfig& c : out) c.validate();
  return out;
}

std::string aggregate_csv_header() {
  return "acc_mean,acc_std,nmi_mean,nmi_std,ari_mean,ari_std,f1_mean,f1_std,f1_weighted_mean,f1_weighted_std,"
         "q_mean,q_std";
}

std::string aggregate_csv_fields(const MetricsReport& r) {
  std::string out;
  for (const MetricStats* s : {&r.acc, &r.nmi, &r.ari, &r.f1, &r.f1_weighted, &r.modularity_q}) {
    if (!out.empty()) out += ',';
    out += num(s->mean) + ',' + num(s->std);
  }
  return out;
}

std::vector<SweepRow> sweep(const TrainConfig& base, const Graph& g, const SweepGrid& grid,
                            const ExperimentOptions& options) {
  const std::vector<TrainConfig> cells = grid.cells(base);
  const fs::path dir = options.write_artifacts ? resolve_directory(base, options, "sweep-") : fs::path();
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    ExperimentOptions cell_options = options;
    if (options.write_artifacts) cell_options.out_dir = dir / fmt::format("cell_{}", i);
    const ExperimentResult r = run_experiment(cells[i], g, cell_options);
    rows.push_back({cells[i].lambda1, cells[i].lambda2, cells[i].filter_depth, cells[i].tau, r.report, r.failed});
  }
  if (options.write_artifacts) {
    fs::create_directories(dir);
    auto csv = open_out(dir / "sweep.csv");
    csv << "dataset,cell,lambda1,lambda2,filter_depth,tau,runs,failed," << aggregate_csv_header() << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& row = rows[i];
      csv << fmt::format("{},{},{},{},{},{},{},{},{}\n", base.dataset, i, num(row.lambda1), num(row.lambda2),
                         row.filter_depth, num(row.tau), row.report.per_run.size(), row.failed ? 1 : 0,
                         aggregate_csv_fields(row.report));
    }
  }
  return rows;
}

std::vector<AblationRow> ablate(const TrainConfig& base, const Graph& g, const ExperimentOptions& options) {
  const fs::path dir = options.write_artifacts ? resolve_directory(base, options, "ablate-") : fs::path();
  std::vector<AblationRow> rows;
  for (Ablation a : {Ablation::kFull, Ablation::kNoModularity, Ablation::kNoContrastive, Ablation::kNoStructural}) {
    TrainConfig c = base;
    c.ablation = a;
    ExperimentOptions variant = options;
    if (options.write_artifacts) variant.out_dir = dir / std::string(ablation_name(a));
    const ExperimentResult r = run_experiment(c, g, variant);
    rows.push_back({a, r.report, r.failed});
  }
  if (options.write_artifacts) {
    auto csv = open_out(dir / "ablation.csv");
    csv << "dataset,method,ablation,runs,failed," << aggregate_csv_header() << '\n';
    for (const AblationRow& row : rows) {
      csv << fmt::format("{},{},{},{},{},{}\n", base.dataset, method_name(row.ablation), ablation_name(row.ablation),
                         row.report.per_run.size(), row.failed ? 1 : 0, aggregate_csv_fields(row.report));
    }
  }
  return rows;
}

TimeReport time_report(const TrainConfig& config, const Graph& g) {
  const auto start = std::chrono::steady_clock::now();
  TrainOptions options;
  options.evaluate = false;
  const TrainResult r = train(config, g, options);
  TimeReport report;
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.epochs = static_cast<int>(r.record.loss_log.size());
  return report;
}

}  // namespace secl
