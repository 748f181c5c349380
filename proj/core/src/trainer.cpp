#include "secl/trainer.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "secl/adam.hpp"
#include "secl/tape.hpp"

namespace secl {

std::string_view library_version() { return SECL_VERSION; }

TrainingContext TrainingContext::build(const TrainConfig& config, const Graph& g) {
  TrainingContext ctx;
  ctx.ops = GraphOperators::build(g, config.dense_cap);
  ctx.x_hat = smooth_attributes(ctx.ops.a_hat, g.attributes, config.filter_depth);
  return ctx;
}

TrainingDiverged::TrainingDiverged(int epoch, const LossBreakdown& last)
    : NumericError(fmt::format("non-finite loss at epoch {}; last finite: l_cl={} l_sl={} l_m={} total={}",
                               epoch, last.l_cl, last.l_sl, last.l_m, last.total)),
      epoch_(epoch),
      last_finite_(last) {}

namespace {

bool finite(const LossBreakdown& b) {
  return std::isfinite(b.l_cl) && std::isfinite(b.l_sl) && std::isfinite(b.l_m) && std::isfinite(b.total);
}

EncoderShape shape_of(const TrainConfig& config, const Graph& g) {
  EncoderShape s;
  s.num_nodes = g.num_nodes;
  s.num_attributes = g.num_attributes();
  s.structure_widths = config.structure_widths;
  s.attribute_widths = config.attribute_widths;
  s.clusters = config.clusters;
  s.hidden_activation = config.hidden_activation;
  return s;
}

}  // namespace

TrainResult train(const TrainConfig& config, const Graph& g, const TrainOptions& options) {
  return train(config, g, TrainingContext::build(config, g), options);
}

TrainResult train(const TrainConfig& config, const Graph& g, const TrainingContext& ctx,
                  const TrainOptions& options) {
  config.validate();
  if (config.clusters > g.num_nodes) {
    throw ConfigError(fmt::format("cannot form {} clusters from {} nodes", config.clusters, g.num_nodes));
  }
  const bool need_modularity = config.ablation != Ablation::kNoModularity;
  if (need_modularity && !ctx.ops.modularity) {
    throw DegenerateGraphError("modularity loss needs at least one edge");
  }
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  result.params = init_params(shape_of(config, g), config.seed);
  RunRecord& rec = result.record;
  rec.seed = config.seed;
  rec.config_snapshot = config.canonical();
  rec.version = std::string(library_version());
  rec.loss_log.reserve(static_cast<std::size_t>(config.epochs));
  rec.head_grad_norms.reserve(static_cast<std::size_t>(config.epochs));

  const LossWeights weights = config.loss_weights();
  AdamState adam(AdamOptions{config.learning_rate});
  std::vector<DenseMatrix*> tensors = result.params.tensors();
  std::vector<DenseMatrix> grads(tensors.size());
  LossBreakdown last_finite;

  // One forward/backward/update; returns the breakdown before the update.
  auto step = [&](int epoch) {
    Tape tape;
    const BoundParams bound = bind(tape, result.params);
    const EmbeddingVars e = encode(tape, bound, ctx.ops.a, tape.constant(ctx.x_hat));

    LossTerms terms;
    const Var similarity = cross_view_similarity(tape, e.h1, e.h2);
    terms.l_cl = contrastive_loss_from_similarity(tape, similarity, config.tau);
    terms.l_sl = g.num_nodes <= config.similarity_dense_cap
                     ? structural_loss_from_similarity(tape, similarity, ctx.ops.a_tilde)
                     : structural_contrastive_loss_blockwise(tape, e.h1, e.h2, ctx.ops.a_tilde);
    const Var logits = assignment_logits(tape, bound, e.h2);
    terms.l_m = ctx.ops.modularity ? modularity_loss(tape, logits, *ctx.ops.modularity)
                                   : tape.constant(DenseMatrix::Zero(1, 1));
    const Var total = total_loss(tape, terms, weights);
    const LossBreakdown b = breakdown(tape, terms, total, weights);
    if (!finite(b)) throw TrainingDiverged(epoch, last_finite);

    tape.backward(total);
    const std::vector<Var> leaves = bound.all();
    for (std::size_t k = 0; k < leaves.size(); ++k) grads[k] = tape.grad(leaves[k]);
    rec.head_grad_norms.push_back(grads.back().norm());
    adam_step(tensors, grads, adam);
    return b;
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    LossBreakdown b;
    try {
      b = step(epoch);
    } catch (const TrainingDiverged&) {
      throw;
    } catch (const NumericError&) {
      // Non-finite logits or gradients surface before the loss does.
      throw TrainingDiverged(epoch, last_finite);
    }
    last_finite = b;
    rec.loss_log.push_back(b);
    if (options.on_epoch) options.on_epoch(epoch, b);
  }

  result.h2 = compute_embeddings(result.params, ctx.ops.a, ctx.x_hat).h2;
  require_finite(result.h2, "final embedding");
  if (options.evaluate) {
    const ClusterResult clusters =
        kmeans(result.h2, static_cast<int>(config.clusters), config.seed, config.kmeans);
    rec.labels = clusters.labels;
    rec.evaluation = evaluate_clustering(rec.labels, g);
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace secl
