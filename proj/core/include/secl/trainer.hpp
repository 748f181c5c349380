#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "secl/config.hpp"
#include "secl/encoders.hpp"
#include "secl/error.hpp"
#include "secl/graph.hpp"
#include "secl/kmeans.hpp"
#include "secl/losses.hpp"
#include "secl/metrics.hpp"

namespace secl {

std::string_view library_version();

// Graph-derived inputs shared by every run of one configuration: the
// operators and the smoothed attributes. Immutable once built.
struct TrainingContext {
  GraphOperators ops;
  DenseMatrix x_hat;

  static TrainingContext build(const TrainConfig& config, const Graph& g);
};

struct RunRecord {
  std::string config_snapshot;  // TrainConfig::canonical() with the run's seed
  std::uint64_t seed = 0;
  std::vector<LossBreakdown> loss_log;  // one entry per epoch, before its update
  std::vector<double> head_grad_norms;  // Frobenius norm of dL/dW per epoch
  Evaluation evaluation;
  std::vector<int> labels;  // K-means assignment of the final h2
  double wall_seconds = 0.0;
  std::string version;
};

struct TrainResult {
  EncoderParams params;
  DenseMatrix h2;  // final attribute-view embedding, N x d'
  RunRecord record;
};

// Thrown when an epoch produces a non-finite loss. Carries the last finite
// breakdown (all zeros when the first epoch already failed).
class TrainingDiverged : public NumericError {
 public:
  TrainingDiverged(int epoch, const LossBreakdown& last_finite);
  int epoch() const noexcept { return epoch_; }
  const LossBreakdown& last_finite() const noexcept { return last_finite_; }

 private:
  int epoch_;
  LossBreakdown last_finite_;
};

struct TrainOptions {
  bool evaluate = true;  // K-means and metrics after the last epoch
  // Called after each epoch with the 1-based epoch index.
  std::function<void(int, const LossBreakdown&)> on_epoch;
};

// Full-batch training: smooth once, then per epoch encode both views, form
// the similarity once, evaluate the three losses, backpropagate and take
// one Adam step on every parameter including W. Uses config.seed for both
// initialization and K-means.
TrainResult train(const TrainConfig& config, const Graph& g, const TrainOptions& options = {});
TrainResult train(const TrainConfig& config, const Graph& g, const TrainingContext& context,
                  const TrainOptions& options = {});

}  // namespace secl
