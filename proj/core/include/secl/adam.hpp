#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "secl/matrix.hpp"

namespace secl {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one parameter set. Moments are created zeroed on
// the first step, shaped like the parameters.
struct AdamState {
  AdamOptions options;
  std::int64_t step = 0;
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;

  explicit AdamState(AdamOptions opts = {}) : options(opts) {}
};

// One bias-corrected Adam update, in place:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)
// Throws ShapeError on mismatched shapes and NumericError on a non-finite
// gradient (parameters and state are left untouched in both cases).
void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix> grads,
               AdamState& state);

}  // namespace secl
