#include "secl/adam.hpp"

#include <cmath>
#include <string>

#include "secl/error.hpp"

namespace secl {

void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix> grads,
               AdamState& state) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  const bool fresh = state.first_moment.empty();
  if (!fresh && state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                     " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const DenseMatrix& p = *params[k];
    if (p.rows() != grads[k].rows() || p.cols() != grads[k].cols()) {
      throw ShapeError("adam_step: parameter " + std::to_string(k) + " is " + shape_string(p) +
                       " but its gradient is " + shape_string(grads[k]));
    }
    if (!fresh && (state.first_moment[k].rows() != p.rows() || state.first_moment[k].cols() != p.cols())) {
      throw ShapeError("adam_step: moment " + std::to_string(k) + " shape " +
                       shape_string(state.first_moment[k]) + " does not match " + shape_string(p));
    }
    require_finite(grads[k], "adam_step gradient " + std::to_string(k));
  }
  if (fresh) {
    for (const DenseMatrix* p : params) {
      state.first_moment.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
      state.second_moment.push_back(DenseMatrix::Zero(p->rows(), p->cols()));
    }
  }

  const auto& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(o.beta1, t);
  const double bias2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto m = state.first_moment[k].array();
    auto v = state.second_moment[k].array();
    const auto g = grads[k].array();
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g.square();
    params[k]->array() -= o.learning_rate * (m / bias1) / ((v / bias2).sqrt() + o.epsilon);
  }
}

}  // namespace secl
