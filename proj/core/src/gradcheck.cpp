#include "secl/gradcheck.hpp"

#include "secl/error.hpp"

namespace secl {

std::vector<DenseMatrix> finite_difference_grad(const LossFunction& loss,
                                                std::vector<DenseMatrix> params, double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  std::vector<DenseMatrix> grads;
  grads.reserve(params.size());
  for (auto& p : params) {
    DenseMatrix g(p.rows(), p.cols());
    for (Index i = 0; i < p.size(); ++i) {
      double& entry = p.data()[i];
      const double saved = entry;
      entry = saved + h;
      const double up = loss(params);
      entry = saved - h;
      const double down = loss(params);
      entry = saved;
      g.data()[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace secl
