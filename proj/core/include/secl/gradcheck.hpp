#pragma once

#include <functional>
#include <vector>

#include "secl/matrix.hpp"

namespace secl {

// Scalar loss evaluated at a full parameter set.
using LossFunction = std::function<double(const std::vector<DenseMatrix>&)>;

// Central differences (f(theta + h e_k) - f(theta - h e_k)) / 2h for every
// scalar entry of every parameter. Gradient oracle for the tape.
std::vector<DenseMatrix> finite_difference_grad(const LossFunction& loss,
                                                std::vector<DenseMatrix> params, double h = 1e-5);

}  // namespace secl
