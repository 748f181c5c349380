#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "secl/matrix.hpp"

namespace secl {

// Handle to a node recorded on a Tape. Only meaningful for the tape that
// created it.
struct Var {
  std::size_t id = 0;
};

enum class OpKind {
  kParameter,
  kConstant,
  kMatMul,
  kSparseMatMul,
  kAdd,
  kSubtract,
  kScale,
  kTranspose,
  kRowL2Normalize,
  kSoftmaxRows,
  kExp,
  kLog,
  kMultiply,
  kSquare,
  kSum,
  kMean,
  kTraceQuadratic,
  kGatherDiagonal,
  kRowLogSumExp,
  kTanh,
  kSymmetricInfoNce,
  kSquaredErrorMean,
};

std::string_view op_name(OpKind kind);

// Applies a constant symmetric N x N operator to an N x C matrix.
using SymmetricOperator = std::function<DenseMatrix(const DenseMatrix&)>;

// Append-only record of dense operations with cached forward values.
//
// Every op computes its value eagerly. backward() walks the nodes in reverse
// insertion order, which is a valid reverse topological order because inputs
// always precede their consumers. Nodes that depend on no parameter are never
// visited. A tape supports exactly one backward pass; use a fresh tape per
// optimizer step.
//
// Sparse matrices and symmetric operators passed to the tape are held by
// reference and must outlive it.
class Tape {
 public:
  // Epsilon inside the square root of row_l2_normalize.
  static constexpr double kNormEpsilon = 1e-12;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Leaves. Parameters receive gradients; constants do not.
  Var parameter(DenseMatrix value);
  Var constant(DenseMatrix value);

  // op(a) * op(b) where op transposes when the flag is set.
  Var matmul(Var a, Var b, bool transpose_a = false, bool transpose_b = false);
  // s * b with s a constant sparse matrix.
  Var sparse_matmul(const SparseMatrix& s, Var b);

  // a + b and a - b. b may match a's shape, be a 1 x cols row (broadcast over
  // rows) or a 1 x 1 scalar (broadcast everywhere).
  Var add(Var a, Var b);
  Var subtract(Var a, Var b);
  Var scale(Var a, double alpha);
  Var transpose(Var a);

  // Row i becomes x_i / sqrt(|x_i|^2 + kNormEpsilon).
  Var row_l2_normalize(Var a);
  Var softmax_rows(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var multiply(Var a, Var b);
  Var square(Var a);

  // Reductions to 1 x 1.
  Var sum(Var a);
  Var mean(Var a);

  // Tr(U^T B U) for constant symmetric B. Result is 1 x 1.
  Var trace_quadratic(Var u, SymmetricOperator b);

  // min(rows, cols) x 1 column of a's diagonal.
  Var gather_diagonal(Var a);
  // rows x 1 column of log(sum_j exp(a_ij)), computed with the max shift.
  Var row_logsumexp(Var a);
  Var tanh(Var a);

  // Fused N x N losses. The similarity matrices they consume dominate the
  // epoch, so each is read in as few passes as possible.
  //
  // 1/2N sum_i [lse_j(s_ij/t) + lse_j(s_ji/t) - 2 s_ii/t] for square s.
  Var symmetric_infonce(Var s, double inv_tau);
  // mean((x - target)^2) with a sparse constant target of x's shape.
  Var squared_error_mean(Var x, const SparseMatrix& target);

  const DenseMatrix& value(Var v) const;
  // Value of a 1 x 1 node.
  double scalar(Var v) const;
  OpKind kind(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Reverse pass from a 1 x 1 loss node. Throws ContractError for a
  // non-scalar loss or a second call.
  void backward(Var loss);
  bool has_run_backward() const { return backward_done_; }

  // Adjoint of v after backward(); all zeros when v does not influence the
  // loss. Shape always equals value(v)'s shape.
  DenseMatrix grad(Var v) const;

 private:
  struct Node {
    explicit Node(OpKind k, std::size_t lhs = 0, std::size_t rhs = 0) : kind(k), a(lhs), b(rhs) {}
    OpKind kind;
    std::size_t a = 0;
    std::size_t b = 0;
    DenseMatrix value;
    DenseMatrix adjoint;  // empty until touched by backward
    DenseMatrix cache;    // op-specific forward by-product
    double alpha = 0.0;
    bool flag_a = false;
    bool flag_b = false;
    bool requires_grad = false;
    const SparseMatrix* sparse = nullptr;
    std::shared_ptr<SymmetricOperator> op;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  void accumulate(std::size_t id, DenseMatrix delta);
  void backprop_node(std::size_t id);

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

}  // namespace secl
