#include "secl/tape.hpp"

#include <cmath>
#include <utility>

#include "secl/error.hpp"

namespace secl {
namespace {

enum class Broadcast { kSame, kRow, kScalar };

Broadcast broadcast_kind(OpKind kind, const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::kSame;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  throw ShapeError(std::string(op_name(kind)) + ": cannot combine " + shape_string(a) + " with " +
                   shape_string(b));
}

void require_same_shape(OpKind kind, const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op_name(kind)) + ": shape mismatch " + shape_string(a) + " vs " +
                     shape_string(b));
  }
}

// Reduces an adjoint of a's shape down to b's broadcast shape.
DenseMatrix reduce_to(const DenseMatrix& g, Broadcast kind) {
  switch (kind) {
    case Broadcast::kSame:
      return g;
    case Broadcast::kRow:
      return g.colwise().sum();
    case Broadcast::kScalar:
      return DenseMatrix::Constant(1, 1, g.sum());
  }
  return g;
}

}  // namespace

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kParameter: return "parameter";
    case OpKind::kConstant: return "constant";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kSparseMatMul: return "matmul-sparse-left";
    case OpKind::kAdd: return "add";
    case OpKind::kSubtract: return "subtract";
    case OpKind::kScale: return "scale";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kRowL2Normalize: return "row-l2-normalize";
    case OpKind::kSoftmaxRows: return "softmax-rows";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kMultiply: return "elementwise-multiply";
    case OpKind::kSquare: return "elementwise-square";
    case OpKind::kSum: return "reduce-sum";
    case OpKind::kMean: return "reduce-mean";
    case OpKind::kTraceQuadratic: return "trace-of-triple-product";
    case OpKind::kGatherDiagonal: return "gather-diagonal";
    case OpKind::kRowLogSumExp: return "row-logsumexp";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSymmetricInfoNce: return "symmetric-infonce";
    case OpKind::kSquaredErrorMean: return "squared-error-mean";
  }
  return "unknown";
}

Var Tape::push(Node node) {
  if (backward_done_) throw ContractError("cannot record on a tape after backward()");
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) {
    throw ContractError("variable " + std::to_string(v.id) + " does not belong to this tape");
  }
  return nodes_[v.id];
}

Var Tape::parameter(DenseMatrix value) {
  Node n{OpKind::kParameter};
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::constant(DenseMatrix value) {
  Node n{OpKind::kConstant};
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b, bool transpose_a, bool transpose_b) {
  const auto& va = node(a).value;
  const auto& vb = node(b).value;
  const Index inner_a = transpose_a ? va.rows() : va.cols();
  const Index inner_b = transpose_b ? vb.cols() : vb.rows();
  if (inner_a != inner_b) {
    throw ShapeError("matmul: inner dimensions differ for " +
                     shape_string(va) + (transpose_a ? "^T" : "") + " and " + shape_string(vb) +
                     (transpose_b ? "^T" : ""));
  }
  Node n{OpKind::kMatMul, a.id, b.id};
  n.flag_a = transpose_a;
  n.flag_b = transpose_b;
  n.value.resize(transpose_a ? va.cols() : va.rows(), transpose_b ? vb.rows() : vb.cols());
  if (!transpose_a && !transpose_b) {
    n.value.noalias() = va * vb;
  } else if (transpose_a && !transpose_b) {
    n.value.noalias() = va.transpose() * vb;
  } else if (!transpose_a && transpose_b) {
    n.value.noalias() = va * vb.transpose();
  } else {
    n.value.noalias() = va.transpose() * vb.transpose();
  }
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Var Tape::sparse_matmul(const SparseMatrix& s, Var b) {
  const auto& vb = node(b).value;
  if (s.cols() != vb.rows()) {
    throw ShapeError("matmul-sparse-left: inner dimensions differ for " + shape_string(s.rows(), s.cols()) +
                     " and " + shape_string(vb));
  }
  Node n{OpKind::kSparseMatMul, b.id, b.id};
  n.sparse = &s;
  n.value.resize(s.rows(), vb.cols());
  n.value.noalias() = s * vb;
  n.requires_grad = node(b).requires_grad;
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const auto& va = node(a).value;
  const auto& vb = node(b).value;
  Node n{OpKind::kAdd, a.id, b.id};
  n.value = va;
  switch (broadcast_kind(OpKind::kAdd, va, vb)) {
    case Broadcast::kSame: n.value += vb; break;
    case Broadcast::kRow: n.value.rowwise() += vb.row(0); break;
    case Broadcast::kScalar: n.value.array() += vb(0, 0); break;
  }
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Var Tape::subtract(Var a, Var b) {
  const auto& va = node(a).value;
  const auto& vb = node(b).value;
  Node n{OpKind::kSubtract, a.id, b.id};
  n.value = va;
  switch (broadcast_kind(OpKind::kSubtract, va, vb)) {
    case Broadcast::kSame: n.value -= vb; break;
    case Broadcast::kRow: n.value.rowwise() -= vb.row(0); break;
    case Broadcast::kScalar: n.value.array() -= vb(0, 0); break;
  }
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Var Tape::scale(Var a, double alpha) {
  Node n{OpKind::kScale, a.id, a.id};
  n.alpha = alpha;
  n.value = alpha * node(a).value;
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::transpose(Var a) {
  Node n{OpKind::kTranspose, a.id, a.id};
  n.value = node(a).value.transpose();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::row_l2_normalize(Var a) {
  const auto& va = node(a).value;
  Node n{OpKind::kRowL2Normalize, a.id, a.id};
  n.cache = (va.rowwise().squaredNorm().array() + kNormEpsilon).sqrt().matrix();
  n.value = va;
  for (Index i = 0; i < va.rows(); ++i) n.value.row(i) /= n.cache(i, 0);
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::softmax_rows(Var a) {
  const auto& va = node(a).value;
  Node n{OpKind::kSoftmaxRows, a.id, a.id};
  n.value.resize(va.rows(), va.cols());
  for (Index i = 0; i < va.rows(); ++i) {
    const double m = va.row(i).maxCoeff();
    n.value.row(i) = (va.row(i).array() - m).exp().matrix();
    n.value.row(i) /= n.value.row(i).sum();
  }
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::exp(Var a) {
  Node n{OpKind::kExp, a.id, a.id};
  n.value = node(a).value.array().exp().matrix();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::log(Var a) {
  Node n{OpKind::kLog, a.id, a.id};
  n.value = node(a).value.array().log().matrix();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::multiply(Var a, Var b) {
  const auto& va = node(a).value;
  const auto& vb = node(b).value;
  require_same_shape(OpKind::kMultiply, va, vb);
  Node n{OpKind::kMultiply, a.id, b.id};
  n.value = va.cwiseProduct(vb);
  n.requires_grad = node(a).requires_grad || node(b).requires_grad;
  return push(std::move(n));
}

Var Tape::square(Var a) {
  Node n{OpKind::kSquare, a.id, a.id};
  n.value = node(a).value.array().square().matrix();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  Node n{OpKind::kSum, a.id, a.id};
  n.value = DenseMatrix::Constant(1, 1, node(a).value.sum());
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  const auto& va = node(a).value;
  if (va.size() == 0) throw ShapeError("reduce-mean: empty input " + shape_string(va));
  Node n{OpKind::kMean, a.id, a.id};
  n.value = DenseMatrix::Constant(1, 1, va.sum() / static_cast<double>(va.size()));
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::trace_quadratic(Var u, SymmetricOperator b) {
  const auto& vu = node(u).value;
  Node n{OpKind::kTraceQuadratic, u.id, u.id};
  n.cache = b(vu);
  if (n.cache.rows() != vu.rows() || n.cache.cols() != vu.cols()) {
    throw ShapeError("trace-of-triple-product: operator mapped " + shape_string(vu) + " to " +
                     shape_string(n.cache));
  }
  n.value = DenseMatrix::Constant(1, 1, vu.cwiseProduct(n.cache).sum());
  n.op = std::make_shared<SymmetricOperator>(std::move(b));
  n.requires_grad = node(u).requires_grad;
  return push(std::move(n));
}

Var Tape::gather_diagonal(Var a) {
  const auto& va = node(a).value;
  Node n{OpKind::kGatherDiagonal, a.id, a.id};
  n.value = va.diagonal();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::row_logsumexp(Var a) {
  const auto& va = node(a).value;
  if (va.cols() == 0) throw ShapeError("row-logsumexp: input has no columns");
  Node n{OpKind::kRowLogSumExp, a.id, a.id};
  n.value.resize(va.rows(), 1);
  for (Index i = 0; i < va.rows(); ++i) {
    const double m = va.row(i).maxCoeff();
    n.value(i, 0) = m + std::log((va.row(i).array() - m).exp().sum());
  }
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  Node n{OpKind::kTanh, a.id, a.id};
  n.value = node(a).value.array().tanh().matrix();
  n.requires_grad = node(a).requires_grad;
  return push(std::move(n));
}

Var Tape::symmetric_infonce(Var s, double inv_tau) {
  const auto& vs = node(s).value;
  if (vs.rows() != vs.cols() || vs.rows() == 0) {
    throw ShapeError("symmetric-infonce: needs a non-empty square input, got " + shape_string(vs));
  }
  const Index n = vs.rows();
  Node out{OpKind::kSymmetricInfoNce, s.id, s.id};
  out.alpha = inv_tau;
  // cache column 0: row log-sum-exp, column 1: column log-sum-exp.
  out.cache.resize(n, 2);
  const Eigen::RowVectorXd col_max =
      inv_tau >= 0.0 ? Eigen::RowVectorXd(vs.colwise().maxCoeff() * inv_tau) : Eigen::RowVectorXd(vs.colwise().minCoeff() * inv_tau);
  Eigen::RowVectorXd col_sum = Eigen::RowVectorXd::Zero(n);
  Eigen::RowVectorXd t(n);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    t = vs.row(i) * inv_tau;
    const double m = t.maxCoeff();
    out.cache(i, 0) = m + std::log((t.array() - m).exp().sum());
    col_sum.array() += (t - col_max).array().exp();
    total += out.cache(i, 0) - 2.0 * t(i);
  }
  for (Index j = 0; j < n; ++j) {
    out.cache(j, 1) = col_max(j) + std::log(col_sum(j));
    total += out.cache(j, 1);
  }
  out.value = DenseMatrix::Constant(1, 1, total / (2.0 * static_cast<double>(n)));
  out.requires_grad = node(s).requires_grad;
  return push(std::move(out));
}

Var Tape::squared_error_mean(Var x, const SparseMatrix& target) {
  const auto& vx = node(x).value;
  if (vx.rows() != target.rows() || vx.cols() != target.cols() || vx.size() == 0) {
    throw ShapeError("squared-error-mean: input " + shape_string(vx) + " vs target " +
                     shape_string(target.rows(), target.cols()));
  }
  Node n{OpKind::kSquaredErrorMean, x.id, x.id};
  n.sparse = &target;
  double total = vx.squaredNorm();
  for (Index i = 0; i < target.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(target, i); it; ++it) {
      const double v = vx(it.row(), it.col());
      total += (v - it.value()) * (v - it.value()) - v * v;
    }
  }
  n.value = DenseMatrix::Constant(1, 1, total / static_cast<double>(vx.size()));
  n.requires_grad = node(x).requires_grad;
  return push(std::move(n));
}

const DenseMatrix& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const auto& val = node(v).value;
  if (val.rows() != 1 || val.cols() != 1) {
    throw ContractError("scalar() on non-scalar node of shape " + shape_string(val));
  }
  return val(0, 0);
}

OpKind Tape::kind(Var v) const { return node(v).kind; }

DenseMatrix Tape::grad(Var v) const {
  const auto& n = node(v);
  if (n.adjoint.size() == 0) return DenseMatrix::Zero(n.value.rows(), n.value.cols());
  return n.adjoint;
}

void Tape::accumulate(std::size_t id, DenseMatrix delta) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.adjoint.size() == 0) {
    n.adjoint = std::move(delta);
  } else {
    n.adjoint += delta;
  }
}

void Tape::backward(Var loss) {
  const auto& root = node(loss);
  if (root.value.rows() != 1 || root.value.cols() != 1) {
    throw ContractError("backward() needs a 1x1 loss, got " + shape_string(root.value));
  }
  if (backward_done_) throw ContractError("backward() already ran on this tape");
  backward_done_ = true;
  if (!root.requires_grad) return;
  nodes_[loss.id].adjoint = DenseMatrix::Ones(1, 1);
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    if (nodes_[id].requires_grad && nodes_[id].adjoint.size() != 0) backprop_node(id);
  }
}

void Tape::backprop_node(std::size_t id) {
  const Node& n = nodes_[id];
  const DenseMatrix& g = n.adjoint;
  const auto needs = [&](std::size_t input) { return nodes_[input].requires_grad; };

  switch (n.kind) {
    case OpKind::kParameter:
    case OpKind::kConstant:
      break;

    case OpKind::kMatMul: {
      const auto& va = nodes_[n.a].value;
      const auto& vb = nodes_[n.b].value;
      if (needs(n.a)) {
        DenseMatrix da(va.rows(), va.cols());
        // C = op(A) op(B): d op(A) = G op(B)^T.
        if (!n.flag_a && !n.flag_b) da.noalias() = g * vb.transpose();
        else if (!n.flag_a && n.flag_b) da.noalias() = g * vb;
        else if (n.flag_a && !n.flag_b) da.noalias() = vb * g.transpose();
        else da.noalias() = vb.transpose() * g.transpose();
        accumulate(n.a, std::move(da));
      }
      if (needs(n.b)) {
        DenseMatrix db(vb.rows(), vb.cols());
        // d op(B) = op(A)^T G.
        if (!n.flag_a && !n.flag_b) db.noalias() = va.transpose() * g;
        else if (n.flag_a && !n.flag_b) db.noalias() = va * g;
        else if (!n.flag_a && n.flag_b) db.noalias() = g.transpose() * va;
        else db.noalias() = g.transpose() * va.transpose();
        accumulate(n.b, std::move(db));
      }
      break;
    }

    case OpKind::kSparseMatMul: {
      DenseMatrix db(n.sparse->cols(), g.cols());
      db.noalias() = n.sparse->transpose() * g;
      accumulate(n.a, std::move(db));
      break;
    }

    case OpKind::kAdd:
    case OpKind::kSubtract: {
      if (needs(n.a)) accumulate(n.a, g);
      if (needs(n.b)) {
        const auto kind = broadcast_kind(n.kind, nodes_[n.a].value, nodes_[n.b].value);
        DenseMatrix db = reduce_to(g, kind);
        if (n.kind == OpKind::kSubtract) db = -db;
        accumulate(n.b, std::move(db));
      }
      break;
    }

    case OpKind::kScale:
      accumulate(n.a, n.alpha * g);
      break;

    case OpKind::kTranspose:
      accumulate(n.a, g.transpose());
      break;

    case OpKind::kRowL2Normalize: {
      // dx = (dy - y (y . dy)) / ||x||_eps, exact for the epsilon-regularized norm.
      const DenseMatrix& y = n.value;
      DenseMatrix dx(y.rows(), y.cols());
      for (Index i = 0; i < y.rows(); ++i) {
        const double proj = y.row(i).dot(g.row(i));
        dx.row(i) = (g.row(i) - proj * y.row(i)) / n.cache(i, 0);
      }
      accumulate(n.a, std::move(dx));
      break;
    }

    case OpKind::kSoftmaxRows: {
      const DenseMatrix& y = n.value;
      DenseMatrix dx(y.rows(), y.cols());
      for (Index i = 0; i < y.rows(); ++i) {
        const double proj = y.row(i).dot(g.row(i));
        dx.row(i) = y.row(i).cwiseProduct((g.row(i).array() - proj).matrix());
      }
      accumulate(n.a, std::move(dx));
      break;
    }

    case OpKind::kExp:
      accumulate(n.a, g.cwiseProduct(n.value));
      break;

    case OpKind::kLog:
      accumulate(n.a, g.cwiseQuotient(nodes_[n.a].value));
      break;

    case OpKind::kMultiply:
      if (needs(n.a)) accumulate(n.a, g.cwiseProduct(nodes_[n.b].value));
      if (needs(n.b)) accumulate(n.b, g.cwiseProduct(nodes_[n.a].value));
      break;

    case OpKind::kSquare:
      accumulate(n.a, 2.0 * g.cwiseProduct(nodes_[n.a].value));
      break;

    case OpKind::kSum: {
      const auto& va = nodes_[n.a].value;
      accumulate(n.a, DenseMatrix::Constant(va.rows(), va.cols(), g(0, 0)));
      break;
    }

    case OpKind::kMean: {
      const auto& va = nodes_[n.a].value;
      accumulate(n.a, DenseMatrix::Constant(va.rows(), va.cols(),
                                            g(0, 0) / static_cast<double>(va.size())));
      break;
    }

    case OpKind::kTraceQuadratic:
      // d/dU Tr(U^T B U) = (B + B^T) U = 2 B U for symmetric B.
      accumulate(n.a, (2.0 * g(0, 0)) * n.cache);
      break;

    case OpKind::kGatherDiagonal: {
      const auto& va = nodes_[n.a].value;
      DenseMatrix dx = DenseMatrix::Zero(va.rows(), va.cols());
      for (Index i = 0; i < n.value.rows(); ++i) dx(i, i) = g(i, 0);
      accumulate(n.a, std::move(dx));
      break;
    }

    case OpKind::kRowLogSumExp: {
      const auto& va = nodes_[n.a].value;
      DenseMatrix dx(va.rows(), va.cols());
      for (Index i = 0; i < va.rows(); ++i) {
        dx.row(i) = ((va.row(i).array() - n.value(i, 0)).exp() * g(i, 0)).matrix();
      }
      accumulate(n.a, std::move(dx));
      break;
    }

    case OpKind::kTanh:
      accumulate(n.a, g.cwiseProduct((1.0 - n.value.array().square()).matrix()));
      break;

    case OpKind::kSymmetricInfoNce: {
      // d/ds_ij = c/t [softmax_row(i)_j + softmax_col(j)_i - 2 delta_ij], c = g/2N.
      const auto& vs = nodes_[n.a].value;
      const Index size = vs.rows();
      const double t = n.alpha;
      const double c = g(0, 0) * t / (2.0 * static_cast<double>(size));
      const Eigen::RowVectorXd col_lse = n.cache.col(1).transpose();
      DenseMatrix ds(size, size);
      Eigen::RowVectorXd z(size);
      for (Index i = 0; i < size; ++i) {
        z = vs.row(i) * t;
        ds.row(i) = c * ((z.array() - n.cache(i, 0)).exp() + (z - col_lse).array().exp()).matrix();
        ds(i, i) -= 2.0 * c;
      }
      accumulate(n.a, std::move(ds));
      break;
    }

    case OpKind::kSquaredErrorMean: {
      const auto& vx = nodes_[n.a].value;
      const double c = 2.0 * g(0, 0) / static_cast<double>(vx.size());
      DenseMatrix dx = c * vx;
      for (Index i = 0; i < n.sparse->outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(*n.sparse, i); it; ++it) dx(it.row(), it.col()) -= c * it.value();
      }
      accumulate(n.a, std::move(dx));
      break;
    }
  }
}

}  // namespace secl
