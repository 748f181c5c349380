#include "secl/losses.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "secl/error.hpp"

namespace secl {

std::string_view ablation_name(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kNoModularity: return "no-M";
    case Ablation::kNoContrastive: return "no-CL";
    case Ablation::kNoStructural: return "no-SL";
  }
  return "full";
}

Ablation parse_ablation(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "full") return Ablation::kFull;
  if (lower == "no-m") return Ablation::kNoModularity;
  if (lower == "no-cl") return Ablation::kNoContrastive;
  if (lower == "no-sl") return Ablation::kNoStructural;
  throw ConfigError("unknown ablation '" + std::string(name) + "' (expected full, no-M, no-CL, no-SL)");
}

Var cross_view_similarity(Tape& tape, Var h1, Var h2) { return tape.matmul(h1, h2, false, true); }

Var contrastive_loss_from_similarity(Tape& tape, Var similarity, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive, got " + std::to_string(tau));
  const auto& s = tape.value(similarity);
  if (s.rows() != s.cols()) {
    throw ShapeError("cross-view similarity must be square, got " + shape_string(s));
  }
  // Both directions share the positive logits on the diagonal.
  return tape.symmetric_infonce(similarity, 1.0 / tau);
}

Var cross_view_contrastive_loss(Tape& tape, Var h1, Var h2, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive, got " + std::to_string(tau));
  return contrastive_loss_from_similarity(tape, cross_view_similarity(tape, h1, h2), tau);
}

Var structural_loss_from_similarity(Tape& tape, Var similarity, const SparseMatrix& a_tilde) {
  const auto& s = tape.value(similarity);
  if (s.rows() != a_tilde.rows() || s.cols() != a_tilde.cols()) {
    throw ShapeError("structural loss: similarity " + shape_string(s) + " vs target " +
                     shape_string(a_tilde.rows(), a_tilde.cols()));
  }
  return tape.squared_error_mean(similarity, a_tilde);
}

Var structural_contrastive_loss_blockwise(Tape& tape, Var h1, Var h2, const SparseMatrix& a_tilde) {
  const auto& v1 = tape.value(h1);
  const auto& v2 = tape.value(h2);
  if (v1.rows() != v2.rows() || v1.cols() != v2.cols() || a_tilde.rows() != v1.rows() ||
      a_tilde.cols() != v1.rows()) {
    throw ShapeError("structural loss: embeddings " + shape_string(v1) + " and " + shape_string(v2) +
                     " vs target " + shape_string(a_tilde.rows(), a_tilde.cols()));
  }
  const double n = static_cast<double>(v1.rows());
  // sum_ij S_ij^2 = ||H1 H2^T||_F^2 = <H1^T H1, H2^T H2>_F
  const Var gram1 = tape.matmul(h1, h1, true, false);
  const Var gram2 = tape.matmul(h2, h2, true, false);
  const Var squares = tape.sum(tape.multiply(gram1, gram2));
  // sum over the pattern of A~ of S_ij = sum_i <h1_i, (A~ H2)_i>
  const Var on_pattern = tape.sum(tape.multiply(h1, tape.sparse_matmul(a_tilde, h2)));
  const Var nnz = tape.constant(DenseMatrix::Constant(1, 1, a_tilde.sum()));
  const Var raw = tape.add(tape.subtract(squares, tape.scale(on_pattern, 2.0)), nnz);
  return tape.scale(raw, 1.0 / (n * n));
}

Var structural_contrastive_loss(Tape& tape, Var h1, Var h2, const SparseMatrix& a_tilde,
                                Index dense_cap) {
  if (tape.value(h1).rows() <= dense_cap) {
    return structural_loss_from_similarity(tape, cross_view_similarity(tape, h1, h2), a_tilde);
  }
  return structural_contrastive_loss_blockwise(tape, h1, h2, a_tilde);
}

Var modularity_loss(Tape& tape, Var logits, const ModularityOperator& b) {
  const auto& z = tape.value(logits);
  require_finite(z, "modularity loss logits");
  if (z.rows() != b.size()) {
    throw ShapeError("modularity loss: logits " + shape_string(z) + " for a graph of " +
                     std::to_string(b.size()) + " nodes");
  }
  const Var u = tape.softmax_rows(logits);
  const Var tr = tape.trace_quadratic(u, [&b](const DenseMatrix& x) { return b.apply(x); });
  return tape.scale(tr, 1.0 / b.two_m());
}

double combine_losses(double l_sl, double l_cl, double l_m, const LossWeights& w) {
  double total = 0.0;
  if (w.ablation != Ablation::kNoStructural) total += l_sl;
  if (w.ablation != Ablation::kNoContrastive) total += w.lambda1 * l_cl;
  if (w.ablation != Ablation::kNoModularity) total -= w.lambda2 * l_m;
  return total;
}

Var total_loss(Tape& tape, const LossTerms& terms, const LossWeights& w) {
  if (w.lambda1 < 0.0 || w.lambda2 < 0.0) throw ConfigError("loss weights must be non-negative");
  Var total = tape.constant(DenseMatrix::Zero(1, 1));
  if (w.ablation != Ablation::kNoStructural) total = tape.add(total, terms.l_sl);
  if (w.ablation != Ablation::kNoContrastive) total = tape.add(total, tape.scale(terms.l_cl, w.lambda1));
  if (w.ablation != Ablation::kNoModularity) total = tape.subtract(total, tape.scale(terms.l_m, w.lambda2));
  return total;
}

LossBreakdown breakdown(const Tape& tape, const LossTerms& terms, Var total, const LossWeights& w) {
  return {tape.scalar(terms.l_cl), tape.scalar(terms.l_sl), tape.scalar(terms.l_m), tape.scalar(total),
          w.lambda1, w.lambda2};
}

}  // namespace secl
