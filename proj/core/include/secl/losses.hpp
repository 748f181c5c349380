#pragma once

#include <string>
#include <string_view>

#include "secl/graph.hpp"
#include "secl/matrix.hpp"
#include "secl/tape.hpp"

namespace secl {

// Which terms of the objective are active.
enum class Ablation {
  kFull,            // L_SL + l1 L_CL - l2 L_M
  kNoModularity,    // L_SL + l1 L_CL
  kNoContrastive,   // L_SL - l2 L_M
  kNoStructural,    // l1 L_CL - l2 L_M
};

std::string_view ablation_name(Ablation a);
// Accepts "full", "no-M", "no-CL", "no-SL" (case-insensitive). Throws
// ConfigError otherwise.
Ablation parse_ablation(std::string_view name);

// N x N cross-view similarity H1 H2^T, untempered.
Var cross_view_similarity(Tape& tape, Var h1, Var h2);

// Symmetric InfoNCE over cross-view pairs only:
//   L_CL = 1/2N sum_i [lse_k(S_ik/t) - S_ii/t] + [lse_k(S_ki/t) - S_ii/t]
// with S = H1 H2^T. The positive pair stays in the denominator. Throws
// ConfigError for t <= 0.
Var cross_view_contrastive_loss(Tape& tape, Var h1, Var h2, double tau);
Var contrastive_loss_from_similarity(Tape& tape, Var similarity, double tau);

// Default node count above which L_SL switches to the Gram decomposition.
inline constexpr Index kSimilarityDenseCap = 4096;

// L_SL = 1/N^2 sum_ij (S_ij - A~_ij)^2 with binary A + I as the target.
// Uses the dense similarity when N <= dense_cap and the blockwise form
// otherwise.
Var structural_contrastive_loss(Tape& tape, Var h1, Var h2, const SparseMatrix& a_tilde,
                                Index dense_cap = kSimilarityDenseCap);
// Literal dense evaluation from a precomputed similarity node.
Var structural_loss_from_similarity(Tape& tape, Var similarity, const SparseMatrix& a_tilde);
// 1/N^2 [<H1^T H1, H2^T H2>_F - 2 sum(H1 . (A~ H2)) + nnz(A~)]; never forms
// an N x N matrix.
Var structural_contrastive_loss_blockwise(Tape& tape, Var h1, Var h2, const SparseMatrix& a_tilde);

// L_M = 1/2m Tr(U~^T B U~) with U~ = softmax_rows(logits). Throws
// NumericError for non-finite logits.
Var modularity_loss(Tape& tape, Var logits, const ModularityOperator& b);

struct LossWeights {
  double lambda1 = 0.1;
  double lambda2 = 0.01;
  Ablation ablation = Ablation::kFull;
};

struct LossBreakdown {
  double l_cl = 0.0;
  double l_sl = 0.0;
  double l_m = 0.0;
  double total = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Scalar combination of the three terms under the ablation switches.
double combine_losses(double l_sl, double l_cl, double l_m, const LossWeights& w);

struct LossTerms {
  Var l_cl;
  Var l_sl;
  Var l_m;
};

// Records the weighted total on the tape. Terms switched off by the ablation
// do not reach the returned node, so they contribute no gradient.
Var total_loss(Tape& tape, const LossTerms& terms, const LossWeights& w);

LossBreakdown breakdown(const Tape& tape, const LossTerms& terms, Var total, const LossWeights& w);

}  // namespace secl
