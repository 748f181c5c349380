#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "secl/error.hpp"
#include "secl/losses.hpp"
#include "secl/metrics.hpp"
#include "test_graphs.hpp"

namespace secl {
namespace {

using testing::random_matrix;

DenseMatrix unit_rows(DenseMatrix m) {
  m.rowwise().normalize();
  return m;
}

double contrastive(const DenseMatrix& h1, const DenseMatrix& h2, double tau) {
  Tape tape;
  return tape.scalar(cross_view_contrastive_loss(tape, tape.constant(h1), tape.constant(h2), tau));
}

double contrastive_from(const DenseMatrix& s, double tau) {
  Tape tape;
  return tape.scalar(contrastive_loss_from_similarity(tape, tape.constant(s), tau));
}

double structural(const DenseMatrix& h1, const DenseMatrix& h2, const SparseMatrix& a_tilde, Index cap) {
  Tape tape;
  return tape.scalar(structural_contrastive_loss(tape, tape.constant(h1), tape.constant(h2), a_tilde, cap));
}

double modularity(const DenseMatrix& logits, const ModularityOperator& b) {
  Tape tape;
  return tape.scalar(modularity_loss(tape, tape.constant(logits), b));
}

// Literal per-term InfoNCE, positive kept in the denominator.
double naive_contrastive(const DenseMatrix& h1, const DenseMatrix& h2, double tau) {
  const Index n = h1.rows();
  double total = 0.0;
  for (int dir = 0; dir < 2; ++dir) {
    const DenseMatrix& p = dir == 0 ? h1 : h2;
    const DenseMatrix& q = dir == 0 ? h2 : h1;
    for (Index i = 0; i < n; ++i) {
      double denom = 0.0;
      for (Index k = 0; k < n; ++k) denom += std::exp(p.row(i).dot(q.row(k)) / tau);
      total -= std::log(std::exp(p.row(i).dot(q.row(i)) / tau) / denom);
    }
  }
  return total / (2.0 * static_cast<double>(n));
}

TEST(ContrastiveLoss, SingleNodeIsZero) {
  EXPECT_EQ(contrastive(DenseMatrix::Ones(1, 1), DenseMatrix::Ones(1, 1), 0.5), 0.0);
}

TEST(ContrastiveLoss, TwoNodeHandValue) {
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  EXPECT_NEAR(contrastive(id, id, 1.0), std::log(1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(contrastive(id, id, 1.0), 0.313262, 1e-6);
}

TEST(ContrastiveLoss, MatchesLiteralSumAndIsSymmetric) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix h1 = unit_rows(random_matrix(9, 4, rng));
    const DenseMatrix h2 = unit_rows(random_matrix(9, 4, rng));
    const double tau = 0.1 + 0.1 * trial;
    const double l = contrastive(h1, h2, tau);
    EXPECT_NEAR(l, naive_contrastive(h1, h2, tau), 1e-12);
    EXPECT_NEAR(l, contrastive(h2, h1, tau), 1e-12);
    EXPECT_GE(l, 0.0);
  }
}

TEST(ContrastiveLoss, TemperatureScaling) {
  std::mt19937_64 rng(2);
  const DenseMatrix s = random_matrix(6, 6, rng);
  for (double c : {0.1, 0.5, 2.0, 7.0}) {
    EXPECT_NEAR(contrastive_from(s, c), contrastive_from(s / c, 1.0), 1e-12);
  }
}

TEST(ContrastiveLoss, StrictlyDecreasesWithDiagonal) {
  std::mt19937_64 rng(3);
  DenseMatrix s = random_matrix(4, 4, rng);
  double prev = contrastive_from(s, 1.0);
  for (int step = 0; step < 10; ++step) {
    s.diagonal().array() += 0.5;
    const double next = contrastive_from(s, 1.0);
    EXPECT_LT(next, prev);
    EXPECT_GE(next, 0.0);
    prev = next;
  }
}

TEST(ContrastiveLoss, RejectsNonPositiveTemperature) {
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  EXPECT_THROW(contrastive(id, id, 0.0), ConfigError);
  EXPECT_THROW(contrastive(id, id, -1.0), ConfigError);
  EXPECT_THROW(contrastive_from(DenseMatrix::Ones(2, 3), 1.0), ShapeError);
}

TEST(ContrastiveLoss, LargeSimilaritiesStayFinite) {
  DenseMatrix s(2, 2);
  s << 1, -1, -1, 1;
  EXPECT_TRUE(std::isfinite(contrastive_from(s, 1e-4)));
}

TEST(StructuralLoss, HandValues) {
  SparseMatrix one(1, 1);
  one.insert(0, 0) = 1.0;
  EXPECT_EQ(structural(DenseMatrix::Ones(1, 1), DenseMatrix::Ones(1, 1), one, 4096), 0.0);

  const Graph edgeless = make_graph(2, {}, DenseMatrix::Zero(2, 1));
  const SparseMatrix a_tilde = self_looped_adjacency(edgeless);
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  EXPECT_EQ(structural(id, id, a_tilde, 4096), 0.0);

  DenseMatrix same(2, 2);
  same << 1, 0, 1, 0;
  EXPECT_NEAR(structural(same, same, a_tilde, 4096), 0.5, 1e-15);
  EXPECT_NEAR(structural(same, same, a_tilde, 0), 0.5, 1e-15);
}

TEST(StructuralLoss, BlockwiseMatchesDense) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> size(1, 200);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = size(rng);
    const Graph g = testing::random_graph(n, 0.05, 1, rng);
    const SparseMatrix a_tilde = self_looped_adjacency(g);
    const DenseMatrix h1 = unit_rows(random_matrix(n, 6, rng));
    const DenseMatrix h2 = unit_rows(random_matrix(n, 6, rng));
    const DenseMatrix s = h1 * h2.transpose();
    const double oracle = (s - to_dense(a_tilde)).array().square().sum() / static_cast<double>(n * n);
    EXPECT_NEAR(structural(h1, h2, a_tilde, 0), oracle, 1e-9);
    EXPECT_NEAR(structural(h1, h2, a_tilde, 4096), oracle, 1e-12);
  }
}

TEST(ModularityLoss, DegenerateAssignments) {
  std::mt19937_64 rng(5);
  const Graph g = testing::random_graph(12, 0.3, 1, rng);
  const ModularityOperator b(g);
  EXPECT_NEAR(modularity(DenseMatrix::Constant(12, 4, 0.3), b), 0.0, 1e-15);
  EXPECT_NEAR(modularity(random_matrix(12, 1, rng), b), 0.0, 1e-15);
}

TEST(ModularityLoss, TwoTrianglesHardAssignment) {
  const Graph g = testing::two_triangles();
  DenseMatrix logits(6, 2);
  for (Index i = 0; i < 6; ++i) {
    logits(i, 0) = i < 3 ? 1e4 : -1e4;
    logits(i, 1) = -logits(i, 0);
  }
  EXPECT_NEAR(modularity(logits, ModularityOperator(g)), 0.5, 1e-12);
  EXPECT_NEAR(modularity(logits, ModularityOperator(g, 0)), 0.5, 1e-12);
}

TEST(ModularityLoss, MatrixFreeMatchesDenseTrace) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(2, 200);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = size(rng);
    const Graph g = testing::random_graph(n, 0.05, 1, rng);
    const DenseMatrix logits = random_matrix(n, 5, rng, 2.0);
    DenseMatrix u = (logits.colwise() - logits.rowwise().maxCoeff()).array().exp();
    u.array().colwise() /= u.rowwise().sum().array();
    const DenseMatrix b = modularity_matrix(g);
    const double oracle = (u.transpose() * b * u).trace() / (2.0 * static_cast<double>(g.num_edges()));
    EXPECT_NEAR(modularity(logits, ModularityOperator(g, 0)), oracle, 1e-10);
    EXPECT_NEAR(modularity(logits, ModularityOperator(g)), oracle, 1e-10);
  }
}

TEST(ModularityLoss, OneHotEqualsModularityScore) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> cluster(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = testing::random_graph(20, 0.2, 1, rng);
    std::vector<int> labels(20);
    DenseMatrix logits = DenseMatrix::Constant(20, 4, -1e4);
    for (Index i = 0; i < 20; ++i) {
      labels[static_cast<std::size_t>(i)] = cluster(rng);
      logits(i, labels[static_cast<std::size_t>(i)]) = 1e4;
    }
    EXPECT_NEAR(modularity(logits, ModularityOperator(g)), modularity_score(labels, g), 1e-10);
  }
}

TEST(ModularityLoss, Errors) {
  const ModularityOperator b(testing::triangle());
  DenseMatrix bad = DenseMatrix::Zero(3, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(modularity(bad, b), NumericError);
  EXPECT_THROW(modularity(DenseMatrix::Zero(4, 2), b), ShapeError);
}

TEST(TotalLoss, Arithmetic) {
  EXPECT_NEAR(combine_losses(1.0, 2.0, 3.0, {0.1, 0.01, Ablation::kFull}), 1.17, 1e-15);
  EXPECT_EQ(combine_losses(1.0, 2.0, 3.0, {0.0, 0.0, Ablation::kFull}), 1.0);
  EXPECT_NEAR(combine_losses(1.0, 2.0, 3.0, {0.1, 0.01, Ablation::kNoModularity}), 1.2, 1e-15);
  EXPECT_NEAR(combine_losses(1.0, 2.0, 99.0, {0.1, 0.01, Ablation::kNoModularity}), 1.2, 1e-15);
  EXPECT_NEAR(combine_losses(1.0, 2.0, 3.0, {0.1, 0.01, Ablation::kNoContrastive}), 0.97, 1e-15);
  EXPECT_NEAR(combine_losses(1.0, 2.0, 3.0, {0.1, 0.01, Ablation::kNoStructural}), 0.17, 1e-15);
}

TEST(TotalLoss, TapedMatchesScalarAndBreakdown) {
  for (Ablation a : {Ablation::kFull, Ablation::kNoModularity, Ablation::kNoContrastive, Ablation::kNoStructural}) {
    Tape tape;
    const LossTerms terms{tape.constant(DenseMatrix::Constant(1, 1, 2.0)), tape.constant(DenseMatrix::Constant(1, 1, 1.0)),
                          tape.constant(DenseMatrix::Constant(1, 1, 3.0))};
    const LossWeights w{0.1, 0.01, a};
    const Var total = total_loss(tape, terms, w);
    const LossBreakdown b = breakdown(tape, terms, total, w);
    EXPECT_EQ(b.total, combine_losses(1.0, 2.0, 3.0, w));
    EXPECT_EQ(b.l_cl, 2.0);
    EXPECT_EQ(b.l_sl, 1.0);
    EXPECT_EQ(b.l_m, 3.0);
    EXPECT_EQ(b.lambda1, 0.1);
  }
  Tape tape;
  const Var z = tape.constant(DenseMatrix::Zero(1, 1));
  EXPECT_THROW(total_loss(tape, {z, z, z}, {-0.1, 0.0, Ablation::kFull}), ConfigError);
}

TEST(TotalLoss, NoModularityLeavesHeadGradientZero) {
  std::mt19937_64 rng(8);
  const Graph g = testing::random_graph(10, 0.3, 1, rng);
  const ModularityOperator op(g);
  Tape tape;
  const Var h = tape.parameter(unit_rows(random_matrix(10, 3, rng)));
  const Var w = tape.parameter(random_matrix(3, 2, rng));
  const LossTerms terms{cross_view_contrastive_loss(tape, h, h, 0.5), tape.constant(DenseMatrix::Zero(1, 1)),
                        modularity_loss(tape, tape.matmul(h, w), op)};
  tape.backward(total_loss(tape, terms, {0.1, 1.0, Ablation::kNoModularity}));
  EXPECT_EQ(tape.grad(w), DenseMatrix::Zero(3, 2));
}

TEST(Ablation, Names) {
  EXPECT_EQ(parse_ablation("no-M"), Ablation::kNoModularity);
  EXPECT_EQ(parse_ablation("NO-cl"), Ablation::kNoContrastive);
  EXPECT_EQ(parse_ablation("no-sl"), Ablation::kNoStructural);
  EXPECT_EQ(parse_ablation("full"), Ablation::kFull);
  EXPECT_THROW(parse_ablation("none"), ConfigError);
  for (Ablation a : {Ablation::kFull, Ablation::kNoModularity, Ablation::kNoContrastive, Ablation::kNoStructural}) {
    EXPECT_EQ(parse_ablation(ablation_name(a)), a);
  }
}

TEST(Similarity, UnitRowsBounded) {
  std::mt19937_64 rng(9);
  Tape tape;
  const DenseMatrix s = tape.value(cross_view_similarity(tape, tape.constant(unit_rows(random_matrix(30, 5, rng))),
                                                         tape.constant(unit_rows(random_matrix(30, 5, rng)))));
  EXPECT_LE(s.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
}

}  // namespace
}  // namespace secl
