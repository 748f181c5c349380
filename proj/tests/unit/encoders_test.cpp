#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "secl/encoders.hpp"
#include "secl/error.hpp"
#include "test_graphs.hpp"

namespace secl {
namespace {

using testing::random_matrix;

EncoderShape small_shape(Index n, Index d, std::vector<Index> widths, Index clusters) {
  EncoderShape s;
  s.num_nodes = n;
  s.num_attributes = d;
  s.structure_widths = widths;
  s.attribute_widths = widths;
  s.clusters = clusters;
  return s;
}

double max_row_norm_error(const DenseMatrix& h) {
  return (h.rowwise().norm().array() - 1.0).abs().maxCoeff();
}

TEST(Smoothing, DepthZeroIsIdentity) {
  std::mt19937_64 rng(1);
  const Graph g = testing::random_graph(10, 0.3, 4, rng);
  EXPECT_EQ(smooth_attributes(g, 0), g.attributes);
  EXPECT_THROW(smooth_attributes(g, -1), ConfigError);
}

TEST(Smoothing, TwoNodeHandValue) {
  EXPECT_TRUE(smooth_attributes(testing::two_node_graph(), 1).isApprox(DenseMatrix::Constant(2, 2, 0.5)));
}

TEST(Smoothing, MatchesDensePower) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> size(1, 50);
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::random_graph(size(rng), 0.2, 3, rng);
    const DenseMatrix a_hat = testing::dense_normalized_adjacency(g);
    DenseMatrix expect = g.attributes;
    for (int r = 0; r <= 5; ++r) {
      EXPECT_LE((smooth_attributes(g, r) - expect).cwiseAbs().maxCoeff(), 1e-10);
      expect = a_hat * expect;
    }
  }
}

TEST(Smoothing, Composes) {
  std::mt19937_64 rng(3);
  const Graph g = testing::random_graph(30, 0.15, 5, rng);
  const SparseMatrix a_hat = normalized_adjacency(g);
  const DenseMatrix once = smooth_attributes(a_hat, smooth_attributes(a_hat, g.attributes, 1), 2);
  EXPECT_LE((once - smooth_attributes(g, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(InitParams, ShapesBoundsAndDeterminism) {
  const EncoderShape s = small_shape(2708, 1433, {500}, 7);
  const EncoderParams p = init_params(s, 4);
  ASSERT_EQ(p.attribute_layers.size(), 1u);
  EXPECT_EQ(p.attribute_layers[0].weight.rows(), 1433);
  EXPECT_EQ(p.attribute_layers[0].weight.cols(), 500);
  EXPECT_EQ(p.attribute_layers[0].bias.cols(), 500);
  EXPECT_EQ(p.attribute_layers[0].bias, DenseMatrix::Zero(1, 500));
  EXPECT_EQ(p.structure_layers[0].weight.rows(), 2708);
  EXPECT_EQ(p.modularity_head.rows(), 500);
  EXPECT_EQ(p.modularity_head.cols(), 7);

  const EncoderParams q = init_params(s, 4);
  const auto pt = p.tensors();
  const auto qt = q.tensors();
  ASSERT_EQ(pt.size(), qt.size());
  for (std::size_t k = 0; k < pt.size(); ++k) EXPECT_EQ(*pt[k], *qt[k]);
  EXPECT_NE(init_params(s, 5).attribute_layers[0].weight, p.attribute_layers[0].weight);
}

TEST(InitParams, UniformSupport) {
  const EncoderParams p = init_params(small_shape(1000, 1000, {500}, 3), 7);
  const double bound = 1.0 / std::sqrt(1000.0);
  EXPECT_LE(p.structure_layers[0].weight.cwiseAbs().maxCoeff(), bound);
  EXPECT_LE(p.attribute_layers[0].weight.cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(p.attribute_layers[0].weight.cwiseAbs().maxCoeff(), 0.99 * bound);
}

TEST(InitParams, RejectsBadShapes) {
  EXPECT_THROW(init_params(small_shape(5, 3, {0}, 2), 1), ConfigError);
  EXPECT_THROW(init_params(small_shape(5, 3, {}, 2), 1), ConfigError);
  EncoderShape mismatch = small_shape(5, 3, {4}, 2);
  mismatch.attribute_widths = {6, 3};
  EXPECT_THROW(init_params(mismatch, 1), ConfigError);
  EXPECT_THROW(init_params(small_shape(5, 3, {4}, 0), 1), ConfigError);
}

TEST(InitParams, TwoLayerTensorOrder) {
  const EncoderParams p = init_params(small_shape(6, 4, {8, 3}, 2), 1);
  const auto t = p.tensors();
  ASSERT_EQ(t.size(), 9u);
  EXPECT_EQ(t[0]->rows(), 6);
  EXPECT_EQ(t[2]->rows(), 8);
  EXPECT_EQ(t[4]->rows(), 4);
  EXPECT_EQ(t[8]->cols(), 2);
  EXPECT_EQ(p.parameter_count(), static_cast<std::size_t>(6 * 8 + 8 + 8 * 3 + 3 + 4 * 8 + 8 + 8 * 3 + 3 + 3 * 2));
}

TEST(Encode, UnitRowsForRandomInputs) {
  std::mt19937_64 rng(4);
  for (const std::vector<Index>& widths : {std::vector<Index>{6}, std::vector<Index>{9, 6}}) {
    const Graph g = testing::random_graph(25, 0.2, 7, rng);
    const EncoderParams p = init_params(small_shape(25, 7, widths, 3), 11);
    const Embeddings e = compute_embeddings(p, adjacency(g), smooth_attributes(g, 2));
    EXPECT_EQ(e.h1.rows(), 25);
    EXPECT_EQ(e.h2.cols(), 6);
    EXPECT_LE(max_row_norm_error(e.h1), 1e-9);
    EXPECT_LE(max_row_norm_error(e.h2), 1e-9);
  }
}

TEST(Encode, IdentityPassthrough) {
  // One-hot inputs through identity weights stay one-hot.
  const Index n = 4;
  EncoderParams p = init_params(small_shape(n, n, {n}, 2), 1);
  p.structure_layers[0].weight = DenseMatrix::Identity(n, n);
  p.attribute_layers[0].weight = DenseMatrix::Identity(n, n);
  const Graph g = make_graph(n, {}, DenseMatrix::Identity(n, n));
  const Embeddings e = compute_embeddings(p, self_looped_adjacency(g), g.attributes);
  EXPECT_LE((e.h1 - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((e.h2 - DenseMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Encode, ShapeMismatch) {
  std::mt19937_64 rng(5);
  const Graph g = testing::random_graph(10, 0.3, 4, rng);
  const EncoderParams p = init_params(small_shape(11, 4, {3}, 2), 1);
  EXPECT_THROW(compute_embeddings(p, adjacency(g), g.attributes), ShapeError);
  const EncoderParams q = init_params(small_shape(10, 5, {3}, 2), 1);
  EXPECT_THROW(compute_embeddings(q, adjacency(g), g.attributes), ShapeError);
}

TEST(Encode, PermutationEquivariant) {
  std::mt19937_64 rng(6);
  const Index n = 15;
  const Graph g = testing::random_graph(n, 0.25, 4, rng);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  // Node i of g becomes node perm[i] of h.
  std::vector<Edge> edges;
  for (auto [i, j] : g.edges) edges.emplace_back(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  DenseMatrix x(n, g.num_attributes());
  for (Index i = 0; i < n; ++i) x.row(perm[static_cast<std::size_t>(i)]) = g.attributes.row(i);
  const Graph h = make_graph(n, edges, x);

  const EncoderParams p = init_params(small_shape(n, 4, {5, 3}, 2), 2);
  EncoderParams q = p;
  // The structure encoder reads columns of A, so its first weight's rows
  // follow the node relabeling.
  for (Index i = 0; i < n; ++i) {
    q.structure_layers[0].weight.row(perm[static_cast<std::size_t>(i)]) = p.structure_layers[0].weight.row(i);
  }
  const Embeddings eg = compute_embeddings(p, adjacency(g), smooth_attributes(g, 2));
  const Embeddings eh = compute_embeddings(q, adjacency(h), smooth_attributes(h, 2));
  for (Index i = 0; i < n; ++i) {
    const Index k = perm[static_cast<std::size_t>(i)];
    EXPECT_LE((eg.h2.row(i) - eh.h2.row(k)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((eg.h1.row(i) - eh.h1.row(k)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(AssignmentLogits, Cases) {
  Tape tape;
  BoundParams b;
  b.head = tape.parameter(DenseMatrix::Zero(3, 4));
  std::mt19937_64 rng(7);
  const Var h2 = tape.constant(random_matrix(5, 3, rng));
  EXPECT_EQ(tape.value(assignment_logits(tape, b, h2)), DenseMatrix::Zero(5, 4));

  Tape t2;
  BoundParams c;
  c.head = t2.parameter(DenseMatrix::Identity(2, 2));
  DenseMatrix row(1, 2);
  row << 1, 0;
  EXPECT_EQ(t2.value(assignment_logits(t2, c, t2.constant(row))), row);
  EXPECT_THROW(assignment_logits(t2, c, t2.constant(DenseMatrix::Ones(2, 3))), ShapeError);
}

TEST(AssignmentLogits, CoraShape) {
  Tape tape;
  BoundParams b;
  b.head = tape.parameter(DenseMatrix::Zero(500, 7));
  EXPECT_EQ(tape.value(assignment_logits(tape, b, tape.constant(DenseMatrix::Zero(2708, 500)))).rows(), 2708);
}

}  // namespace
}  // namespace secl
