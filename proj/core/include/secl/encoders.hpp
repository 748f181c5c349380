#pragma once

#include <cstdint>
#include <vector>

#include "secl/graph.hpp"
#include "secl/matrix.hpp"
#include "secl/tape.hpp"

namespace secl {

// X_hat = A_hat^r X by r sparse-dense products. r = 0 returns X unchanged.
DenseMatrix smooth_attributes(const SparseMatrix& a_hat, const DenseMatrix& x, int r);
DenseMatrix smooth_attributes(const Graph& g, int r);

enum class Activation { kIdentity, kTanh };

struct DenseLayer {
  DenseMatrix weight;  // fan_in x fan_out
  DenseMatrix bias;    // 1 x fan_out
};

// Widths of both encoders and the modularity head. The last entry of each
// width list is the shared latent width d'.
struct EncoderShape {
  Index num_nodes = 0;       // structure encoder input width
  Index num_attributes = 0;  // attribute encoder input width
  std::vector<Index> structure_widths{500};
  std::vector<Index> attribute_widths{500};
  Index clusters = 0;
  // Applied between layers; the last layer is always affine.
  Activation hidden_activation = Activation::kTanh;

  Index latent_width() const;
  // Throws ConfigError on zero widths, empty width lists or mismatched
  // latent widths.
  void validate() const;
};

struct EncoderParams {
  std::vector<DenseLayer> structure_layers;
  std::vector<DenseLayer> attribute_layers;
  DenseMatrix modularity_head;  // d' x C, no bias
  Activation hidden_activation = Activation::kTanh;

  // Stable ordering of every trainable tensor: structure (W, b)*, attribute
  // (W, b)*, head.
  std::vector<DenseMatrix*> tensors();
  std::vector<const DenseMatrix*> tensors() const;
  std::size_t parameter_count() const;
};

// Weights ~ U[-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero. Deterministic in
// the seed.
EncoderParams init_params(const EncoderShape& shape, std::uint64_t seed);

// Parameter leaves on a tape, in EncoderParams::tensors() order.
struct BoundParams {
  std::vector<std::pair<Var, Var>> structure;
  std::vector<std::pair<Var, Var>> attribute;
  Var head;
  Activation hidden_activation = Activation::kTanh;

  std::vector<Var> all() const;
};

BoundParams bind(Tape& tape, const EncoderParams& params);

struct EmbeddingVars {
  Var h1;  // structure view, unit rows
  Var h2;  // attribute view, unit rows
};

// h1 = normalize(MLP1(A)), h2 = normalize(MLP2(X_hat)). The first structure
// layer multiplies the sparse adjacency directly, so A is never densified.
EmbeddingVars encode(Tape& tape, const BoundParams& params, const SparseMatrix& adjacency,
                     Var x_hat);

// H2 W. Softmax is left to the modularity loss.
Var assignment_logits(Tape& tape, const BoundParams& params, Var h2);

struct Embeddings {
  DenseMatrix h1;
  DenseMatrix h2;
};

// Forward pass only, for evaluation after training.
Embeddings compute_embeddings(const EncoderParams& params, const SparseMatrix& adjacency,
                              const DenseMatrix& x_hat);

}  // namespace secl
