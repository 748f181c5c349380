#include "secl/encoders.hpp"

#include <cmath>
#include <random>
#include <string>

#include "secl/error.hpp"

namespace secl {

DenseMatrix smooth_attributes(const SparseMatrix& a_hat, const DenseMatrix& x, int r) {
  if (r < 0) throw ConfigError("filter depth must be non-negative, got " + std::to_string(r));
  if (a_hat.cols() != x.rows()) {
    throw ShapeError("smooth_attributes: operator " + shape_string(a_hat.rows(), a_hat.cols()) +
                     " cannot filter attributes " + shape_string(x));
  }
  DenseMatrix cur = x;
  DenseMatrix next(x.rows(), x.cols());
  for (int step = 0; step < r; ++step) {
    next.noalias() = a_hat * cur;
    cur.swap(next);
  }
  return cur;
}

DenseMatrix smooth_attributes(const Graph& g, int r) {
  return smooth_attributes(normalized_adjacency(g), g.attributes, r);
}

Index EncoderShape::latent_width() const {
  return attribute_widths.empty() ? 0 : attribute_widths.back();
}

void EncoderShape::validate() const {
  if (num_nodes <= 0) throw ConfigError("encoder needs at least one node");
  if (num_attributes <= 0) throw ConfigError("encoder needs at least one attribute column");
  if (structure_widths.empty() || attribute_widths.empty()) {
    throw ConfigError("both encoders need at least one layer");
  }
  for (Index w : structure_widths) {
    if (w <= 0) throw ConfigError("structure encoder layer width must be positive");
  }
  for (Index w : attribute_widths) {
    if (w <= 0) throw ConfigError("attribute encoder layer width must be positive");
  }
  if (structure_widths.back() != attribute_widths.back()) {
    throw ConfigError("encoders must share the latent width: structure ends at " +
                      std::to_string(structure_widths.back()) + ", attribute at " +
                      std::to_string(attribute_widths.back()));
  }
  if (clusters <= 0) throw ConfigError("cluster count must be positive");
}

namespace {

template <typename Params, typename Ptr>
void collect_tensors(Params& p, std::vector<Ptr>& out) {
  for (auto& l : p.structure_layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  for (auto& l : p.attribute_layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  out.push_back(&p.modularity_head);
}

}  // namespace

std::vector<DenseMatrix*> EncoderParams::tensors() {
  std::vector<DenseMatrix*> out;
  collect_tensors(*this, out);
  return out;
}

std::vector<const DenseMatrix*> EncoderParams::tensors() const {
  std::vector<const DenseMatrix*> out;
  collect_tensors(*this, out);
  return out;
}

std::size_t EncoderParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

namespace {

DenseMatrix uniform_matrix(Index rows, Index cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  DenseMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

std::vector<DenseLayer> init_mlp(Index fan_in, const std::vector<Index>& widths, std::mt19937_64& rng) {
  std::vector<DenseLayer> layers;
  for (Index w : widths) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layers.push_back({uniform_matrix(fan_in, w, bound, rng), DenseMatrix::Zero(1, w)});
    fan_in = w;
  }
  return layers;
}

Var activate(Tape& tape, Var x, Activation a) {
  return a == Activation::kTanh ? tape.tanh(x) : x;
}

}  // namespace

EncoderParams init_params(const EncoderShape& shape, std::uint64_t seed) {
  shape.validate();
  std::mt19937_64 rng(seed);
  EncoderParams p;
  p.hidden_activation = shape.hidden_activation;
  p.structure_layers = init_mlp(shape.num_nodes, shape.structure_widths, rng);
  p.attribute_layers = init_mlp(shape.num_attributes, shape.attribute_widths, rng);
  const Index d = shape.latent_width();
  p.modularity_head = uniform_matrix(d, shape.clusters, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  return p;
}

std::vector<Var> BoundParams::all() const {
  std::vector<Var> out;
  for (auto [w, b] : structure) {
    out.push_back(w);
    out.push_back(b);
  }
  for (auto [w, b] : attribute) {
    out.push_back(w);
    out.push_back(b);
  }
  out.push_back(head);
  return out;
}

BoundParams bind(Tape& tape, const EncoderParams& params) {
  BoundParams b;
  b.hidden_activation = params.hidden_activation;
  for (const auto& l : params.structure_layers) {
    b.structure.emplace_back(tape.parameter(l.weight), tape.parameter(l.bias));
  }
  for (const auto& l : params.attribute_layers) {
    b.attribute.emplace_back(tape.parameter(l.weight), tape.parameter(l.bias));
  }
  b.head = tape.parameter(params.modularity_head);
  return b;
}

EmbeddingVars encode(Tape& tape, const BoundParams& params, const SparseMatrix& adjacency,
                     Var x_hat) {
  if (params.structure.empty() || params.attribute.empty()) {
    throw ConfigError("encode: both encoders need at least one layer");
  }
  const auto& w0 = tape.value(params.structure.front().first);
  if (adjacency.cols() != w0.rows()) {
    throw ShapeError("encode: structure encoder expects input width " + std::to_string(w0.rows()) +
                     " but the adjacency is " + shape_string(adjacency.rows(), adjacency.cols()));
  }

  Var h = tape.add(tape.sparse_matmul(adjacency, params.structure.front().first),
                   params.structure.front().second);
  for (std::size_t k = 1; k < params.structure.size(); ++k) {
    h = activate(tape, h, params.hidden_activation);
    h = tape.add(tape.matmul(h, params.structure[k].first), params.structure[k].second);
  }
  const Var h1 = tape.row_l2_normalize(h);

  Var z = x_hat;
  for (std::size_t k = 0; k < params.attribute.size(); ++k) {
    if (k > 0) z = activate(tape, z, params.hidden_activation);
    z = tape.add(tape.matmul(z, params.attribute[k].first), params.attribute[k].second);
  }
  const Var h2 = tape.row_l2_normalize(z);
  return {h1, h2};
}

Var assignment_logits(Tape& tape, const BoundParams& params, Var h2) {
  return tape.matmul(h2, params.head);
}

Embeddings compute_embeddings(const EncoderParams& params, const SparseMatrix& adjacency,
                              const DenseMatrix& x_hat) {
  Tape tape;
  const BoundParams bound = bind(tape, params);
  const EmbeddingVars e = encode(tape, bound, adjacency, tape.constant(x_hat));
  return {tape.value(e.h1), tape.value(e.h2)};
}

}  // namespace secl
