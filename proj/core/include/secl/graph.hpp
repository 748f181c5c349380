#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "secl/matrix.hpp"

namespace secl {

using Edge = std::pair<Index, Index>;

// Undirected, unweighted attributed graph.
//
// Invariants (enforced by make_graph / load_graph):
//   * every edge (i, j) has i < j, both endpoints in [0, num_nodes)
//   * edges are sorted and unique, so the implied adjacency is symmetric
//     with a zero diagonal
//   * attributes has num_nodes rows; labels, when present, has num_nodes
//     entries in [0, num_classes())
struct Graph {
  Index num_nodes = 0;
  std::vector<Edge> edges;
  DenseMatrix attributes;
  std::optional<std::vector<int>> labels;
  // Number of edge records read from disk before symmetrization and
  // de-duplication. Equals edges.size() for graphs built in memory.
  std::size_t raw_edge_records = 0;

  Index num_edges() const { return static_cast<Index>(edges.size()); }
  Index num_attributes() const { return attributes.cols(); }
  int num_classes() const;
};

// Builds a Graph from arbitrary-orientation edge records. Each record (i, j)
// contributes the undirected edge {i, j}; duplicates collapse. Throws
// IndexError for out-of-range endpoints, ContractError for self-loops and
// ShapeError when attribute/label lengths disagree with num_nodes.
Graph make_graph(Index num_nodes, const std::vector<Edge>& edge_records, DenseMatrix attributes,
                 std::optional<std::vector<int>> labels = std::nullopt);

// Reads the on-disk formats:
//   edges      - "i j" per line, 0-based ids, '#' comments and blank lines ok
//   attributes - text: N lines of d floats with an optional "N d" header;
//                files ending in ".bin" use the binary matrix format
//   labels     - one integer class id per line
// The node count is taken from the attribute matrix.
Graph load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& attr_path,
                 const std::optional<std::filesystem::path>& label_path = std::nullopt);

// Writes the text formats (attributes with a header line, or binary when the
// path ends in ".bin"). Round-trips through load_graph. Doubles are written
// with max_digits10 precision.
void write_graph(const Graph& g, const std::filesystem::path& edge_path,
                 const std::filesystem::path& attr_path,
                 const std::optional<std::filesystem::path>& label_path = std::nullopt);

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);

// k_i: neighbor count of node i in A (self-loops never contribute).
Eigen::VectorXd degree_vector(const Graph& g);

// A as a symmetric sparse matrix.
SparseMatrix adjacency(const Graph& g);

// A + I.
SparseMatrix self_looped_adjacency(const Graph& g);

// D~^{-1/2} (A + I) D~^{-1/2}. Every node has a self-loop so the degree
// inverse is always defined.
SparseMatrix normalized_adjacency(const Graph& g);

// Dense B with B_ij = A_ij - k_i k_j / 2m. Throws DegenerateGraphError when
// the graph has no edges.
DenseMatrix modularity_matrix(const Graph& g);

// The modularity matrix held either densely or factored as (A, k, 2m).
// apply() computes B * U; the factored path costs O(m C + N C).
class ModularityOperator {
 public:
  static constexpr Index kDefaultDenseCap = 10000;

  // Materializes B when num_nodes <= dense_cap. Throws DegenerateGraphError
  // when the graph has no edges.
  explicit ModularityOperator(const Graph& g, Index dense_cap = kDefaultDenseCap);

  DenseMatrix apply(const DenseMatrix& u) const;
  DenseMatrix materialize() const;

  bool is_dense() const { return dense_.has_value(); }
  Index size() const { return adjacency_.rows(); }
  double two_m() const { return two_m_; }
  const SparseMatrix& adjacency() const { return adjacency_; }
  const Eigen::VectorXd& degrees() const { return degrees_; }

 private:
  SparseMatrix adjacency_;
  Eigen::VectorXd degrees_;
  double two_m_ = 0.0;
  std::optional<DenseMatrix> dense_;
};

// Every graph-derived constant of training, computed once per graph.
struct GraphOperators {
  SparseMatrix a;        // A
  SparseMatrix a_tilde;  // A + I
  SparseMatrix a_hat;    // normalized A + I
  Eigen::VectorXd degrees;
  std::optional<ModularityOperator> modularity;  // absent for edgeless graphs

  static GraphOperators build(const Graph& g, Index modularity_dense_cap =
                                                  ModularityOperator::kDefaultDenseCap);
};

}  // namespace secl
