#include "secl/synthetic.hpp"

#include <random>

#include "secl/error.hpp"

namespace secl {

Graph make_planted_partition(const PlantedPartitionSpec& spec) {
  if (spec.nodes < 1 || spec.classes < 1 || spec.attributes < 1) {
    throw ConfigError("planted partition needs positive nodes, classes and attributes");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<int> labels(static_cast<std::size_t>(spec.nodes));
  for (Index i = 0; i < spec.nodes; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % spec.classes);

  std::vector<Edge> edges;
  for (Index i = 0; i < spec.nodes; ++i) {
    for (Index j = i + 1; j < spec.nodes; ++j) {
      const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
      if (coin(rng) < (same ? spec.p_in : spec.p_out)) edges.emplace_back(i, j);
    }
  }

  DenseMatrix centers(spec.classes, spec.attributes);
  for (Index k = 0; k < centers.size(); ++k) centers.data()[k] = normal(rng);
  DenseMatrix x(spec.nodes, spec.attributes);
  for (Index i = 0; i < spec.nodes; ++i) {
    for (Index c = 0; c < spec.attributes; ++c) {
      x(i, c) = spec.signal * centers(labels[static_cast<std::size_t>(i)], c) + normal(rng);
    }
  }
  return make_graph(spec.nodes, edges, std::move(x), std::move(labels));
}

Graph make_random_graph(Index nodes, double p, Index attributes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Edge> edges;
  for (Index i = 0; i < nodes; ++i) {
    for (Index j = i + 1; j < nodes; ++j) {
      if (coin(rng) < p) edges.emplace_back(i, j);
    }
  }
  DenseMatrix x(nodes, attributes);
  for (Index k = 0; k < x.size(); ++k) x.data()[k] = normal(rng);
  return make_graph(nodes, edges, std::move(x));
}

}  // namespace secl
