#pragma once

#include <cstdint>

#include "secl/graph.hpp"

namespace secl {

// Planted-partition graph with class-dependent Gaussian attributes, for
// smoke tests, benchmarks and the determinism check. Nodes are assigned to
// classes round-robin; an edge joins same-class pairs with probability p_in
// and cross-class pairs with p_out. Attributes are a per-class mean vector
// (entries N(0, 1)) scaled by signal plus N(0, 1) noise.
struct PlantedPartitionSpec {
  Index nodes = 120;
  int classes = 3;
  double p_in = 0.15;
  double p_out = 0.01;
  Index attributes = 16;
  double signal = 0.6;
  std::uint64_t seed = 1;
};

Graph make_planted_partition(const PlantedPartitionSpec& spec);

// Erdos-Renyi G(n, p) with standard normal attributes of width d.
Graph make_random_graph(Index nodes, double p, Index attributes, std::uint64_t seed);

}  // namespace secl
