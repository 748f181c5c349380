#pragma once

#include <span>
#include <string>
#include <vector>

#include "secl/graph.hpp"

namespace secl {

// Contingency table: rows are predicted cluster ids, columns true classes.
// Ids are compacted to the values that actually occur.
struct Contingency {
  std::vector<int> pred_ids;   // row r counts predicted id pred_ids[r]
  std::vector<int> truth_ids;  // column c counts true id truth_ids[c]
  std::vector<std::vector<long long>> counts;
  long long total = 0;

  static Contingency build(std::span<const int> pred, std::span<const int> truth);
};

// Maximum-weight perfect matching on a square benefit matrix (Hungarian /
// Kuhn-Munkres, O(n^3)). Returns assignment[row] = column.
std::vector<int> hungarian_max(const std::vector<std::vector<double>>& benefit);

// Predicted ids relabeled to the class ids they are matched with by the
// accuracy-maximizing assignment. Clusters left unmatched (more clusters than
// classes) map to -1.
std::vector<int> map_clusters_to_classes(std::span<const int> pred, std::span<const int> truth);

// All metric functions throw ShapeError when the label vectors differ in
// length.
double accuracy(std::span<const int> pred, std::span<const int> truth);

enum class NmiNormalization { kGeometric, kArithmetic };
// Natural-log NMI. When either labeling has zero entropy the value is 1 if
// both are constant and 0 otherwise.
double nmi(std::span<const int> pred, std::span<const int> truth,
           NmiNormalization norm = NmiNormalization::kGeometric);

// Pair-counting adjusted Rand index; 1.0 when the expected and maximal index
// coincide (e.g. both labelings constant).
double ari(std::span<const int> pred, std::span<const int> truth);

// F1 per true class after the Hungarian relabeling, averaged uniformly
// (macro) or by class support (weighted).
double f1_macro(std::span<const int> pred, std::span<const int> truth);
double f1_weighted(std::span<const int> pred, std::span<const int> truth);

// Q = sum_c [e_c / m - (deg_c / 2m)^2]. Throws DegenerateGraphError when the
// graph has no edges and ShapeError when labels.size() != N.
double modularity_score(std::span<const int> labels, const Graph& g);

struct MetricValues {
  double acc = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
  double f1 = 0.0;
  double f1_weighted = 0.0;
  double modularity_q = 0.0;
};

// Everything evaluate_clustering can compute. Truth-based metrics are left
// at zero (and has_truth false) without labels; Q is zero for edgeless graphs.
struct Evaluation {
  MetricValues values;
  bool has_truth = false;
};

Evaluation evaluate_clustering(std::span<const int> pred, const Graph& g);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (0 for a single run)
};

MetricStats mean_std(std::span<const double> xs);

// Per-run metrics over seeds plus their aggregates.
struct MetricsReport {
  std::vector<MetricValues> per_run;
  MetricStats acc, nmi, ari, f1, f1_weighted, modularity_q;

  void add(const MetricValues& v);
  // Recomputes every aggregate from per_run.
  void aggregate();
};

}  // namespace secl
