#include "secl/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "secl/error.hpp"

namespace secl {
namespace {

void require_same_length(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("label vectors differ in length: " + std::to_string(pred.size()) + " vs " +
                     std::to_string(truth.size()));
  }
}

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

Contingency Contingency::build(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  Contingency t;
  std::map<int, std::size_t> prow;
  std::map<int, std::size_t> tcol;
  for (int p : pred) prow.emplace(p, 0);
  for (int c : truth) tcol.emplace(c, 0);
  for (auto& [id, idx] : prow) {
    idx = t.pred_ids.size();
    t.pred_ids.push_back(id);
  }
  for (auto& [id, idx] : tcol) {
    idx = t.truth_ids.size();
    t.truth_ids.push_back(id);
  }
  t.counts.assign(t.pred_ids.size(), std::vector<long long>(t.truth_ids.size(), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) ++t.counts[prow[pred[i]]][tcol[truth[i]]];
  t.total = static_cast<long long>(pred.size());
  return t;
}

std::vector<int> hungarian_max(const std::vector<std::vector<double>>& benefit) {
  const std::size_t n = benefit.size();
  for (const auto& row : benefit) {
    if (row.size() != n) throw ShapeError("hungarian_max needs a square matrix");
  }
  if (n == 0) return {};
  // Shortest augmenting path with potentials on cost = -benefit; 1-based
  // with column 0 as the virtual source.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);  // match[col] = row
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -benefit[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = static_cast<int>(j - 1);
  return assignment;
}

namespace {

// Matching of contingency rows (clusters) to columns (classes) padded to a
// square; columns >= number of classes are dummies.
std::vector<int> best_matching(const Contingency& t) {
  const std::size_t n = std::max(t.pred_ids.size(), t.truth_ids.size());
  std::vector<std::vector<double>> benefit(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < t.pred_ids.size(); ++r) {
    for (std::size_t c = 0; c < t.truth_ids.size(); ++c) benefit[r][c] = static_cast<double>(t.counts[r][c]);
  }
  return hungarian_max(benefit);
}

}  // namespace

std::vector<int> map_clusters_to_classes(std::span<const int> pred, std::span<const int> truth) {
  const Contingency t = Contingency::build(pred, truth);
  const std::vector<int> match = best_matching(t);
  std::map<int, int> to_class;
  for (std::size_t r = 0; r < t.pred_ids.size(); ++r) {
    const auto c = static_cast<std::size_t>(match[r]);
    to_class[t.pred_ids[r]] = c < t.truth_ids.size() ? t.truth_ids[c] : -1;
  }
  std::vector<int> mapped(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) mapped[i] = to_class[pred[i]];
  return mapped;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  if (pred.empty()) return 0.0;
  const Contingency t = Contingency::build(pred, truth);
  const std::vector<int> match = best_matching(t);
  long long hits = 0;
  for (std::size_t r = 0; r < t.pred_ids.size(); ++r) {
    const auto c = static_cast<std::size_t>(match[r]);
    if (c < t.truth_ids.size()) hits += t.counts[r][c];
  }
  return static_cast<double>(hits) / static_cast<double>(t.total);
}

double nmi(std::span<const int> pred, std::span<const int> truth, NmiNormalization norm) {
  require_same_length(pred, truth);
  if (pred.empty()) return 0.0;
  const Contingency t = Contingency::build(pred, truth);
  const double n = static_cast<double>(t.total);
  std::vector<double> rows(t.pred_ids.size(), 0.0);
  std::vector<double> cols(t.truth_ids.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      rows[r] += static_cast<double>(t.counts[r][c]);
      cols[c] += static_cast<double>(t.counts[r][c]);
    }
  }
  auto entropy = [n](const std::vector<double>& marg) {
    double h = 0.0;
    for (double m : marg) {
      if (m > 0.0) h -= (m / n) * std::log(m / n);
    }
    return h;
  };
  const double hp = entropy(rows);
  const double ht = entropy(cols);
  if (hp == 0.0 || ht == 0.0) return (hp == 0.0 && ht == 0.0) ? 1.0 : 0.0;
  double mi = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double nij = static_cast<double>(t.counts[r][c]);
      if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (rows[r] * cols[c]));
    }
  }
  mi = std::max(mi, 0.0);
  const double denom = norm == NmiNormalization::kGeometric ? std::sqrt(hp * ht) : 0.5 * (hp + ht);
  return std::min(mi / denom, 1.0);
}

double ari(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  const Contingency t = Contingency::build(pred, truth);
  const double n = static_cast<double>(t.total);
  double sum_cells = 0.0;
  std::vector<double> rows(t.pred_ids.size(), 0.0);
  std::vector<double> cols(t.truth_ids.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const double nij = static_cast<double>(t.counts[r][c]);
      sum_cells += choose2(nij);
      rows[r] += nij;
      cols[c] += nij;
    }
  }
  double sum_rows = 0.0;
  double sum_cols = 0.0;
  for (double a : rows) sum_rows += choose2(a);
  for (double b : cols) sum_cols += choose2(b);
  const double pairs = choose2(n);
  const double expected = pairs > 0.0 ? sum_rows * sum_cols / pairs : 0.0;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_cells - expected) / (max_index - expected);
}

namespace {

struct ClassF1 {
  double f1;
  double support;
};

std::vector<ClassF1> per_class_f1(std::span<const int> pred, std::span<const int> truth) {
  require_same_length(pred, truth);
  const std::vector<int> mapped = map_clusters_to_classes(pred, truth);
  std::map<int, std::array<double, 3>> stats;  // tp, predicted, actual
  for (int c : truth) stats[c];
  for (std::size_t i = 0; i < truth.size(); ++i) {
    stats[truth[i]][2] += 1.0;
    auto it = stats.find(mapped[i]);
    if (it != stats.end()) {
      it->second[1] += 1.0;
      if (mapped[i] == truth[i]) it->second[0] += 1.0;
    }
  }
  std::vector<ClassF1> out;
  for (const auto& [cls, s] : stats) {
    const double tp = s[0];
    const double precision = s[1] > 0.0 ? tp / s[1] : 0.0;
    const double recall = s[2] > 0.0 ? tp / s[2] : 0.0;
    const double f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    out.push_back({f1, s[2]});
  }
  return out;
}

}  // namespace

double f1_macro(std::span<const int> pred, std::span<const int> truth) {
  const auto classes = per_class_f1(pred, truth);
  if (classes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : classes) sum += c.f1;
  return sum / static_cast<double>(classes.size());
}

double f1_weighted(std::span<const int> pred, std::span<const int> truth) {
  const auto classes = per_class_f1(pred, truth);
  double sum = 0.0;
  double support = 0.0;
  for (const auto& c : classes) {
    sum += c.f1 * c.support;
    support += c.support;
  }
  return support > 0.0 ? sum / support : 0.0;
}

double modularity_score(std::span<const int> labels, const Graph& g) {
  if (static_cast<Index>(labels.size()) != g.num_nodes) {
    throw ShapeError("modularity_score: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(g.num_nodes) + " nodes");
  }
  if (g.num_edges() == 0) throw DegenerateGraphError("modularity is undefined for a graph without edges");
  const double m = static_cast<double>(g.num_edges());
  std::map<int, std::pair<double, double>> comm;  // internal edges, degree sum
  for (auto [i, j] : g.edges) {
    const int ci = labels[static_cast<std::size_t>(i)];
    const int cj = labels[static_cast<std::size_t>(j)];
    if (ci == cj) comm[ci].first += 1.0;
    comm[ci].second += 1.0;
    comm[cj].second += 1.0;
  }
  double q = 0.0;
  for (const auto& [c, s] : comm) {
    const double frac = s.second / (2.0 * m);
    q += s.first / m - frac * frac;
  }
  return q;
}

Evaluation evaluate_clustering(std::span<const int> pred, const Graph& g) {
  Evaluation e;
  if (g.labels) {
    const std::span<const int> truth(*g.labels);
    e.has_truth = true;
    e.values.acc = accuracy(pred, truth);
    e.values.nmi = nmi(pred, truth);
    e.values.ari = ari(pred, truth);
    e.values.f1 = f1_macro(pred, truth);
    e.values.f1_weighted = f1_weighted(pred, truth);
  }
  if (g.num_edges() > 0) e.values.modularity_q = modularity_score(pred, g);
  return e;
}

MetricStats mean_std(std::span<const double> xs) {
  if (xs.empty()) return {};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

void MetricsReport::add(const MetricValues& v) {
  per_run.push_back(v);
  aggregate();
}

void MetricsReport::aggregate() {
  auto stat = [this](double MetricValues::*field) {
    std::vector<double> xs;
    xs.reserve(per_run.size());
    for (const auto& v : per_run) xs.push_back(v.*field);
    return mean_std(xs);
  };
  acc = stat(&MetricValues::acc);
  nmi = stat(&MetricValues::nmi);
  ari = stat(&MetricValues::ari);
  f1 = stat(&MetricValues::f1);
  f1_weighted = stat(&MetricValues::f1_weighted);
  modularity_q = stat(&MetricValues::modularity_q);
}

}  // namespace secl
