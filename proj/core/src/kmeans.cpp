#include "secl/kmeans.hpp"

#include <limits>
#include <random>
#include <string>

#include "secl/error.hpp"

namespace secl {
namespace {

double squared_distance(const DenseMatrix& a, Index i, const DenseMatrix& b, Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

DenseMatrix plus_plus_seeds(const DenseMatrix& x, int k, std::mt19937_64& rng) {
  const Index n = x.rows();
  DenseMatrix centroids(k, x.cols());
  std::uniform_int_distribution<Index> first(0, n - 1);
  centroids.row(0) = x.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = squared_distance(x, i, centroids, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Index pick = n - 1;
    if (total > 0.0) {
      double target = unit(rng) * total;
      for (Index i = 0; i < n; ++i) {
        target -= d2[static_cast<std::size_t>(i)];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with chosen centroids.
      pick = std::uniform_int_distribution<Index>(0, n - 1)(rng);
    }
    centroids.row(c) = x.row(pick);
    for (Index i = 0; i < n; ++i) {
      auto& v = d2[static_cast<std::size_t>(i)];
      v = std::min(v, squared_distance(x, i, centroids, c));
    }
  }
  return centroids;
}

// Assigns every point to its nearest centroid (lowest index on ties).
// Returns the resulting inertia.
double assign(const DenseMatrix& x, const DenseMatrix& centroids, std::vector<int>& labels,
              std::vector<double>& dist) {
  double inertia = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(x, i, centroids, c);
      if (d < best) {
        best = d;
        arg = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = arg;
    dist[static_cast<std::size_t>(i)] = best;
    inertia += best;
  }
  return inertia;
}

ClusterResult lloyd(const DenseMatrix& x, int k, std::mt19937_64& rng, int max_iter) {
  const Index n = x.rows();
  ClusterResult r;
  r.centroids = plus_plus_seeds(x, k, rng);
  r.labels.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> next(static_cast<std::size_t>(n));
  std::vector<double> dist(static_cast<std::size_t>(n));
  std::vector<Index> counts(static_cast<std::size_t>(k));

  for (int iter = 0; iter < max_iter; ++iter) {
    r.inertia = assign(x, r.centroids, next, dist);

    // Re-seed empty clusters with the farthest point of the current
    // assignment; each move strictly lowers the inertia.
    std::fill(counts.begin(), counts.end(), 0);
    for (int c : next) ++counts[static_cast<std::size_t>(c)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = 0;
      for (Index i = 1; i < n; ++i) {
        if (dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far)]) far = i;
      }
      if (counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])] <= 1) continue;
      --counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      r.inertia -= dist[static_cast<std::size_t>(far)];
      next[static_cast<std::size_t>(far)] = c;
      dist[static_cast<std::size_t>(far)] = 0.0;
      counts[static_cast<std::size_t>(c)] = 1;
      r.centroids.row(c) = x.row(far);
    }
    r.inertia_history.push_back(r.inertia);
    r.iterations_run = iter + 1;

    const bool converged = next == r.labels;
    r.labels = next;
    if (converged) break;

    DenseMatrix sums = DenseMatrix::Zero(k, x.cols());
    for (Index i = 0; i < n; ++i) sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        r.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }
  return r;
}

}  // namespace

ClusterResult kmeans(const DenseMatrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw ConfigError("k-means needs at least one cluster");
  if (k > points.rows()) {
    throw ConfigError("k-means with k=" + std::to_string(k) + " on only " + std::to_string(points.rows()) +
                      " points");
  }
  if (options.restarts < 1 || options.max_iter < 1) {
    throw ConfigError("k-means restarts and max_iter must be positive");
  }
  require_finite(points, "k-means input");

  ClusterResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < options.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    ClusterResult r = lloyd(points, k, rng, options.max_iter);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

}  // namespace secl
