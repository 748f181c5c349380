#pragma once

#include <cstdint>
#include <vector>

#include "secl/matrix.hpp"

namespace secl {

struct KMeansOptions {
  int restarts = 10;
  int max_iter = 300;
};

struct ClusterResult {
  std::vector<int> labels;  // ids in [0, k)
  DenseMatrix centroids;    // k x dim
  double inertia = 0.0;     // sum of squared distances to assigned centroids
  int iterations_run = 0;
  // Inertia after each assignment step of the winning restart.
  std::vector<double> inertia_history;
};

// k-means++ seeding followed by Lloyd iterations until the assignment stops
// changing or max_iter is reached; the lowest-inertia restart wins. A cluster
// that empties is re-seeded with the point farthest from its centroid.
// Restart r draws from a generator seeded with (seed, r), so the result is a
// pure function of the inputs. Throws ConfigError when k > N or k < 1.
ClusterResult kmeans(const DenseMatrix& points, int k, std::uint64_t seed,
                     const KMeansOptions& options = {});

}  // namespace secl
