#pragma once

#include <cstdint>
#include <vector>

#include "dwseg/cluster.hpp"
#include "dwseg/imaging.hpp"
#include "dwseg/population.hpp"

namespace dwseg {

struct KMeansParams {
  int c = 2;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0x5EED;
  Exec exec = Exec::parallel;

  void validate() const;
};

struct KMeansResult {
  ClusterResult clusters;  ///< every cluster counts as headline
  int iterations = 0;
  bool converged = false;
  /// Within-cluster sum of squares after each Lloyd iteration.
  std::vector<double> objective;
};

/// Lloyd's algorithm from k-means++ seeding, stopping once no centre moves
/// by tol or more (Euclidean) or after max_iters. A cluster that empties is
/// re-seeded at the point farthest from its assigned centre. Fewer than c
/// centres come back when the population has fewer distinct points.
/// Throws InvalidInput when N < c.
KMeansResult kmeans(const Population& pop, const KMeansParams& params);

}  // namespace dwseg
