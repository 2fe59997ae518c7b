#include "dwseg/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dwseg/error.hpp"
#include "dwseg/kernels.hpp"
#include "dwseg/rng.hpp"

namespace dwseg {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) noexcept {
  double d = 0.0;
  for (std::size_t m = 0; m < dim; ++m) {
    const double t = a[m] - b[m];
    d += t * t;
  }
  return d;
}

// k-means++: first centre uniform, later ones proportional to the squared
// distance to the nearest chosen centre. Stops early if every point already
// coincides with a centre.
std::vector<double> seed_centres(const Population& pop, std::size_t c, SplitMix64& rng) {
  const std::size_t n = pop.size();
  const std::size_t dim = pop.dim();
  const auto pts = pop.values();
  std::vector<double> centres;
  centres.reserve(c * dim);
  const std::size_t first = rng.below(n);
  centres.insert(centres.end(), pts.begin() + first * dim, pts.begin() + (first + 1) * dim);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(&pts[i * dim], centres.data(), dim);
  while (centres.size() / dim < c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (!(total > 0.0)) break;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    while (d2[pick] <= 0.0) --pick;
    const double* p = &pts[pick * dim];
    centres.insert(centres.end(), p, p + dim);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(&pts[i * dim], p, dim));
    }
  }
  return centres;
}

}  // namespace

void KMeansParams::validate() const {
  require(c >= 1, "k-means needs c >= 1");
  require(max_iters > 0, "k-means max_iters must be positive");
  require(std::isfinite(tol) && tol > 0.0, "k-means tol must be > 0");
}

KMeansResult kmeans(const Population& pop, const KMeansParams& params) {
  params.validate();
  const std::size_t n = pop.size();
  const std::size_t dim = pop.dim();
  require(n >= static_cast<std::size_t>(params.c),
          "k-means needs at least c points (N=" + std::to_string(n) +
              ", c=" + std::to_string(params.c) + ")");

  SplitMix64 rng(params.seed);
  std::vector<double> centres = seed_centres(pop, static_cast<std::size_t>(params.c), rng);
  const std::size_t k = centres.size() / dim;
  const auto pts = pop.values();

  std::vector<int> labels(n);
  std::vector<double> d2(n);
  const auto assign = [&] {
    if (params.exec == Exec::serial) {
      kernels::serial::assign_nearest(pts.data(), n, dim, centres.data(), k, labels.data(),
                                      d2.data());
    } else {
      kernels::omp::assign_nearest(pts.data(), n, dim, centres.data(), k, labels.data(),
                                   d2.data());
    }
  };

  KMeansResult result;
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  assign();
  while (result.iterations < params.max_iters) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = static_cast<std::size_t>(labels[i]);
      ++counts[l];
      for (std::size_t m = 0; m < dim; ++m) sums[l * dim + m] += pts[i * dim + m];
    }
    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double* cj = &centres[j * dim];
      if (counts[j] == 0) {
        // Re-seed at the point worst served by its current centre.
        const auto far = static_cast<std::size_t>(
            std::max_element(d2.begin(), d2.end()) - d2.begin());
        const double* p = &pts[far * dim];
        shift = std::max(shift, std::sqrt(sq_dist(cj, p, dim)));
        std::copy(p, p + dim, cj);
        d2[far] = 0.0;
        continue;
      }
      double moved = 0.0;
      for (std::size_t m = 0; m < dim; ++m) {
        const double v = sums[j * dim + m] / static_cast<double>(counts[j]);
        moved += (v - cj[m]) * (v - cj[m]);
        cj[m] = v;
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    assign();
    ++result.iterations;
    result.objective.push_back(std::accumulate(d2.begin(), d2.end(), 0.0));
    if (shift < params.tol) {
      result.converged = true;
      break;
    }
  }

  result.clusters = clusters_from_labels(pop, labels, 0.0);
  return result;
}

}  // namespace dwseg
