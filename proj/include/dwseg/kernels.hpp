#pragma once

#include <cstddef>

namespace dwseg::kernels {

// Data-parallel kernels behind imaging and the K-means baseline. Every
// kernel has a plain serial reference in `serial` and an OpenMP version in
// `omp`; tests check that they agree and bench/ times them against each
// other.

struct BilateralSpec {
  double sigma_spatial = 3.0;
  double sigma_range = 0.1;
  int radius = 9;
};

// Interleaved planar layout: pixel (r, c), channel m at in[(r*width + c)*dim + m].
// Each channel is filtered independently over a (2*radius+1)^2 window that is
// truncated at the image border.

namespace serial {
void bilateral(const double* in, double* out, int width, int height, std::size_t dim,
               const BilateralSpec& spec);
// For each of n points, the index of the nearest of k centres (squared
// Euclidean, ties to the lower index) and that squared distance.
void assign_nearest(const double* points, std::size_t n, std::size_t dim,
                    const double* centres, std::size_t k, int* labels, double* dist2);
}  // namespace serial

namespace omp {
void bilateral(const double* in, double* out, int width, int height, std::size_t dim,
               const BilateralSpec& spec);
void assign_nearest(const double* points, std::size_t n, std::size_t dim,
                    const double* centres, std::size_t k, int* labels, double* dist2);
}  // namespace omp

/// Threads the omp kernels will use (1 when built without OpenMP).
int max_threads() noexcept;

}  // namespace dwseg::kernels
