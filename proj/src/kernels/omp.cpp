#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dwseg/kernels.hpp"

namespace dwseg::kernels {

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

void bilateral(const double* in, double* out, int width, int height, std::size_t dim,
               const BilateralSpec& spec) {
  const int rad = spec.radius;
  const int span = 2 * rad + 1;
  std::vector<double> spatial(static_cast<std::size_t>(span) * span);
  const double two_ss2 = 2.0 * spec.sigma_spatial * spec.sigma_spatial;
  for (int dr = -rad; dr <= rad; ++dr) {
    for (int dc = -rad; dc <= rad; ++dc) {
      spatial[static_cast<std::size_t>(dr + rad) * span + (dc + rad)] =
          std::exp(-static_cast<double>(dr * dr + dc * dc) / two_ss2);
    }
  }
  const double inv_two_sr2 = 1.0 / (2.0 * spec.sigma_range * spec.sigma_range);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < height; ++r) {
    const int r0 = std::max(0, r - rad);
    const int r1 = std::min(height - 1, r + rad);
    for (int c = 0; c < width; ++c) {
      const int c0 = std::max(0, c - rad);
      const int c1 = std::min(width - 1, c + rad);
      const std::size_t centre_idx = (static_cast<std::size_t>(r) * width + c) * dim;
      for (std::size_t m = 0; m < dim; ++m) {
        const double centre = in[centre_idx + m];
        double num = 0.0;
        double den = 0.0;
        for (int qr = r0; qr <= r1; ++qr) {
          const double* wrow = &spatial[static_cast<std::size_t>(qr - r + rad) * span];
          const double* row = in + static_cast<std::size_t>(qr) * width * dim + m;
          for (int qc = c0; qc <= c1; ++qc) {
            const double v = row[static_cast<std::size_t>(qc) * dim];
            const double diff = v - centre;
            const double w = wrow[qc - c + rad] * std::exp(-diff * diff * inv_two_sr2);
            num += w * v;
            den += w;
          }
        }
        out[centre_idx + m] = num / den;
      }
    }
  }
}

void assign_nearest(const double* points, std::size_t n, std::size_t dim,
                    const double* centres, std::size_t k, int* labels, double* dist2) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const double* p = points + i * dim;
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double* q = centres + j * dim;
      double d = 0.0;
      for (std::size_t m = 0; m < dim; ++m) {
        const double t = p[m] - q[m];
        d += t * t;
      }
      if (d < best) {
        best = d;
        best_k = static_cast<int>(j);
      }
    }
    labels[i] = best_k;
    dist2[i] = best;
  }
}

}  // namespace omp
}  // namespace dwseg::kernels
