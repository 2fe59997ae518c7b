#include <cmath>
#include <limits>

#include "dwseg/kernels.hpp"

namespace dwseg::kernels::serial {

void bilateral(const double* in, double* out, int width, int height, std::size_t dim,
               const BilateralSpec& spec) {
  const double two_ss2 = 2.0 * spec.sigma_spatial * spec.sigma_spatial;
  const double two_sr2 = 2.0 * spec.sigma_range * spec.sigma_range;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      for (std::size_t m = 0; m < dim; ++m) {
        const double centre = in[(static_cast<std::size_t>(r) * width + c) * dim + m];
        double num = 0.0;
        double den = 0.0;
        for (int qr = r - spec.radius; qr <= r + spec.radius; ++qr) {
          if (qr < 0 || qr >= height) continue;
          for (int qc = c - spec.radius; qc <= c + spec.radius; ++qc) {
            if (qc < 0 || qc >= width) continue;
            const double v = in[(static_cast<std::size_t>(qr) * width + qc) * dim + m];
            const double dr = qr - r;
            const double dc = qc - c;
            const double w = std::exp(-(dr * dr + dc * dc) / two_ss2) *
                             std::exp(-((v - centre) * (v - centre)) / two_sr2);
            num += w * v;
            den += w;
          }
        }
        out[(static_cast<std::size_t>(r) * width + c) * dim + m] = num / den;
      }
    }
  }
}

void assign_nearest(const double* points, std::size_t n, std::size_t dim,
                    const double* centres, std::size_t k, int* labels, double* dist2) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points + i * dim;
    double best = std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double* q = centres + j * dim;
      double d = 0.0;
      for (std::size_t m = 0; m < dim; ++m) d += (p[m] - q[m]) * (p[m] - q[m]);
      if (d < best) {
        best = d;
        best_k = static_cast<int>(j);
      }
    }
    labels[i] = best_k;
    dist2[i] = best;
  }
}

}  // namespace dwseg::kernels::serial
