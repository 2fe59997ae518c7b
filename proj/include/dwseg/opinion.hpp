#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "dwseg/population.hpp"

namespace dwseg {

enum class UpdateRule { basic, distance, neighbour };

std::string_view to_string(UpdateRule rule) noexcept;
/// Accepts "basic", "distance", "neighbour". Throws InvalidInput otherwise.
UpdateRule parse_update_rule(std::string_view name);

struct ModelParams {
  double mu = 0.5;
  double epsilon = 0.1;
  UpdateRule rule = UpdateRule::basic;
  double minkowski_k = 2.0;
  int connectivity = 8;
  double conv_tol = 1e-6;
  int max_sweeps = 10'000;
  std::uint64_t seed = 0x5EED;

  /// Throws InvalidInput on any out-of-range field.
  void validate() const;
};

/// Bounded-confidence test: max_m |a_m - b_m| < epsilon (strict).
bool within_confidence(std::span<const double> a, std::span<const double> b, double epsilon);

/// Symmetric pairwise step: (a + mu(b - a), b + mu(a - b)).
std::pair<OpinionVec, OpinionVec> basic_update(std::span<const double> a,
                                               std::span<const double> b, double mu);

namespace detail {

// Unchecked forms used inside sweeps; callers guarantee equal extents.
inline bool within_confidence(const double* a, const double* b, std::size_t dim,
                              double epsilon) noexcept {
  for (std::size_t m = 0; m < dim; ++m) {
    const double diff = a[m] > b[m] ? a[m] - b[m] : b[m] - a[m];
    if (!(diff < epsilon)) return false;
  }
  return true;
}

// Writes the attenuated pairwise step into out_a/out_b. scale = 1 gives the
// plain rule; the distance rule passes (1 - d).
inline void pair_step(const double* a, const double* b, std::size_t dim, double mu,
                      double scale, double* out_a, double* out_b) noexcept {
  for (std::size_t m = 0; m < dim; ++m) {
    const double am = a[m];
    const double bm = b[m];
    out_a[m] = am + mu * (bm - am) * scale;
    out_b[m] = bm + mu * (am - bm) * scale;
  }
}

inline double clamp01(double v) noexcept { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

}  // namespace detail

}  // namespace dwseg
