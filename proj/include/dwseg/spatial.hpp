#pragma once

#include <span>
#include <utility>

#include "dwseg/opinion.hpp"
#include "dwseg/population.hpp"

namespace dwseg {

/// Minkowski distance of order k between two lattice positions.
double minkowski(PixelCoord a, PixelCoord b, double k);

/// minkowski(p_i, p_j) / minkowski((0,0), p_size), in [0, 1] for in-bounds
/// points. p_size is the bottom-right corner. Throws InvalidInput for k <= 1
/// or a 1x1 lattice (zero denominator).
double normalized_distance(PixelCoord p_i, PixelCoord p_j, PixelCoord p_size, double k);

/// Bottom-right corner of a grid, as used by normalized_distance.
PixelCoord far_corner(const Geometry& g) noexcept;

/// normalized_distance with the denominator hoisted out for repeated use on
/// one grid.
class DistanceNormalizer {
 public:
  DistanceNormalizer(const Geometry& g, double k);
  double operator()(PixelCoord a, PixelCoord b) const noexcept;

 private:
  double k_;
  double inv_diag_;
};

/// Distance-attenuated step: (a + mu(b-a)(1-d), b + mu(a-b)(1-d)).
std::pair<OpinionVec, OpinionVec> distance_update(std::span<const double> a,
                                                  std::span<const double> b, PixelCoord p_a,
                                                  PixelCoord p_b, const ModelParams& params,
                                                  PixelCoord p_size);

/// Mean of the opinions in the 4/8-neighbourhood of p (p included, borders
/// truncated) that lie within epsilon of p's own opinion.
OpinionVec neighbourhood_opinion(const Population& pop, PixelCoord p, double epsilon,
                                 int connectivity);

/// Neighbourhood step. With eta_i, eta_j the neighbourhood opinions of the two
/// pixels, returns (eta_i + mu(eta_j - eta_i), eta_j + mu(eta_i - eta_j))
/// clamped to [0,1] when eta_i and eta_j are within epsilon of each other;
/// otherwise returns the two current opinions unchanged.
std::pair<OpinionVec, OpinionVec> neighbour_update(const Population& pop, PixelCoord p_i,
                                                   PixelCoord p_j, const ModelParams& params);

namespace detail {

// Writes the neighbourhood opinion of agent `idx` into out[0..dim).
void neighbourhood_into(const Population& pop, std::size_t idx, double epsilon,
                        int connectivity, double* out) noexcept;

}  // namespace detail

}  // namespace dwseg
