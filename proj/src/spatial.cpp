#include "dwseg/spatial.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

#include "dwseg/error.hpp"

namespace dwseg {

namespace {

double minkowski_unchecked(double dr, double dc, double k) noexcept {
  dr = std::abs(dr);
  dc = std::abs(dc);
  if (k == 2.0) return std::sqrt(dr * dr + dc * dc);
  return std::pow(std::pow(dr, k) + std::pow(dc, k), 1.0 / k);
}

constexpr std::array<std::array<int, 2>, 8> kOffsets8{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1}}};
constexpr std::array<std::array<int, 2>, 4> kOffsets4{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};

template <std::size_t M>
void accumulate_neighbours(const Population& pop, const Geometry& g, std::size_t idx,
                           const std::array<std::array<int, 2>, M>& offsets, double epsilon,
                           double* out) noexcept {
  const std::size_t dim = pop.dim();
  const double* self = pop[idx].data();
  const int row = static_cast<int>(idx / g.width);
  const int col = static_cast<int>(idx % g.width);
  for (std::size_t m = 0; m < dim; ++m) out[m] = self[m];
  std::size_t count = 1;
  for (const auto& [dr, dc] : offsets) {
    const int r = row + dr;
    const int c = col + dc;
    if (r < 0 || c < 0 || r >= g.height || c >= g.width) continue;
    const double* y = pop[static_cast<std::size_t>(r) * g.width + c].data();
    if (!detail::within_confidence(y, self, dim, epsilon)) continue;
    for (std::size_t m = 0; m < dim; ++m) out[m] += y[m];
    ++count;
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t m = 0; m < dim; ++m) out[m] *= inv;
}

}  // namespace

double minkowski(PixelCoord a, PixelCoord b, double k) {
  require(std::isfinite(k) && k > 1.0, "minkowski order k must be > 1");
  return minkowski_unchecked(a.row - b.row, a.col - b.col, k);
}

double normalized_distance(PixelCoord p_i, PixelCoord p_j, PixelCoord p_size, double k) {
  require(p_size.row >= 0 && p_size.col >= 0, "corner coordinate must be non-negative");
  const auto in = [&](PixelCoord p) {
    return p.row >= 0 && p.col >= 0 && p.row <= p_size.row && p.col <= p_size.col;
  };
  require(in(p_i) && in(p_j), "pixel coordinate out of bounds");
  const double denom = minkowski(PixelCoord{0, 0}, p_size, k);
  require(denom > 0.0, "normalized distance is undefined on a 1x1 image");
  return minkowski(p_i, p_j, k) / denom;
}

PixelCoord far_corner(const Geometry& g) noexcept { return {g.height - 1, g.width - 1}; }

DistanceNormalizer::DistanceNormalizer(const Geometry& g, double k) : k_(k) {
  const double denom = minkowski(PixelCoord{0, 0}, far_corner(g), k);
  require(denom > 0.0, "normalized distance is undefined on a 1x1 image");
  inv_diag_ = 1.0 / denom;
}

double DistanceNormalizer::operator()(PixelCoord a, PixelCoord b) const noexcept {
  return minkowski_unchecked(a.row - b.row, a.col - b.col, k_) * inv_diag_;
}

std::pair<OpinionVec, OpinionVec> distance_update(std::span<const double> a,
                                                  std::span<const double> b, PixelCoord p_a,
                                                  PixelCoord p_b, const ModelParams& params,
                                                  PixelCoord p_size) {
  require(a.size() == b.size(), "opinion dimension mismatch");
  const double d = normalized_distance(p_a, p_b, p_size, params.minkowski_k);
  OpinionVec na(a.size()), nb(b.size());
  detail::pair_step(a.data(), b.data(), a.size(), params.mu, 1.0 - d, na.data(), nb.data());
  for (std::size_t m = 0; m < na.size(); ++m) {
    na[m] = detail::clamp01(na[m]);
    nb[m] = detail::clamp01(nb[m]);
  }
  return {std::move(na), std::move(nb)};
}

namespace detail {

void neighbourhood_into(const Population& pop, std::size_t idx, double epsilon,
                        int connectivity, double* out) noexcept {
  const Geometry& g = *pop.geometry();
  if (connectivity == 4) {
    accumulate_neighbours(pop, g, idx, kOffsets4, epsilon, out);
  } else {
    accumulate_neighbours(pop, g, idx, kOffsets8, epsilon, out);
  }
}

}  // namespace detail

OpinionVec neighbourhood_opinion(const Population& pop, PixelCoord p, double epsilon,
                                 int connectivity) {
  require(connectivity == 4 || connectivity == 8, "connectivity must be 4 or 8");
  const std::size_t idx = pop.index(p);
  OpinionVec out(pop.dim());
  detail::neighbourhood_into(pop, idx, epsilon, connectivity, out.data());
  return out;
}

std::pair<OpinionVec, OpinionVec> neighbour_update(const Population& pop, PixelCoord p_i,
                                                   PixelCoord p_j, const ModelParams& params) {
  params.validate();
  OpinionVec eta_i = neighbourhood_opinion(pop, p_i, params.epsilon, params.connectivity);
  OpinionVec eta_j = neighbourhood_opinion(pop, p_j, params.epsilon, params.connectivity);
  if (!detail::within_confidence(eta_i.data(), eta_j.data(), pop.dim(), params.epsilon)) {
    return {pop.opinion(pop.index(p_i)), pop.opinion(pop.index(p_j))};
  }
  OpinionVec na(pop.dim()), nb(pop.dim());
  detail::pair_step(eta_i.data(), eta_j.data(), pop.dim(), params.mu, 1.0, na.data(),
                    nb.data());
  for (std::size_t m = 0; m < na.size(); ++m) {
    na[m] = detail::clamp01(na[m]);
    nb[m] = detail::clamp01(nb[m]);
  }
  return {std::move(na), std::move(nb)};
}

}  // namespace dwseg
