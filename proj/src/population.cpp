#include "dwseg/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dwseg/error.hpp"

namespace dwseg {

Population::Population(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  validate();
}

Population::Population(Geometry geometry, std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)), geometry_(geometry) {
  validate();
}

Population Population::scalar(std::vector<double> values) {
  return Population(1, std::move(values));
}

Population Population::from_opinions(std::span<const OpinionVec> opinions) {
  require(!opinions.empty(), "population needs at least one opinion");
  const std::size_t dim = opinions.front().size();
  std::vector<double> flat;
  flat.reserve(dim * opinions.size());
  for (const auto& o : opinions) {
    require(o.size() == dim, "opinions of one population must share a dimension");
    flat.insert(flat.end(), o.begin(), o.end());
  }
  return Population(dim, std::move(flat));
}

void Population::validate() const {
  require(dim_ >= 1, "opinion dimension must be >= 1");
  require(values_.size() % dim_ == 0, "value count is not a multiple of the dimension");
  for (double v : values_) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0,
            "opinion component outside [0,1]: " + std::to_string(v));
  }
  if (geometry_) {
    require(geometry_->width > 0 && geometry_->height > 0, "grid dimensions must be positive");
    require(static_cast<std::size_t>(geometry_->width) * geometry_->height == size(),
            "grid " + std::to_string(geometry_->width) + "x" +
                std::to_string(geometry_->height) + " does not match " +
                std::to_string(size()) + " agents");
  }
}

OpinionVec Population::opinion(std::size_t i) const {
  const auto s = (*this)[i];
  return {s.begin(), s.end()};
}

const Geometry& Population::grid() const {
  if (!geometry_) throw InvalidInput("population has no pixel geometry");
  return *geometry_;
}

std::size_t Population::index(PixelCoord p) const {
  const auto& g = grid();
  require(in_bounds(p), "pixel coordinate out of bounds");
  return static_cast<std::size_t>(p.row) * g.width + p.col;
}

PixelCoord Population::coord(std::size_t i) const {
  const auto& g = grid();
  return {static_cast<int>(i / g.width), static_cast<int>(i % g.width)};
}

bool Population::in_bounds(PixelCoord p) const {
  const auto& g = grid();
  return p.row >= 0 && p.col >= 0 && p.row < g.height && p.col < g.width;
}

OpinionVec Population::mean() const {
  OpinionVec m(dim_, 0.0);
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = (*this)[i];
    for (std::size_t c = 0; c < dim_; ++c) m[c] += o[c];
  }
  if (n > 0) {
    for (double& v : m) v /= static_cast<double>(n);
  }
  return m;
}

}  // namespace dwseg
