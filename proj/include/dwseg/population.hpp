#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dwseg {

/// A single agent's opinion: d components, each in [0, 1].
using OpinionVec = std::vector<double>;

/// Pixel lattice position. Row-major: row in [0, height), col in [0, width).
struct PixelCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const PixelCoord&) const = default;
};

struct Geometry {
  int width = 0;
  int height = 0;
  auto operator<=>(const Geometry&) const = default;
};

/// N agents with d-dimensional opinions stored contiguously (agent-major).
/// When the agents are pixels the population carries its grid geometry and
/// agent i sits at row i / width, column i % width.
class Population {
 public:
  Population() = default;
  Population(std::size_t dim, std::vector<double> values);
  Population(Geometry geometry, std::size_t dim, std::vector<double> values);

  /// Scalar (d = 1) population without geometry.
  static Population scalar(std::vector<double> values);
  static Population from_opinions(std::span<const OpinionVec> opinions);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<double> operator[](std::size_t i) noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> operator[](std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  OpinionVec opinion(std::size_t i) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  const std::optional<Geometry>& geometry() const noexcept { return geometry_; }
  bool has_geometry() const noexcept { return geometry_.has_value(); }
  /// Throws InvalidInput when the population has no geometry.
  const Geometry& grid() const;

  std::size_t index(PixelCoord p) const;
  PixelCoord coord(std::size_t i) const;
  bool in_bounds(PixelCoord p) const;

  /// Componentwise mean over all agents.
  OpinionVec mean() const;

  bool operator==(const Population&) const = default;

 private:
  void validate() const;

  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::optional<Geometry> geometry_;
};

}  // namespace dwseg
