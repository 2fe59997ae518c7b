#include "dwseg/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "dwseg/error.hpp"
#include "dwseg/rng.hpp"

namespace dwseg {

namespace {

bool inside(Shape shape, double r, double c, double h, double w) {
  const double cy = (h - 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  const double s = std::min(h, w);
  switch (shape) {
    case Shape::disc: return std::hypot(r - cy, c - cx) <= 0.3 * s;
    case Shape::rectangle:
      return r >= 0.25 * h && r < 0.7 * h && c >= 0.2 * w && c < 0.65 * w;
    case Shape::ellipse: {
      const double dy = (r - cy) / (0.22 * h);
      const double dx = (c - cx) / (0.38 * w);
      return dx * dx + dy * dy <= 1.0;
    }
    case Shape::two_discs:
      return std::hypot(r - 0.35 * h, c - 0.3 * w) <= 0.17 * s ||
             std::hypot(r - 0.65 * h, c - 0.7 * w) <= 0.2 * s;
    case Shape::band: return r >= 0.4 * h && r < 0.65 * h;
  }
  return false;
}

}  // namespace

SyntheticImage make_two_region(const SyntheticSpec& spec) {
  require(spec.width > 0 && spec.height > 0, "synthetic image needs positive dimensions");
  require(spec.dim >= 1, "synthetic image needs at least one channel");
  require(spec.noise_sigma >= 0.0, "noise sigma must be >= 0");
  SplitMix64 rng(spec.seed);
  const std::size_t n = static_cast<std::size_t>(spec.width) * spec.height;
  std::vector<double> values;
  values.reserve(n * spec.dim);
  BinaryMask mask{spec.width, spec.height, std::vector<std::uint8_t>(n)};
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const bool obj = inside(spec.shape, r, c, spec.height, spec.width);
      mask.bits[static_cast<std::size_t>(r) * spec.width + c] = obj ? 1 : 0;
      const double tone = obj ? spec.object : spec.background;
      for (std::size_t m = 0; m < spec.dim; ++m) {
        const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
        values.push_back(std::clamp(tone + noise, 0.0, 1.0));
      }
    }
  }
  return {Population(Geometry{spec.width, spec.height}, spec.dim, std::move(values)),
          std::move(mask)};
}

Population make_bands(Geometry g, std::span<const double> tones, std::size_t dim) {
  require(!tones.empty(), "need at least one tone");
  require(g.width >= static_cast<int>(tones.size()), "more bands than columns");
  const int band = g.width / static_cast<int>(tones.size());
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(g.width) * g.height * dim);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      const auto b = std::min<std::size_t>(static_cast<std::size_t>(c / band), tones.size() - 1);
      values.insert(values.end(), dim, tones[b]);
    }
  }
  return Population(g, dim, std::move(values));
}

std::vector<SyntheticSpec> bundled_dataset() {
  return {
      {"disc", 128, 128, 0.2, 0.8, 0.05, Shape::disc, 3, 101},
      {"rectangle", 128, 96, 0.25, 0.75, 0.05, Shape::rectangle, 3, 102},
      {"ellipse", 112, 128, 0.8, 0.2, 0.05, Shape::ellipse, 3, 103},
      {"two_discs", 128, 128, 0.3, 0.85, 0.05, Shape::two_discs, 3, 104},
      {"band", 96, 96, 0.7, 0.15, 0.05, Shape::band, 3, 105},
  };
}

}  // namespace dwseg
