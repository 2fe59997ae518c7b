#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dwseg/population.hpp"
#include "dwseg/raster.hpp"

namespace dwseg {

enum class Shape { disc, rectangle, ellipse, two_discs, band };

struct SyntheticSpec {
  std::string name = "disc";
  int width = 128;
  int height = 128;
  double background = 0.2;
  double object = 0.8;
  double noise_sigma = 0.05;
  Shape shape = Shape::disc;
  std::size_t dim = 3;
  std::uint64_t seed = 1;
};

struct SyntheticImage {
  Population image;
  BinaryMask mask;
};

/// Two flat regions (object shape on a background) plus independent Gaussian
/// noise per channel, clipped to [0,1]. The mask marks the object region.
SyntheticImage make_two_region(const SyntheticSpec& spec);

/// Vertical bands of equal width (the last takes the remainder), one flat
/// tone per band, no noise.
Population make_bands(Geometry g, std::span<const double> tones, std::size_t dim = 1);

/// The five-image noisy two-region set shipped under data/synthetic.
std::vector<SyntheticSpec> bundled_dataset();

}  // namespace dwseg
