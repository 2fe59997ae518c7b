#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "dwseg/cluster.hpp"
#include "dwseg/kernels.hpp"
#include "dwseg/population.hpp"
#include "dwseg/raster.hpp"

namespace dwseg {

// ---- file I/O -------------------------------------------------------------

/// Reads a PNG or JPEG. Colour images become d = 3 RGB opinions (alpha is
/// dropped), grayscale images d = 1; 8-bit samples are divided by 255 and
/// 16-bit by 65535. Throws IoError naming the path.
Population load_image(const std::filesystem::path& path);

/// Writes a d = 1 or d = 3 population with geometry as an 8-bit PNG.
void save_png(const std::filesystem::path& path, const Population& image);

/// Opinion component to byte: floor(v * 255 + 0.5), i.e. round half up.
std::uint8_t to_byte(double v) noexcept;

/// Mask PNG: any nonzero colour sample marks an object pixel.
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Label-map text file: a header line "width height num_labels", then one
/// line per image row holding `width` space-separated integer ids.
void write_label_map(const std::filesystem::path& path, const LabelMap& map);
LabelMap read_label_map(const std::filesystem::path& path);

// ---- pre/post-processing --------------------------------------------------

enum class Exec { serial, parallel };

/// Edge-preserving smoothing: each channel is replaced by a Gaussian
/// spatial x Gaussian range weighted mean over a square window. Output stays
/// within the per-channel min/max of the input.
Population bilateral_filter(const Population& image, const kernels::BilateralSpec& spec,
                            Exec exec = Exec::parallel);

struct SmoothResult {
  LabelMap map;
  int passes = 0;
};

/// Absorbs 8-connected components smaller than min_area into the largest
/// adjacent component, repeating until none is left or a pass changes
/// nothing. Never introduces a new id (the output is not compacted).
SmoothResult morph_smooth_with_stats(const LabelMap& map, int min_area);
LabelMap morph_smooth(const LabelMap& map, int min_area);

/// max(1, round(fraction * pixels)); the pipeline default fraction is 0.001.
int default_min_area(std::size_t pixels, double fraction = 0.001);

// ---- rendering ------------------------------------------------------------

struct Segmentation {
  Population image;  ///< every pixel set to its cluster centre
  LabelMap labels;
};

Segmentation render_segmentation(const Population& image, const ClusterResult& clusters);

/// Paints a label map with the given centres (one per id).
Population paint_labels(const LabelMap& map, std::span<const OpinionVec> centres);

/// Label map over the image grid from per-agent labels.
LabelMap make_label_map(const Geometry& g, std::span<const int> labels);

}  // namespace dwseg
