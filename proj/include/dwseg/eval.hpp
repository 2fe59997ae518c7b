#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwseg/raster.hpp"

namespace dwseg {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// A ratio with a zero denominator is empty, never 0.
struct Metrics {
  std::optional<double> recall;
  std::optional<double> fallout;
  std::optional<double> accuracy;
};

/// Picks the object/background reading of a label map that best matches gt.
/// One or two labels: the better of the two complementary assignments by
/// accuracy (ties keep the lowest id as background). More labels: each label is
/// object when most of its pixels are object in gt.
BinaryMask to_binary_mask(const LabelMap& map, const BinaryMask& gt);

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

/// accuracy = (tp+tn)/total, recall = tp/(tp+fn), fallout = fp/(fp+tn).
/// Throws InvalidInput when total == 0.
Metrics metrics(const ConfusionCounts& c);

enum class Aggregation { mean_of_images, pooled_pixels };

/// mean_of_images averages each metric over the images where it is defined;
/// pooled_pixels sums the confusion counts first. Throws on an empty set.
Metrics aggregate(std::span<const ConfusionCounts> per_image,
                  Aggregation how = Aggregation::mean_of_images);

struct ImageRecord {
  std::string name;
  ConfusionCounts counts;
  Metrics metrics;
};

/// Line-oriented per-image results: a '#' header naming the columns, then one
/// whitespace-separated record per image
///   path tp fp tn fn recall fallout accuracy
/// with undefined ratios written as "undef".
void write_results(const std::filesystem::path& path, std::span<const ImageRecord> records);
std::vector<ImageRecord> read_results(const std::filesystem::path& path);

/// Machine-readable JSON summary with the per-image records and both
/// aggregates.
void write_summary_json(const std::filesystem::path& path, std::span<const ImageRecord> records,
                        Aggregation primary);

std::string format_ratio(const std::optional<double>& v);

}  // namespace dwseg
