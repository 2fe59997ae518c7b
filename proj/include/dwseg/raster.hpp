#pragma once

#include <cstdint>
#include <vector>

namespace dwseg {

/// Per-pixel cluster ids, row-major.
struct LabelMap {
  int width = 0;
  int height = 0;
  int num_labels = 0;  ///< ids lie in [0, num_labels)
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  int at(int row, int col) const noexcept { return labels[static_cast<std::size_t>(row) * width + col]; }

  /// Renumbers ids to 0..k-1 in order of first appearance by increasing old
  /// id, dropping ids that no longer occur.
  LabelMap compacted() const;
  /// Number of distinct ids actually present.
  int distinct_labels() const;
  /// Throws InvalidInput if dimensions or id range are inconsistent.
  void validate() const;

  bool operator==(const LabelMap&) const = default;
};

/// Object/background mask, row-major; nonzero means object.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  bool object(std::size_t i) const noexcept { return bits[i] != 0; }

  bool operator==(const BinaryMask&) const = default;
};

}  // namespace dwseg
