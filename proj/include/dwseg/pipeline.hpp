#pragma once

#include <optional>

#include "dwseg/cluster.hpp"
#include "dwseg/imaging.hpp"
#include "dwseg/kmeans.hpp"
#include "dwseg/opinion.hpp"

namespace dwseg {

/// Everything a single-image segmentation needs. Defaults follow the
/// two-cluster protocol: c = 2, epsilon_0 = 0.1, delta_epsilon = 0.01.
struct PipelineConfig {
  ModelParams model;
  ScheduleParams schedule;
  bool prefilter = true;
  kernels::BilateralSpec bilateral{3.0, 0.1, 9};
  bool postsmooth = true;
  int min_area = 0;  ///< 0 means default_min_area(pixels)
  Exec exec = Exec::parallel;

  void validate() const;
};

enum class Method { deffuant, kmeans };

struct PipelineOutput {
  Segmentation raw;        ///< straight from the clustering step
  LabelMap labels;         ///< after post-smoothing (== raw.labels when disabled), compacted
  Population painted;      ///< `labels` painted with the cluster centres
  std::vector<OpinionVec> centres;  ///< indexed by `labels` ids
  std::optional<ScheduleResult> schedule;
  std::optional<KMeansResult> kmeans;
  int min_area = 0;

  /// Whether the clustering step met its own stopping rule.
  bool converged() const;
};

/// pre-filter -> cluster (epsilon schedule or k-means) -> render -> smooth.
PipelineOutput run_pipeline(const Population& image, const PipelineConfig& config,
                            Method method = Method::deffuant);

}  // namespace dwseg
