#include "dwseg/pipeline.hpp"

#include <map>

#include "dwseg/error.hpp"

namespace dwseg {

void PipelineConfig::validate() const {
  model.validate();
  schedule.validate();
  require(min_area >= 0, "min_area must be >= 0");
  if (prefilter) {
    require(bilateral.sigma_spatial > 0.0, "sigma_spatial must be > 0");
    require(bilateral.sigma_range > 0.0, "sigma_range must be > 0");
    require(bilateral.radius >= 0, "filter radius must be >= 0");
  }
}

bool PipelineOutput::converged() const {
  if (schedule) {
    return schedule->reached_target && !schedule->rounds.empty() &&
           schedule->rounds.back().converged;
  }
  if (kmeans) return kmeans->converged;
  return false;
}

PipelineOutput run_pipeline(const Population& image, const PipelineConfig& config,
                            Method method) {
  config.validate();
  require(image.has_geometry(), "segmentation input must be an image");

  const Population filtered =
      config.prefilter ? bilateral_filter(image, config.bilateral, config.exec) : image;

  PipelineOutput out;
  const ClusterResult* clusters = nullptr;
  if (method == Method::deffuant) {
    out.schedule = schedule_epsilon(filtered, config.schedule, config.model);
    clusters = &out.schedule->clusters;
    out.raw = render_segmentation(out.schedule->image, *clusters);
  } else {
    KMeansParams kp;
    kp.c = config.schedule.target_c;
    kp.seed = config.model.seed;
    kp.exec = config.exec;
    out.kmeans = kmeans(filtered, kp);
    clusters = &out.kmeans->clusters;
    out.raw = render_segmentation(filtered, *clusters);
  }

  out.min_area = config.min_area > 0 ? config.min_area : default_min_area(image.size());
  LabelMap smoothed = config.postsmooth ? morph_smooth(out.raw.labels, out.min_area)
                                        : out.raw.labels;
  // Compact ids and carry the centres along.
  std::map<int, int> remap;
  for (int id : smoothed.labels) remap.emplace(id, 0);
  int next = 0;
  for (auto& [id, to] : remap) {
    to = next++;
    out.centres.push_back(clusters->centres[static_cast<std::size_t>(id)]);
  }
  out.labels = smoothed.compacted();
  out.painted = paint_labels(out.labels, out.centres);
  return out;
}

}  // namespace dwseg
