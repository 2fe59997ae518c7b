#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dwseg/eval.hpp"
#include "dwseg/pipeline.hpp"
#include "dwseg/sim.hpp"

namespace dwseg::app {

enum ExitCode : int { kOk = 0, kValidation = 1, kIo = 2, kNonConvergence = 3 };

struct SegmentConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::string stem;           ///< output file stem; defaults to the input stem
  std::filesystem::path mask; ///< optional ground truth to score against
  Method method = Method::deffuant;
  PipelineConfig pipeline;
  bool eval_raw = false;      ///< score the pre-smoothing label map
};

struct SimulateConfig {
  SimParams sim;
  std::filesystem::path output = "trajectory.csv";
  double merge_tol = kDefaultMergeTol;
  double mass_floor = kDefaultMassFloor;
};

struct EvaluateConfig {
  std::filesystem::path pred_dir;  ///< *.labels files
  std::filesystem::path gt_dir;    ///< <stem>.png masks
  std::filesystem::path results = "results.txt";
  std::filesystem::path summary = "summary.json";
  Aggregation aggregation = Aggregation::mean_of_images;
};

struct BenchConfig {
  std::filesystem::path images_dir;
  std::filesystem::path masks_dir;
  std::filesystem::path output_dir = "bench_out";
  PipelineConfig pipeline;
  bool eval_raw = false;
  Aggregation aggregation = Aggregation::mean_of_images;
  int jobs = 0;  ///< 0: OpenMP default
};

/// The four rows of the comparison table, in output order.
struct BenchMethod {
  std::string name;  ///< table row label
  std::string dir;   ///< output subdirectory
  Method method;
  UpdateRule rule;
};
std::vector<BenchMethod> bench_methods();

int cmd_segment(const SegmentConfig& cfg, std::ostream& log);
int cmd_simulate(const SimulateConfig& cfg, std::ostream& log);
int cmd_evaluate(const EvaluateConfig& cfg, std::ostream& log);
int cmd_bench(const BenchConfig& cfg, std::ostream& log);
/// Writes the bundled synthetic dataset: images/<name>.png, masks/<name>.png.
int cmd_synth(const std::filesystem::path& out_dir, std::ostream& log);

// ---- config files and manifests ---------------------------------------------

/// Flat "key=value" lines; '#' starts a comment, blank lines are skipped,
/// surrounding whitespace is trimmed. Throws IoError / InvalidInput.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path);

/// Segment settings as key=value pairs; the keys are the long option names
/// of the segment subcommand, so a manifest can be passed back via --config.
std::vector<std::pair<std::string, std::string>> segment_settings(const SegmentConfig& cfg);

/// Formats a double so that parsing it back gives the same value.
std::string exact(double v);

/// Images under a directory with a .png/.jpg/.jpeg extension, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace dwseg::app
