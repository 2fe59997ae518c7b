// dwseg command-line front end: segment, simulate, evaluate, bench, synth.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dwseg/app.hpp"
#include "dwseg/error.hpp"

namespace {

using dwseg::app::kValidation;

void add_model_options(CLI::App* sub, dwseg::PipelineConfig& p, std::string& rule) {
  sub->add_option("--clusters,-c", p.schedule.target_c, "Target cluster count")
      ->capture_default_str();
  sub->add_option("--epsilon0", p.schedule.epsilon_0, "Initial confidence threshold")
      ->capture_default_str();
  sub->add_option("--delta-epsilon", p.schedule.delta_epsilon, "Threshold increment per round")
      ->capture_default_str();
  sub->add_option("--max-rounds", p.schedule.max_rounds,
                  "Scheduler round limit (0: run until epsilon reaches 1)")
      ->capture_default_str();
  sub->add_option("--merge-tol", p.schedule.merge_tol, "Chebyshev merge tolerance")
      ->capture_default_str();
  sub->add_option("--mass-floor", p.schedule.mass_floor, "Minor-cluster mass floor")
      ->capture_default_str();
  sub->add_option("--mu", p.model.mu, "Convergence parameter in (0, 0.5]")->capture_default_str();
  sub->add_option("--rule", rule, "Update rule")
      ->check(CLI::IsMember({"basic", "distance", "neighbour"}))
      ->capture_default_str();
  sub->add_option("--connectivity", p.model.connectivity, "Neighbourhood (4 or 8)")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  sub->add_option("--minkowski-k", p.model.minkowski_k, "Minkowski order (> 1)")
      ->capture_default_str();
  sub->add_option("--conv-tol", p.model.conv_tol, "Per-sweep convergence tolerance")
      ->capture_default_str();
  sub->add_option("--max-sweeps", p.model.max_sweeps, "Sweep limit per model run")
      ->capture_default_str();
  sub->add_option("--seed", p.model.seed, "RNG seed")->capture_default_str();
  sub->add_flag("--no-prefilter", "Skip the bilateral pre-filter");
  sub->add_option("--sigma-spatial", p.bilateral.sigma_spatial, "Bilateral spatial sigma (px)")
      ->capture_default_str();
  sub->add_option("--sigma-range", p.bilateral.sigma_range, "Bilateral range sigma")
      ->capture_default_str();
  sub->add_option("--filter-radius", p.bilateral.radius,
                  "Bilateral window radius (px, default 3 * sigma-spatial)");
  sub->add_flag("--no-postsmooth", "Skip small-component absorption");
  sub->add_option("--min-area", p.min_area, "Smallest kept component (0: 0.1% of pixels)")
      ->capture_default_str();
  sub->add_flag("--eval-raw", "Score the label map before post-smoothing");
  sub->add_flag("--serial", "Use the serial reference kernels");
}

// Applies flags and derived defaults after parsing.
void finish_pipeline(CLI::App* sub, dwseg::PipelineConfig& p, const std::string& rule) {
  p.model.rule = dwseg::parse_update_rule(rule);
  p.prefilter = !sub->get_option("--no-prefilter")->as<bool>();
  p.postsmooth = !sub->get_option("--no-postsmooth")->as<bool>();
  p.exec = sub->get_option("--serial")->as<bool>() ? dwseg::Exec::serial : dwseg::Exec::parallel;
  if (sub->get_option("--filter-radius")->empty()) {
    p.bilateral.radius = static_cast<int>(std::lround(3.0 * p.bilateral.sigma_spatial));
  }
  if (p.schedule.max_rounds == 0) {
    p.schedule.max_rounds = dwseg::ScheduleParams::rounds_to_unit_epsilon(
        p.schedule.epsilon_0, p.schedule.delta_epsilon);
  }
}

// Splices `--config FILE` entries in as leading "--key=value" arguments of the
// subcommand; later command-line occurrences win under TakeLast.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  if (args.size() < 2) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args[1]);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::vector<std::string> config_paths;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_paths.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_paths.push_back(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  std::vector<std::string> out{args[0], args[1]};
  for (const auto& path : config_paths) {
    for (const auto& [key, value] : dwseg::app::read_config_file(path)) {
      if (key.rfind("result-", 0) == 0) continue;  // manifest outputs
      if (sub->get_option_no_throw("--" + key) == nullptr) {
        throw dwseg::InvalidInput("unknown key '" + key + "' in config file " + path);
      }
      out.push_back("--" + key + "=" + value);
    }
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Image segmentation by bounded-confidence opinion dynamics"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  // segment
  dwseg::app::SegmentConfig seg;
  seg.pipeline.schedule.max_rounds = 0;
  std::string seg_rule = "neighbour";
  std::string seg_method = "deffuant";
  auto* segment = app.add_subcommand("segment", "Segment one image");
  // The positional wins over --input so a replayed manifest can be pointed at
  // another image.
  std::filesystem::path seg_positional;
  auto* seg_pos = segment->add_option("image", seg_positional, "Input PNG/JPEG");
  auto* seg_in = segment->add_option("--input", seg.input, "Input PNG/JPEG");
  segment->callback([&] {
    if (!seg_pos->empty()) seg.input = seg_positional;
    if (seg_pos->empty() && seg_in->empty()) {
      throw CLI::RequiredError("an input image (positional or --input)");
    }
  });
  segment->add_option("--output-dir,-o", seg.output_dir, "Output directory")
      ->capture_default_str();
  segment->add_option("--stem", seg.stem, "Output file stem (default: input stem)");
  segment->add_option("--mask", seg.mask, "Ground-truth mask PNG to score against");
  segment->add_option("--method", seg_method, "deffuant or kmeans")
      ->check(CLI::IsMember({"deffuant", "kmeans"}))
      ->capture_default_str();
  add_model_options(segment, seg.pipeline, seg_rule);
  segment->add_option("--config", "key=value config file (flags override it)");

  // simulate
  dwseg::app::SimulateConfig sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a 1-D opinion population");
  simulate->add_option("--agents,-n", sim.sim.agents, "Number of agents")->capture_default_str();
  simulate->add_option("--epsilon", sim.sim.epsilon, "Confidence threshold")->capture_default_str();
  simulate->add_option("--mu", sim.sim.mu, "Convergence parameter")->capture_default_str();
  simulate->add_option("--max-sweeps", sim.sim.max_sweeps, "Sweep limit")->capture_default_str();
  simulate->add_option("--snapshot-every", sim.sim.snapshot_every, "Snapshot cadence (sweeps)")
      ->capture_default_str();
  simulate->add_option("--conv-tol", sim.sim.conv_tol, "Convergence tolerance")
      ->capture_default_str();
  simulate->add_option("--seed", sim.sim.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--merge-tol", sim.merge_tol, "Cluster merge tolerance")
      ->capture_default_str();
  simulate->add_option("--mass-floor", sim.mass_floor, "Minor-cluster mass floor")
      ->capture_default_str();
  simulate->add_option("--out,-o", sim.output, "Trajectory CSV path")->capture_default_str();
  simulate->add_option("--config", "key=value config file (flags override it)");

  // evaluate
  dwseg::app::EvaluateConfig ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score label maps against ground-truth masks");
  evaluate->add_option("--pred", ev.pred_dir, "Directory of <stem>.labels files")->required();
  evaluate->add_option("--gt", ev.gt_dir, "Directory of <stem>.png masks")->required();
  evaluate->add_option("--results", ev.results, "Per-image results file")->capture_default_str();
  evaluate->add_option("--summary", ev.summary, "JSON summary file")->capture_default_str();
  evaluate->add_flag("--pooled", "Headline aggregate pools pixels instead of averaging images");
  evaluate->add_option("--config", "key=value config file (flags override it)");

  // bench
  dwseg::app::BenchConfig bench;
  bench.pipeline.schedule.max_rounds = 0;
  std::string bench_rule = "basic";
  auto* bench_cmd = app.add_subcommand("bench", "Compare all methods on a dataset");
  bench_cmd->add_option("--images", bench.images_dir, "Directory of input images")->required();
  bench_cmd->add_option("--masks", bench.masks_dir, "Directory of <stem>.png masks")->required();
  bench_cmd->add_option("--out,-o", bench.output_dir, "Output directory")->capture_default_str();
  bench_cmd->add_option("--jobs,-j", bench.jobs, "Worker threads (0: all cores)")
      ->capture_default_str();
  bench_cmd->add_flag("--pooled", "Aggregate by pooling pixels instead of averaging images");
  add_model_options(bench_cmd, bench.pipeline, bench_rule);
  bench_cmd->get_option("--rule")->description("Ignored: every rule is benchmarked");
  bench_cmd->add_option("--config", "key=value config file (flags override it)");

  // synth
  std::filesystem::path synth_out = "data/synthetic";
  auto* synth = app.add_subcommand("synth", "Write the bundled synthetic dataset");
  synth->add_option("--out,-o", synth_out, "Output directory")->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(app, std::move(args));
  } catch (const dwseg::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dwseg::app::kIo;
  } catch (const dwseg::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kValidation;
  }

  try {
    if (segment->parsed()) {
      finish_pipeline(segment, seg.pipeline, seg_rule);
      seg.method = seg_method == "kmeans" ? dwseg::Method::kmeans : dwseg::Method::deffuant;
      seg.eval_raw = segment->get_option("--eval-raw")->as<bool>();
      return dwseg::app::cmd_segment(seg, std::cout);
    }
    if (simulate->parsed()) return dwseg::app::cmd_simulate(sim, std::cout);
    if (evaluate->parsed()) {
      if (evaluate->get_option("--pooled")->as<bool>()) {
        ev.aggregation = dwseg::Aggregation::pooled_pixels;
      }
      return dwseg::app::cmd_evaluate(ev, std::cout);
    }
    if (bench_cmd->parsed()) {
      finish_pipeline(bench_cmd, bench.pipeline, bench_rule);
      bench.eval_raw = bench_cmd->get_option("--eval-raw")->as<bool>();
      if (bench_cmd->get_option("--pooled")->as<bool>()) {
        bench.aggregation = dwseg::Aggregation::pooled_pixels;
      }
      return dwseg::app::cmd_bench(bench, std::cout);
    }
    if (synth->parsed()) return dwseg::app::cmd_synth(synth_out, std::cout);
  } catch (const dwseg::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}
