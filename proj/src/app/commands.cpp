#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"

#include "dwseg/app.hpp"
#include "dwseg/error.hpp"
#include "dwseg/imaging.hpp"
#include "dwseg/synthetic.hpp"

namespace dwseg::app {

namespace {

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidInput& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InvariantViolation& e) {
    log << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "undef";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << *v * 100.0 << '%';
  return s.str();
}

struct Scored {
  ConfusionCounts counts;
  Metrics metrics;
};

Scored score(const LabelMap& labels, const BinaryMask& gt) {
  const ConfusionCounts c = confusion(to_binary_mask(labels, gt), gt);
  return {c, metrics(c)};
}

}  // namespace

std::vector<BenchMethod> bench_methods() {
  return {{"K-Means", "kmeans", Method::kmeans, UpdateRule::basic},
          {"Deffuant", "deffuant", Method::deffuant, UpdateRule::basic},
          {"Deffuant-Distance", "deffuant_distance", Method::deffuant, UpdateRule::distance},
          {"Deffuant-Neighbour", "deffuant_neighbour", Method::deffuant, UpdateRule::neighbour}};
}

int cmd_segment(const SegmentConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const auto t0 = std::chrono::steady_clock::now();
    require(!cfg.input.empty(), "segment needs an input image");
    const Population image = load_image(cfg.input);
    const PipelineOutput out = run_pipeline(image, cfg.pipeline, cfg.method);
    const std::string stem = cfg.stem.empty() ? cfg.input.stem().string() : cfg.stem;

    const auto png = cfg.output_dir / (stem + ".png");
    const auto labels = cfg.output_dir / (stem + ".labels");
    save_png(png, out.painted);
    write_label_map(labels, out.labels);

    SegmentConfig echo = cfg;
    echo.stem = stem;
    std::ostringstream manifest;
    manifest << "# dwseg segment run manifest; replay with: dwseg segment --config <this file>\n";
    for (const auto& [k, v] : segment_settings(echo)) manifest << k << '=' << v << '\n';

    const bool converged = out.converged();
    if (out.schedule) {
      const auto& s = *out.schedule;
      std::ostringstream sweeps, counts;
      for (std::size_t i = 0; i < s.rounds.size(); ++i) {
        sweeps << (i ? "," : "") << s.rounds[i].sweeps;
        counts << (i ? "," : "") << s.rounds[i].headline_count;
      }
      manifest << "result-epsilon-final=" << exact(s.epsilon_final) << '\n'
               << "result-rounds=" << s.rounds.size() << '\n'
               << "result-round-sweeps=" << sweeps.str() << '\n'
               << "result-round-counts=" << counts.str() << '\n'
               << "result-sweeps-total=" << s.total_sweeps() << '\n'
               << "result-headline-clusters=" << s.clusters.headline_count << '\n'
               << "result-minor-clusters=" << s.clusters.minor_count() << '\n'
               << "result-reached-target=" << (s.reached_target ? "true" : "false") << '\n'
               << "result-overshoot=" << (s.overshoot ? "true" : "false") << '\n';
    } else {
      manifest << "result-kmeans-iterations=" << out.kmeans->iterations << '\n'
               << "result-headline-clusters=" << out.kmeans->clusters.headline_count << '\n';
    }
    manifest << "result-converged=" << (converged ? "true" : "false") << '\n'
             << "result-min-area=" << out.min_area << '\n'
             << "result-output-labels=" << out.labels.num_labels << '\n';

    if (!cfg.mask.empty()) {
      const BinaryMask gt = load_mask(cfg.mask);
      const Scored s = score(cfg.eval_raw ? out.raw.labels : out.labels, gt);
      manifest << "result-tp=" << s.counts.tp << '\n'
               << "result-fp=" << s.counts.fp << '\n'
               << "result-tn=" << s.counts.tn << '\n'
               << "result-fn=" << s.counts.fn << '\n'
               << "result-recall=" << format_ratio(s.metrics.recall) << '\n'
               << "result-fallout=" << format_ratio(s.metrics.fallout) << '\n'
               << "result-accuracy=" << format_ratio(s.metrics.accuracy) << '\n';
      log << "accuracy " << format_ratio(s.metrics.accuracy) << " recall "
          << format_ratio(s.metrics.recall) << " fallout " << format_ratio(s.metrics.fallout)
          << '\n';
    }
    write_text(cfg.output_dir / (stem + ".manifest"), manifest.str());

    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    write_text(cfg.output_dir / (stem + ".timing"), "wall-ms=" + exact(wall_ms) + '\n');

    log << stem << ": " << out.labels.num_labels << " labels";
    if (out.schedule) {
      log << ", epsilon " << out.schedule->epsilon_final << " after "
          << out.schedule->rounds.size() << " rounds";
    }
    log << ", " << std::fixed << std::setprecision(1) << wall_ms << " ms"
        << (converged ? "" : " (not converged)") << '\n';
    log.unsetf(std::ios::floatfield);
    return converged ? kOk : kNonConvergence;
  });
}

int cmd_simulate(const SimulateConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Trajectory traj = simulate_population(cfg.sim);
    write_trajectory_csv(cfg.output, traj);
    const ClusterResult clusters = count_clusters(
        Population::scalar(traj.final_state().opinions), cfg.merge_tol, cfg.mass_floor);
    std::vector<double> centres;
    for (std::size_t k = 0; k < clusters.headline_count; ++k) centres.push_back(clusters.centres[k][0]);
    std::sort(centres.begin(), centres.end());
    log << "agents=" << cfg.sim.agents << " epsilon=" << cfg.sim.epsilon << " mu=" << cfg.sim.mu
        << " sweeps=" << traj.sweeps_used << " converged=" << (traj.converged ? "true" : "false")
        << " clusters=" << clusters.headline_count << " minor=" << clusters.minor_count()
        << " expected=" << expected_cluster_count(cfg.sim.epsilon) << " centres=";
    for (std::size_t i = 0; i < centres.size(); ++i) log << (i ? "," : "") << centres[i];
    log << '\n';
    return traj.converged ? kOk : kNonConvergence;
  });
}

int cmd_evaluate(const EvaluateConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    if (!std::filesystem::is_directory(cfg.pred_dir)) {
      throw IoError("prediction directory '" + cfg.pred_dir.string() + "' does not exist");
    }
    if (!std::filesystem::is_directory(cfg.gt_dir)) {
      throw IoError("ground-truth directory '" + cfg.gt_dir.string() + "' does not exist");
    }
    std::vector<std::filesystem::path> preds;
    for (const auto& e : std::filesystem::directory_iterator(cfg.pred_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".labels") preds.push_back(e.path());
    }
    std::sort(preds.begin(), preds.end());
    if (preds.empty()) {
      throw IoError("no .labels files in '" + cfg.pred_dir.string() + "'");
    }

    std::vector<ImageRecord> records;
    int missing = 0;
    for (const auto& pred : preds) {
      const std::string stem = pred.stem().string();
      const auto gt_path = cfg.gt_dir / (stem + ".png");
      if (!std::filesystem::is_regular_file(gt_path)) {
        log << "warning: no ground truth for " << pred.filename().string() << " (expected "
            << gt_path.string() << ")\n";
        ++missing;
        continue;
      }
      try {
        const Scored s = score(read_label_map(pred), load_mask(gt_path));
        records.push_back({stem, s.counts, s.metrics});
      } catch (const std::exception& e) {
        log << "warning: skipping " << stem << ": " << e.what() << '\n';
        ++missing;
      }
    }
    for (const auto& gt : list_images(cfg.gt_dir)) {
      if (!std::filesystem::exists(cfg.pred_dir / (gt.stem().string() + ".labels"))) {
        log << "warning: no prediction for ground truth " << gt.filename().string() << '\n';
      }
    }
    if (records.empty()) throw IoError("no prediction/ground-truth pairs could be scored");

    write_results(cfg.results, records);
    write_summary_json(cfg.summary, records, cfg.aggregation);
    std::vector<ConfusionCounts> counts;
    for (const auto& r : records) counts.push_back(r.counts);
    const Metrics agg = aggregate(counts, cfg.aggregation);
    log << "evaluated " << records.size() << " images (" << missing << " skipped): recall "
        << format_ratio(agg.recall) << " fallout " << format_ratio(agg.fallout) << " accuracy "
        << format_ratio(agg.accuracy) << '\n';
    return kOk;
  });
}

int cmd_bench(const BenchConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const auto images = list_images(cfg.images_dir);
    if (images.empty()) throw IoError("no images in '" + cfg.images_dir.string() + "'");
    if (!std::filesystem::is_directory(cfg.masks_dir)) {
      throw IoError("mask directory '" + cfg.masks_dir.string() + "' does not exist");
    }
    const auto methods = bench_methods();
    const std::size_t n_img = images.size();
    const std::size_t n_jobs = n_img * methods.size();

    struct Outcome {
      bool ok = false;
      std::string error;
      Scored scored;
      bool converged = false;
      double epsilon_final = 0.0;
      LabelMap labels;
    };
    std::vector<Outcome> outcomes(n_jobs);

#ifdef _OPENMP
    const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::ptrdiff_t job = 0; job < static_cast<std::ptrdiff_t>(n_jobs); ++job) {
      const std::size_t img = static_cast<std::size_t>(job) / methods.size();
      const BenchMethod& m = methods[static_cast<std::size_t>(job) % methods.size()];
      Outcome& o = outcomes[static_cast<std::size_t>(job)];
      try {
        const auto mask_path = cfg.masks_dir / (images[img].stem().string() + ".png");
        const BinaryMask gt = load_mask(mask_path);
        const Population image = load_image(images[img]);
        PipelineConfig pc = cfg.pipeline;
        pc.model.rule = m.rule;
        const PipelineOutput out = run_pipeline(image, pc, m.method);
        o.scored = score(cfg.eval_raw ? out.raw.labels : out.labels, gt);
        o.labels = cfg.eval_raw ? out.raw.labels : out.labels;
        o.converged = out.converged();
        if (out.schedule) o.epsilon_final = out.schedule->epsilon_final;
        o.ok = true;
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }

    std::ostringstream table;
    table << "| Name               | Recall  | Fallout | Accuracy | Images |\n"
          << "|--------------------|---------|---------|----------|--------|\n";
    nlohmann::json doc;
    doc["aggregation"] =
        cfg.aggregation == Aggregation::mean_of_images ? "mean_of_images" : "pooled_pixels";
    doc["evaluated"] = cfg.eval_raw ? "raw" : "post-smoothing";
    doc["methods"] = nlohmann::json::array();
    int failures = 0;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const BenchMethod& m = methods[mi];
      std::vector<ImageRecord> records;
      nlohmann::json jm{{"name", m.name}, {"failed", nlohmann::json::array()}};
      for (std::size_t img = 0; img < n_img; ++img) {
        const Outcome& o = outcomes[img * methods.size() + mi];
        const std::string stem = images[img].stem().string();
        if (!o.ok) {
          log << "warning: " << m.name << " failed on " << stem << ": " << o.error << '\n';
          jm["failed"].push_back({{"image", stem}, {"error", o.error}});
          ++failures;
          continue;
        }
        write_label_map(cfg.output_dir / m.dir / (stem + ".labels"), o.labels);
        records.push_back({stem, o.scored.counts, o.scored.metrics});
        if (!o.converged) log << "note: " << m.name << " did not converge on " << stem << '\n';
      }
      table << "| " << std::left << std::setw(19) << m.name;
      if (records.empty()) {
        table << "| undef   | undef   | undef    | 0      |\n";
        jm["images"] = 0;
      } else {
        write_results(cfg.output_dir / m.dir / "results.txt", records);
        std::vector<ConfusionCounts> counts;
        for (const auto& r : records) counts.push_back(r.counts);
        const Metrics agg = aggregate(counts, cfg.aggregation);
        table << "| " << std::setw(8) << percent(agg.recall) << "| " << std::setw(8)
              << percent(agg.fallout) << "| " << std::setw(9) << percent(agg.accuracy) << "| "
              << std::setw(7) << records.size() << "|\n";
        jm["images"] = records.size();
        jm["recall"] = agg.recall ? nlohmann::json(*agg.recall) : nlohmann::json(nullptr);
        jm["fallout"] = agg.fallout ? nlohmann::json(*agg.fallout) : nlohmann::json(nullptr);
        jm["accuracy"] = agg.accuracy ? nlohmann::json(*agg.accuracy) : nlohmann::json(nullptr);
      }
      table << std::right;
      doc["methods"].push_back(std::move(jm));
    }
    table << "\n" << n_img << " images, " << failures << " failed runs excluded\n";
    doc["images"] = n_img;
    doc["failed_runs"] = failures;

    write_text(cfg.output_dir / "table.txt", table.str());
    write_text(cfg.output_dir / "bench.json", doc.dump(2) + "\n");
    log << table.str();
    return kOk;
  });
}

int cmd_synth(const std::filesystem::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    for (const auto& spec : bundled_dataset()) {
      const SyntheticImage s = make_two_region(spec);
      save_png(out_dir / "images" / (spec.name + ".png"), s.image);
      save_mask(out_dir / "masks" / (spec.name + ".png"), s.mask);
      log << "wrote " << spec.name << " (" << spec.width << "x" << spec.height << ")\n";
    }
    return kOk;
  });
}

}  // namespace dwseg::app
