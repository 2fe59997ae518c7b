#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "dwseg/app.hpp"
#include "dwseg/imaging.hpp"
#include "dwseg/synthetic.hpp"
#include "temp_dir.hpp"

using namespace dwseg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the dwseg binary with output discarded; returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DWSEG_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// Left half 0.2, right half 0.8 RGB.
fs::path write_two_tone(const TempDir& dir, const std::string& name) {
  const double tones[] = {0.2, 0.8};
  Population img = make_bands(Geometry{16, 12}, tones, 3);
  const fs::path p = dir / name;
  save_png(p, img);
  return p;
}

}  // namespace

TEST_CASE("segment of a two-tone image gives two labels") {
  TempDir dir("seg");
  app::SegmentConfig cfg;
  cfg.input = write_two_tone(dir, "tt.png");
  cfg.output_dir = dir / "out";
  cfg.pipeline.model.rule = UpdateRule::basic;
  std::ostringstream log;
  REQUIRE(app::cmd_segment(cfg, log) == app::kOk);
  const LabelMap labels = read_label_map(dir / "out" / "tt.labels");
  CHECK(labels.num_labels == 2);
  CHECK(labels.distinct_labels() == 2);
  CHECK(labels.at(0, 0) != labels.at(0, 15));
  const Population painted = load_image(dir / "out" / "tt.png");
  CHECK(painted[0][0] == doctest::Approx(0.2).epsilon(0.01));
  CHECK(fs::exists(dir / "out" / "tt.manifest"));
  CHECK(fs::exists(dir / "out" / "tt.timing"));
}

TEST_CASE("segment outputs are deterministic and a manifest replays them") {
  TempDir dir("det");
  const fs::path in = write_two_tone(dir, "img.png");
  const std::string cmd = "segment \"" + in.string() + "\" --rule neighbour --seed 11 -o \"" +
                          (dir / "a").string() + "\"";
  const char* exts[] = {".png", ".labels", ".manifest"};
  REQUIRE(run_cli(cmd) == 0);
  std::vector<std::string> first;
  for (const char* ext : exts) first.push_back(slurp(dir / "a" / (std::string("img") + ext)));
  REQUIRE(run_cli(cmd) == 0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(!first[k].empty());
    CHECK(first[k] == slurp(dir / "a" / (std::string("img") + exts[k])));
  }
  const fs::path manifest = dir / "a" / "img.manifest";
  REQUIRE(run_cli("segment \"" + in.string() + "\" --config \"" + manifest.string() + "\" -o \"" +
                  (dir / "c").string() + "\"") == 0);
  CHECK(slurp(dir / "a" / "img.labels") == slurp(dir / "c" / "img.labels"));
  CHECK(slurp(dir / "a" / "img.png") == slurp(dir / "c" / "img.png"));
}

TEST_CASE("config files") {
  TempDir dir("cfg");
  std::ofstream(dir / "c.cfg") << "# comment\n\n  mu = 0.25 \nrule=basic\n";
  const auto kv = app::read_config_file(dir / "c.cfg");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"mu", "0.25"});
  CHECK(kv[1].second == "basic");
  std::ofstream(dir / "bad.cfg") << "no equals sign\n";
  CHECK_THROWS(app::read_config_file(dir / "bad.cfg"));
  CHECK_THROWS(app::read_config_file(dir / "missing.cfg"));
  CHECK(std::stod(app::exact(0.1)) == 0.1);
  CHECK(std::stod(app::exact(1.0 / 3.0)) == 1.0 / 3.0);

  const fs::path in = write_two_tone(dir, "x.png");
  std::ofstream(dir / "unknown.cfg") << "frobnicate=3\n";
  CHECK(run_cli("segment \"" + in.string() + "\" --config \"" + (dir / "unknown.cfg").string() +
                "\" -o \"" + dir.path().string() + "\"") == app::kValidation);
}

TEST_CASE("evaluate scores label files against masks") {
  TempDir dir("eval");
  fs::create_directories(dir / "pred");
  fs::create_directories(dir / "gt");
  const BinaryMask gt{4, 4, {1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0}};
  const LabelMap pred{4, 4, 2, {0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0}};
  save_mask(dir / "gt" / "a.png", gt);
  write_label_map(dir / "pred" / "a.labels", pred);

  app::EvaluateConfig cfg;
  cfg.pred_dir = dir / "pred";
  cfg.gt_dir = dir / "gt";
  cfg.results = dir / "results.txt";
  cfg.summary = dir / "summary.json";
  std::ostringstream log;
  REQUIRE(app::cmd_evaluate(cfg, log) == app::kOk);
  const auto recs = read_results(cfg.results);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].name == "a");
  CHECK(recs[0].counts == ConfusionCounts{3, 2, 8, 3});

  fs::create_directories(dir / "empty");
  cfg.pred_dir = dir / "empty";
  CHECK(app::cmd_evaluate(cfg, log) != app::kOk);
  CHECK(run_cli("evaluate --pred \"" + (dir / "empty").string() + "\" --gt \"" +
                (dir / "gt").string() + "\"") == app::kIo);
}

TEST_CASE("bench on one image agrees with evaluate") {
  TempDir dir("bench");
  SyntheticSpec spec;
  spec.width = 40;
  spec.height = 32;
  spec.seed = 3;
  const auto s = make_two_region(spec);
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "masks");
  save_png(dir / "images" / "one.png", s.image);
  save_mask(dir / "masks" / "one.png", s.mask);

  app::BenchConfig bc;
  bc.images_dir = dir / "images";
  bc.masks_dir = dir / "masks";
  bc.output_dir = dir / "out";
  bc.pipeline.schedule.max_rounds = 91;
  std::ostringstream log;
  REQUIRE(app::cmd_bench(bc, log) == app::kOk);
  CHECK(fs::exists(dir / "out" / "table.txt"));
  const auto doc = nlohmann::json::parse(slurp(dir / "out" / "bench.json"));
  REQUIRE(doc["methods"].size() == 4);

  for (const auto& m : app::bench_methods()) {
    app::EvaluateConfig ec;
    ec.pred_dir = dir / "out" / m.dir;
    ec.gt_dir = dir / "masks";
    ec.results = dir / (m.dir + "_results.txt");
    ec.summary = dir / (m.dir + "_summary.json");
    REQUIRE(app::cmd_evaluate(ec, log) == app::kOk);
    const auto a = read_results(ec.results);
    const auto b = read_results(dir / "out" / m.dir / "results.txt");
    REQUIRE(a.size() == 1);
    REQUIRE(b.size() == 1);
    CHECK(a[0].counts == b[0].counts);
  }
}

TEST_CASE("binary exit codes") {
  TempDir dir("exit");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == app::kValidation);
  CHECK(run_cli("segment \"" + (dir / "nope.png").string() + "\"") == app::kIo);
  const fs::path in = write_two_tone(dir, "x.png");
  CHECK(run_cli("segment \"" + in.string() + "\" --mu 0.9 -o \"" + dir.path().string() + "\"") ==
        app::kValidation);
  SyntheticSpec spec;
  spec.width = 24;
  spec.height = 20;
  spec.noise_sigma = 0.1;
  save_png(dir / "noisy.png", make_two_region(spec).image);
  CHECK(run_cli("segment \"" + (dir / "noisy.png").string() +
                "\" --no-prefilter --max-sweeps 1 --rule basic -o \"" + dir.path().string() +
                "\"") == app::kNonConvergence);
  CHECK(run_cli("simulate -n 50 --epsilon 0.3 -o \"" + (dir / "t.csv").string() + "\"") == 0);
  CHECK(fs::exists(dir / "t.csv"));
}

TEST_CASE("bundled synthetic data matches the generator") {
  const fs::path data = fs::path(DWSEG_DATA_DIR) / "synthetic";
  for (const SyntheticSpec& spec : bundled_dataset()) {
    const auto s = make_two_region(spec);
    const Population disk = load_image(data / "images" / (spec.name + ".png"));
    REQUIRE(disk.grid() == s.image.grid());
    for (std::size_t i = 0; i < disk.values().size(); ++i) {
      REQUIRE(to_byte(disk.values()[i]) == to_byte(s.image.values()[i]));
    }
    CHECK(load_mask(data / "masks" / (spec.name + ".png")) == s.mask);
  }
}
