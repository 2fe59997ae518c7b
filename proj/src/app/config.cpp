#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dwseg/app.hpp"
#include "dwseg/error.hpp"

namespace dwseg::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string boolean(bool v) { return v ? "true" : "false"; }

}  // namespace

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) +
                         ": expected key=value, got '" + t + "'");
    }
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InvalidInput(path.string() + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), trim(t.substr(eq + 1)));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> segment_settings(const SegmentConfig& cfg) {
  const auto& p = cfg.pipeline;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"input", cfg.input.string()},
      {"output-dir", cfg.output_dir.string()},
      {"stem", cfg.stem},
      {"method", cfg.method == Method::kmeans ? "kmeans" : "deffuant"},
      {"clusters", std::to_string(p.schedule.target_c)},
      {"epsilon0", exact(p.schedule.epsilon_0)},
      {"delta-epsilon", exact(p.schedule.delta_epsilon)},
      {"max-rounds", std::to_string(p.schedule.max_rounds)},
      {"merge-tol", exact(p.schedule.merge_tol)},
      {"mass-floor", exact(p.schedule.mass_floor)},
      {"mu", exact(p.model.mu)},
      {"rule", std::string(to_string(p.model.rule))},
      {"connectivity", std::to_string(p.model.connectivity)},
      {"minkowski-k", exact(p.model.minkowski_k)},
      {"conv-tol", exact(p.model.conv_tol)},
      {"max-sweeps", std::to_string(p.model.max_sweeps)},
      {"seed", std::to_string(p.model.seed)},
      {"no-prefilter", boolean(!p.prefilter)},
      {"sigma-spatial", exact(p.bilateral.sigma_spatial)},
      {"sigma-range", exact(p.bilateral.sigma_range)},
      {"filter-radius", std::to_string(p.bilateral.radius)},
      {"no-postsmooth", boolean(!p.postsmooth)},
      {"min-area", std::to_string(p.min_area)},
      {"eval-raw", boolean(cfg.eval_raw)},
  };
  if (!cfg.mask.empty()) kv.emplace_back("mask", cfg.mask.string());
  return kv;
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("not a directory: '" + dir.string() + "'");
  }
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dwseg::app
