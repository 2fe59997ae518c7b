#include "dwseg/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "dwseg/error.hpp"
#include "dwseg/union_find.hpp"

namespace dwseg {

namespace {

cv::Mat read_raster(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw IoError("cannot read image '" + path.string() + "': no such file");
  }
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw IoError("cannot decode image '" + path.string() + "': " + e.what());
  }
  if (m.empty()) throw IoError("cannot decode image '" + path.string() + "'");
  return m;
}

double sample_scale(const cv::Mat& m, const std::filesystem::path& path) {
  switch (m.depth()) {
    case CV_8U: return 1.0 / 255.0;
    case CV_16U: return 1.0 / 65535.0;
    default: throw IoError("unsupported sample depth in '" + path.string() + "'");
  }
}

double sample_at(const cv::Mat& m, int r, int c, int ch) {
  if (m.depth() == CV_8U) return m.ptr<std::uint8_t>(r)[c * m.channels() + ch];
  return m.ptr<std::uint16_t>(r)[c * m.channels() + ch];
}

void write_raster(const std::filesystem::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m, {cv::IMWRITE_PNG_COMPRESSION, 6});
  } catch (const cv::Exception& e) {
    throw IoError("cannot write '" + path.string() + "': " + e.what());
  }
  if (!ok) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace

Population load_image(const std::filesystem::path& path) {
  const cv::Mat m = read_raster(path);
  const double scale = sample_scale(m, path);
  const int ch = m.channels();
  const std::size_t dim = ch >= 3 ? 3 : 1;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(m.rows) * m.cols * dim);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (dim == 3) {
        // OpenCV stores BGR(A).
        values.push_back(sample_at(m, r, c, 2) * scale);
        values.push_back(sample_at(m, r, c, 1) * scale);
        values.push_back(sample_at(m, r, c, 0) * scale);
      } else {
        values.push_back(sample_at(m, r, c, 0) * scale);
      }
    }
  }
  return Population(Geometry{m.cols, m.rows}, dim, std::move(values));
}

std::uint8_t to_byte(double v) noexcept {
  const double scaled = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(scaled);
}

void save_png(const std::filesystem::path& path, const Population& image) {
  const Geometry& g = image.grid();
  const std::size_t dim = image.dim();
  require(dim == 1 || dim == 3, "only 1- or 3-channel images can be written as PNG");
  cv::Mat m(g.height, g.width, dim == 3 ? CV_8UC3 : CV_8UC1);
  for (int r = 0; r < g.height; ++r) {
    auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < g.width; ++c) {
      const auto o = image[static_cast<std::size_t>(r) * g.width + c];
      if (dim == 3) {
        row[3 * c + 0] = to_byte(o[2]);
        row[3 * c + 1] = to_byte(o[1]);
        row[3 * c + 2] = to_byte(o[0]);
      } else {
        row[c] = to_byte(o[0]);
      }
    }
  }
  write_raster(path, m);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const cv::Mat m = read_raster(path);
  (void)sample_scale(m, path);
  const int colour = std::min(m.channels(), 3);
  BinaryMask mask{m.cols, m.rows, {}};
  mask.bits.reserve(static_cast<std::size_t>(m.rows) * m.cols);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      bool obj = false;
      for (int ch = 0; ch < colour; ++ch) obj = obj || sample_at(m, r, c, ch) != 0;
      mask.bits.push_back(obj ? 1 : 0);
    }
  }
  return mask;
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  require(mask.width > 0 && mask.height > 0 &&
              mask.bits.size() == static_cast<std::size_t>(mask.width) * mask.height,
          "mask dimensions do not match its data");
  cv::Mat m(mask.height, mask.width, CV_8UC1);
  for (int r = 0; r < mask.height; ++r) {
    auto* row = m.ptr<std::uint8_t>(r);
    for (int c = 0; c < mask.width; ++c) {
      row[c] = mask.bits[static_cast<std::size_t>(r) * mask.width + c] ? 255 : 0;
    }
  }
  write_raster(path, m);
}

void write_label_map(const std::filesystem::path& path, const LabelMap& map) {
  map.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write label map '" + path.string() + "'");
  out << map.width << ' ' << map.height << ' ' << map.num_labels << '\n';
  for (int r = 0; r < map.height; ++r) {
    for (int c = 0; c < map.width; ++c) {
      if (c) out << ' ';
      out << map.at(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing label map '" + path.string() + "'");
}

LabelMap read_label_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read label map '" + path.string() + "'");
  LabelMap map;
  if (!(in >> map.width >> map.height >> map.num_labels) || map.width <= 0 ||
      map.height <= 0 || map.num_labels < 0) {
    throw IoError("malformed label map header in '" + path.string() + "'");
  }
  const std::size_t n = static_cast<std::size_t>(map.width) * map.height;
  map.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> map.labels[i])) {
      throw IoError("label map '" + path.string() + "' ends after " + std::to_string(i) +
                    " of " + std::to_string(n) + " labels");
    }
    if (map.labels[i] < 0 || map.labels[i] >= map.num_labels) {
      throw IoError("label " + std::to_string(map.labels[i]) + " out of range in '" +
                    path.string() + "'");
    }
  }
  return map;
}

LabelMap LabelMap::compacted() const {
  std::map<int, int> remap;
  for (int id : labels) remap.emplace(id, 0);
  int next = 0;
  for (auto& [id, to] : remap) to = next++;
  LabelMap out{width, height, next, labels};
  for (int& id : out.labels) id = remap[id];
  return out;
}

int LabelMap::distinct_labels() const {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

void LabelMap::validate() const {
  require(width > 0 && height > 0, "label map dimensions must be positive");
  require(labels.size() == static_cast<std::size_t>(width) * height,
          "label map size does not match its dimensions");
  for (int id : labels) require(id >= 0 && id < num_labels, "label id out of range");
}

Population bilateral_filter(const Population& image, const kernels::BilateralSpec& spec,
                            Exec exec) {
  const Geometry& g = image.grid();
  require(spec.sigma_spatial > 0.0 && std::isfinite(spec.sigma_spatial),
          "sigma_spatial must be > 0");
  require(spec.sigma_range > 0.0 && std::isfinite(spec.sigma_range), "sigma_range must be > 0");
  require(spec.radius >= 0, "filter radius must be >= 0");
  std::vector<double> out(image.values().size());
  const auto in = image.values();
  if (exec == Exec::serial) {
    kernels::serial::bilateral(in.data(), out.data(), g.width, g.height, image.dim(), spec);
  } else {
    kernels::omp::bilateral(in.data(), out.data(), g.width, g.height, image.dim(), spec);
  }
  // Weighted means cannot leave [0,1]; clamp away last-ulp excursions.
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return Population(g, image.dim(), std::move(out));
}

namespace {

struct Components {
  std::vector<int> id;  // per pixel
  std::vector<int> label;
  std::vector<int> area;
};

Components label_components(const LabelMap& map) {
  const int w = map.width;
  const int h = map.height;
  Components comps;
  comps.id.assign(map.size(), -1);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < map.size(); ++start) {
    if (comps.id[start] >= 0) continue;
    const int cid = static_cast<int>(comps.label.size());
    const int lab = map.labels[start];
    comps.label.push_back(lab);
    comps.area.push_back(0);
    comps.id[start] = cid;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++comps.area[cid];
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if ((dr == 0 && dc == 0) || nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
          const std::size_t q = static_cast<std::size_t>(nr) * w + nc;
          if (comps.id[q] < 0 && map.labels[q] == lab) {
            comps.id[q] = cid;
            stack.push_back(q);
          }
        }
      }
    }
  }
  return comps;
}

std::vector<std::vector<int>> component_adjacency(const LabelMap& map, const Components& comps) {
  const int w = map.width;
  const int h = map.height;
  std::vector<std::pair<int, int>> edges;
  constexpr int fwd[4][2] = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int a = comps.id[static_cast<std::size_t>(r) * w + c];
      for (const auto& d : fwd) {
        const int nr = r + d[0];
        const int nc = c + d[1];
        if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
        const int b = comps.id[static_cast<std::size_t>(nr) * w + nc];
        if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<std::vector<int>> adj(comps.label.size());
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

}  // namespace

SmoothResult morph_smooth_with_stats(const LabelMap& map, int min_area) {
  map.validate();
  SmoothResult result{map, 0};
  constexpr int kMaxPasses = 64;
  while (result.passes < kMaxPasses) {
    const Components comps = label_components(result.map);
    const std::size_t k = comps.label.size();
    std::vector<int> small;
    for (std::size_t c = 0; c < k; ++c) {
      if (comps.area[c] < min_area) small.push_back(static_cast<int>(c));
    }
    if (small.empty() || k == 1) break;
    ++result.passes;

    const auto adj = component_adjacency(result.map, comps);
    std::sort(small.begin(), small.end(), [&](int a, int b) {
      return comps.area[a] != comps.area[b] ? comps.area[a] < comps.area[b] : a < b;
    });

    UnionFind uf(k);
    std::vector<int> area = comps.area;    // indexed by root
    std::vector<int> label = comps.label;  // indexed by root
    bool changed = false;
    for (int s : small) {
      const std::size_t root = uf.find(static_cast<std::size_t>(s));
      if (area[root] >= min_area) continue;
      std::size_t best = root;
      for (int nb : adj[s]) {
        const std::size_t rn = uf.find(static_cast<std::size_t>(nb));
        if (rn == root) continue;
        if (best == root || area[rn] > area[best] ||
            (area[rn] == area[best] &&
             (label[rn] < label[best] || (label[rn] == label[best] && rn < best)))) {
          best = rn;
        }
      }
      if (best == root) continue;
      const int merged_area = area[root] + area[best];
      const int merged_label = label[best];
      const std::size_t survivor = uf.unite(best, root);
      area[survivor] = merged_area;
      label[survivor] = merged_label;
      changed = true;
    }
    if (!changed) break;
    for (std::size_t p = 0; p < result.map.size(); ++p) {
      result.map.labels[p] = label[uf.find(static_cast<std::size_t>(comps.id[p]))];
    }
  }
  return result;
}

LabelMap morph_smooth(const LabelMap& map, int min_area) {
  return morph_smooth_with_stats(map, min_area).map;
}

int default_min_area(std::size_t pixels, double fraction) {
  return std::max(1, static_cast<int>(std::lround(fraction * static_cast<double>(pixels))));
}

LabelMap make_label_map(const Geometry& g, std::span<const int> labels) {
  require(labels.size() == static_cast<std::size_t>(g.width) * g.height,
          "label count does not match the grid");
  LabelMap map{g.width, g.height, 0, std::vector<int>(labels.begin(), labels.end())};
  map.num_labels = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  return map;
}

Population paint_labels(const LabelMap& map, std::span<const OpinionVec> centres) {
  map.validate();
  require(!centres.empty(), "no centres to paint with");
  require(static_cast<std::size_t>(map.num_labels) <= centres.size(),
          "label map references more ids than there are centres");
  const std::size_t dim = centres.front().size();
  std::vector<double> values;
  values.reserve(map.size() * dim);
  for (int id : map.labels) {
    const auto& c = centres[static_cast<std::size_t>(id)];
    values.insert(values.end(), c.begin(), c.end());
  }
  return Population(Geometry{map.width, map.height}, dim, std::move(values));
}

Segmentation render_segmentation(const Population& image, const ClusterResult& clusters) {
  require(clusters.labels.size() == image.size(), "clusters were not computed from this image");
  LabelMap labels = make_label_map(image.grid(), clusters.labels);
  labels.num_labels = static_cast<int>(clusters.centres.size());
  Population painted = paint_labels(labels, clusters.centres);
  return {std::move(painted), std::move(labels)};
}

}  // namespace dwseg
