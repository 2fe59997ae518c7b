#include "dwseg/eval.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"

#include "dwseg/error.hpp"

namespace dwseg {

namespace {

void require_same_shape(int w1, int h1, std::size_t n1, int w2, int h2, std::size_t n2) {
  require(w1 == w2 && h1 == h2 && n1 == n2,
          "dimension mismatch: " + std::to_string(w1) + "x" + std::to_string(h1) + " vs " +
              std::to_string(w2) + "x" + std::to_string(h2));
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json ratio_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json metrics_json(const Metrics& m) {
  return {{"recall", ratio_json(m.recall)},
          {"fallout", ratio_json(m.fallout)},
          {"accuracy", ratio_json(m.accuracy)}};
}

}  // namespace

BinaryMask to_binary_mask(const LabelMap& map, const BinaryMask& gt) {
  require_same_shape(map.width, map.height, map.size(), gt.width, gt.height, gt.size());
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> overlap;  // id -> (object, background)
  for (std::size_t i = 0; i < map.size(); ++i) {
    auto& o = overlap[map.labels[i]];
    (gt.object(i) ? o.first : o.second) += 1;
  }

  std::map<int, bool> is_object;
  if (overlap.size() <= 2) {
    // Assignment A: the lowest id is background, any other id object.
    // Assignment B: the complement. Correct pixels under A:
    std::uint64_t correct_a = 0;
    const int low = overlap.begin()->first;
    for (const auto& [id, o] : overlap) correct_a += id == low ? o.second : o.first;
    const bool flip = map.size() - correct_a > correct_a;
    for (const auto& [id, o] : overlap) is_object[id] = (id != low) != flip;
  } else {
    for (const auto& [id, o] : overlap) is_object[id] = o.first > o.second;
  }

  BinaryMask out{map.width, map.height, std::vector<std::uint8_t>(map.size())};
  for (std::size_t i = 0; i < map.size(); ++i) out.bits[i] = is_object[map.labels[i]] ? 1 : 0;
  return out;
}

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.width, pred.height, pred.size(), gt.width, gt.height, gt.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.object(i);
    const bool g = gt.object(i);
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics(const ConfusionCounts& c) {
  require(c.total() > 0, "cannot compute metrics over zero pixels");
  return {ratio(c.tp, c.tp + c.fn), ratio(c.fp, c.fp + c.tn), ratio(c.tp + c.tn, c.total())};
}

Metrics aggregate(std::span<const ConfusionCounts> per_image, Aggregation how) {
  require(!per_image.empty(), "cannot aggregate an empty result set");
  if (how == Aggregation::pooled_pixels) {
    ConfusionCounts pooled;
    for (const auto& c : per_image) pooled += c;
    return metrics(pooled);
  }
  struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    void add(const std::optional<double>& v) {
      if (v) {
        sum += *v;
        ++n;
      }
    }
    std::optional<double> value() const {
      return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  } recall, fallout, accuracy;
  for (const auto& c : per_image) {
    const Metrics m = metrics(c);
    recall.add(m.recall);
    fallout.add(m.fallout);
    accuracy.add(m.accuracy);
  }
  return {recall.value(), fallout.value(), accuracy.value()};
}

std::string format_ratio(const std::optional<double>& v) {
  if (!v) return "undef";
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << *v;
  return s.str();
}

void write_results(const std::filesystem::path& path, std::span<const ImageRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write results '" + path.string() + "'");
  out << "# path tp fp tn fn recall fallout accuracy\n";
  for (const auto& r : records) {
    require(r.name.find_first_of(" \t\n") == std::string::npos,
            "record name must not contain whitespace: '" + r.name + "'");
    out << r.name << ' ' << r.counts.tp << ' ' << r.counts.fp << ' ' << r.counts.tn << ' '
        << r.counts.fn << ' ' << format_ratio(r.metrics.recall) << ' '
        << format_ratio(r.metrics.fallout) << ' ' << format_ratio(r.metrics.accuracy) << '\n';
  }
  if (!out) throw IoError("failed writing results '" + path.string() + "'");
}

std::vector<ImageRecord> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read results '" + path.string() + "'");
  std::vector<ImageRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream s(line);
    ImageRecord r;
    std::string rec, fal, acc;
    if (!(s >> r.name >> r.counts.tp >> r.counts.fp >> r.counts.tn >> r.counts.fn >> rec >>
          fal >> acc)) {
      throw IoError("malformed results line in '" + path.string() + "': " + line);
    }
    r.metrics = metrics(r.counts);
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_json(const std::filesystem::path& path, std::span<const ImageRecord> records,
                        Aggregation primary) {
  std::vector<ConfusionCounts> counts;
  nlohmann::json images = nlohmann::json::array();
  for (const auto& r : records) {
    counts.push_back(r.counts);
    nlohmann::json j = metrics_json(r.metrics);
    j["path"] = r.name;
    j["tp"] = r.counts.tp;
    j["fp"] = r.counts.fp;
    j["tn"] = r.counts.tn;
    j["fn"] = r.counts.fn;
    images.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["images"] = std::move(images);
  doc["image_count"] = records.size();
  doc["aggregation"] =
      primary == Aggregation::mean_of_images ? "mean_of_images" : "pooled_pixels";
  if (!records.empty()) {
    doc["mean_of_images"] = metrics_json(aggregate(counts, Aggregation::mean_of_images));
    doc["pooled_pixels"] = metrics_json(aggregate(counts, Aggregation::pooled_pixels));
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write summary '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace dwseg
