#include "doctest.h"

#include <fstream>

#include "json.hpp"

#include "dwseg/error.hpp"
#include "dwseg/eval.hpp"
#include "dwseg/rng.hpp"
#include "temp_dir.hpp"

using namespace dwseg;

namespace {

// 4x4 case: object is the left two columns of the top three rows (6 px);
// the prediction marks columns 1-2 of rows 0-1 plus (3,3).
BinaryMask gt_4x4() {
  return BinaryMask{4, 4, {1, 1, 0, 0,
                           1, 1, 0, 0,
                           1, 1, 0, 0,
                           0, 0, 0, 0}};
}
BinaryMask pred_4x4() {
  return BinaryMask{4, 4, {0, 1, 1, 0,
                           0, 1, 1, 0,
                           0, 1, 0, 0,
                           0, 0, 0, 0}};
}

// Independent pixel tally.
ConfusionCounts tally(const BinaryMask& p, const BinaryMask& g) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool a = p.bits[i] != 0, b = g.bits[i] != 0;
    if (a && b) ++c.tp;
    if (a && !b) ++c.fp;
    if (!a && !b) ++c.tn;
    if (!a && b) ++c.fn;
  }
  return c;
}

}  // namespace

TEST_CASE("confusion on the 4x4 example") {
  const ConfusionCounts c = confusion(pred_4x4(), gt_4x4());
  CHECK(c == ConfusionCounts{3, 2, 8, 3});
  CHECK(c == tally(pred_4x4(), gt_4x4()));
  const Metrics m = metrics(c);
  CHECK(*m.recall == doctest::Approx(0.5));
  CHECK(*m.fallout == doctest::Approx(0.2));
  CHECK(*m.accuracy == doctest::Approx(11.0 / 16.0));
}

TEST_CASE("confusion on a hand-built 4x4 with tp=3 fp=2 tn=9 fn=2") {
  const BinaryMask gt{4, 4, {1, 1, 1, 1,
                             1, 0, 0, 0,
                             0, 0, 0, 0,
                             0, 0, 0, 0}};
  const BinaryMask pred{4, 4, {1, 1, 1, 0,
                               0, 1, 1, 0,
                               0, 0, 0, 0,
                               0, 0, 0, 0}};
  const ConfusionCounts c = confusion(pred, gt);
  CHECK(c == ConfusionCounts{3, 2, 9, 2});
  const Metrics m = metrics(c);
  CHECK(*m.recall == doctest::Approx(0.6));
  CHECK(*m.fallout == doctest::Approx(2.0 / 11.0));
  CHECK(*m.accuracy == doctest::Approx(0.75));
}

TEST_CASE("confusion on 8x8 perfect and inverted predictions") {
  BinaryMask gt{8, 8, std::vector<std::uint8_t>(64, 0)};
  for (int r = 2; r < 6; ++r) {
    for (int c = 2; c < 6; ++c) gt.bits[r * 8 + c] = 1;
  }
  const Metrics perfect = metrics(confusion(gt, gt));
  CHECK(*perfect.recall == 1.0);
  CHECK(*perfect.fallout == 0.0);
  CHECK(*perfect.accuracy == 1.0);
  BinaryMask inv = gt;
  for (auto& b : inv.bits) b = !b;
  const ConfusionCounts c = confusion(inv, gt);
  CHECK(c == ConfusionCounts{0, 48, 0, 16});
  CHECK(*metrics(c).accuracy == 0.0);
}

TEST_CASE("undefined ratios are empty") {
  const Metrics m = metrics(ConfusionCounts{0, 0, 5, 0});
  CHECK_FALSE(m.recall.has_value());
  CHECK(*m.fallout == 0.0);
  CHECK(*m.accuracy == 1.0);
  CHECK_FALSE(metrics(ConfusionCounts{4, 0, 0, 0}).fallout.has_value());
  CHECK_THROWS_AS(metrics(ConfusionCounts{}), InvalidInput);
  CHECK(format_ratio(std::nullopt) == "undef");
  CHECK(format_ratio(0.5) == "0.500000");
}

TEST_CASE("confusion rejects mismatched masks") {
  CHECK_THROWS_AS(confusion(BinaryMask{2, 1, {0, 1}}, BinaryMask{1, 2, {0, 1}}), InvalidInput);
}

TEST_CASE("metric identities on random masks") {
  SplitMix64 g(15);
  for (int t = 0; t < 500; ++t) {
    const int w = 1 + static_cast<int>(g.below(12)), h = 1 + static_cast<int>(g.below(12));
    BinaryMask a{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
    BinaryMask b = a;
    for (auto& x : a.bits) x = static_cast<std::uint8_t>(g.below(2));
    for (auto& x : b.bits) x = static_cast<std::uint8_t>(g.below(2));
    const ConfusionCounts c = confusion(a, b);
    REQUIRE(c == tally(a, b));
    REQUIRE(c.total() == a.size());
    const Metrics m = metrics(c);
    REQUIRE(*m.accuracy >= 0.0);
    REQUIRE(*m.accuracy <= 1.0);
    if (m.recall) REQUIRE(*m.recall == doctest::Approx(double(c.tp) / double(c.tp + c.fn)));
    if (m.fallout) REQUIRE(*m.fallout == doctest::Approx(double(c.fp) / double(c.fp + c.tn)));
    REQUIRE(m.recall.has_value() == (c.tp + c.fn > 0));
    REQUIRE(m.fallout.has_value() == (c.fp + c.tn > 0));
  }
}

TEST_CASE("to_binary_mask picks the better assignment") {
  const BinaryMask gt = gt_4x4();
  SUBCASE("two labels, object labelled 0") {
    LabelMap map{4, 4, 2, {}};
    for (auto b : gt.bits) map.labels.push_back(b ? 0 : 1);
    CHECK(to_binary_mask(map, gt) == gt);
  }
  SUBCASE("one label") {
    const LabelMap map{4, 4, 1, std::vector<int>(16, 0)};
    const BinaryMask m = to_binary_mask(map, gt);
    // All background is right on 10 of 16, all object on 6.
    CHECK(m.bits == std::vector<std::uint8_t>(16, 0));
  }
  SUBCASE("many labels use majority vote") {
    LabelMap map{4, 4, 4, std::vector<int>(16, 3)};
    for (int p : {0, 1, 4}) map.labels[p] = 0;  // all object
    for (int p : {5, 8}) map.labels[p] = 1;     // all object
    map.labels[9] = 2;                          // object
    map.labels[2] = 2;                          // background, label 2 tie 1:1
    const BinaryMask m = to_binary_mask(map, gt);
    for (int p : {0, 1, 4, 5, 8}) CHECK(m.object(p));
    CHECK_FALSE(m.object(15));
  }
}

TEST_CASE("aggregate mean of images versus pooled pixels") {
  const ConfusionCounts a{1, 0, 9, 0};   // recall 1, fallout 0, acc 1
  const ConfusionCounts b{1, 10, 0, 9};  // recall 0.1, fallout 1, acc 1/20
  const ConfusionCounts set[] = {a, b};
  const Metrics mean = aggregate(set, Aggregation::mean_of_images);
  CHECK(*mean.recall == doctest::Approx(0.55));
  CHECK(*mean.fallout == doctest::Approx(0.5));
  CHECK(*mean.accuracy == doctest::Approx((1.0 + 0.05) / 2));
  const Metrics pooled = aggregate(set, Aggregation::pooled_pixels);
  CHECK(*pooled.recall == doctest::Approx(2.0 / 11.0));
  CHECK(*pooled.fallout == doctest::Approx(10.0 / 19.0));
  CHECK(*pooled.accuracy == doctest::Approx(11.0 / 30.0));

  // An undefined per-image ratio is skipped, not read as zero.
  const ConfusionCounts c{0, 1, 3, 0};
  const ConfusionCounts set2[] = {a, c};
  CHECK(*aggregate(set2).recall == 1.0);
  CHECK_THROWS_AS(aggregate(std::span<const ConfusionCounts>{}), InvalidInput);
}

TEST_CASE("results file round trip") {
  TempDir dir("results");
  const std::vector<ImageRecord> recs{
      {"images/a.png", {3, 2, 8, 3}, metrics({3, 2, 8, 3})},
      {"images/b.png", {0, 0, 5, 0}, metrics({0, 0, 5, 0})}};
  write_results(dir / "results.txt", recs);
  std::ifstream in(dir / "results.txt");
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "# path tp fp tn fn recall fallout accuracy");
  std::getline(in, line);
  CHECK(line == "images/a.png 3 2 8 3 0.500000 0.200000 0.687500");
  std::getline(in, line);
  CHECK(line == "images/b.png 0 0 5 0 undef 0.000000 1.000000");

  const auto back = read_results(dir / "results.txt");
  REQUIRE(back.size() == 2);
  CHECK(back[0].name == "images/a.png");
  CHECK(back[0].counts == recs[0].counts);
  CHECK_FALSE(back[1].metrics.recall.has_value());

  write_summary_json(dir / "summary.json", recs, Aggregation::mean_of_images);
  const auto j = nlohmann::json::parse(std::ifstream(dir / "summary.json"));
  CHECK(j.is_object());
}
