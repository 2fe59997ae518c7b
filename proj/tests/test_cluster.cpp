#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dwseg/cluster.hpp"
#include "dwseg/error.hpp"
#include "dwseg/rng.hpp"
#include "dwseg/synthetic.hpp"
#include "dwseg/union_find.hpp"

using namespace dwseg;

namespace {

// Quadratic reference: union every pair closer than tol in Chebyshev distance.
std::vector<std::size_t> brute_force_partition(const Population& pop, double tol) {
  const std::size_t n = pop.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      for (std::size_t m = 0; m < pop.dim(); ++m) {
        d = std::max(d, std::abs(pop[i][m] - pop[j][m]));
      }
      if (d < tol) uf.unite(i, j);
    }
  }
  std::vector<std::size_t> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = uf.find(i);
  return roots;
}

// Same-partition check up to relabelling.
bool same_partition(std::span<const int> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

// A few tight blobs plus scattered points, so chains near merge_tol occur.
Population clustered_population(SplitMix64& g, std::size_t n, std::size_t dim, double tol) {
  const std::size_t blobs = 1 + g.below(5);
  std::vector<OpinionVec> centres(blobs, OpinionVec(dim));
  for (auto& c : centres) {
    for (double& v : c) v = g.uniform();
  }
  std::vector<double> values;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centres[g.below(blobs)];
    const bool scatter = g.below(4) == 0;
    for (std::size_t m = 0; m < dim; ++m) {
      const double v = scatter ? g.uniform() : c[m] + (g.uniform() - 0.5) * 3.0 * tol;
      values.push_back(std::clamp(v, 0.0, 1.0));
    }
  }
  return Population(dim, std::move(values));
}

}  // namespace

TEST_CASE("count_clusters examples") {
  SUBCASE("single point") {
    const auto r = count_clusters(Population::scalar({0.4}));
    CHECK(r.total_count() == 1);
    CHECK(r.headline_count == 1);
    CHECK(r.centres[0][0] == 0.4);
  }
  SUBCASE("two well separated groups") {
    const auto r = count_clusters(Population::scalar({0.2, 0.2, 0.2, 0.8004, 0.8}));
    CHECK(r.total_count() == 2);
    CHECK(r.headline_count == 2);
    CHECK(r.centres[0][0] == doctest::Approx(0.2));
    CHECK(r.centres[1][0] == doctest::Approx(0.8002));
    CHECK(r.masses[0] == doctest::Approx(0.6));
    CHECK(r.labels == std::vector<int>{0, 0, 0, 1, 1});
  }
  SUBCASE("a chain below the tolerance is one cluster") {
    const auto r = count_clusters(Population::scalar({0.5, 0.5009, 0.5018, 0.5027}));
    CHECK(r.total_count() == 1);
  }
  SUBCASE("a gap equal to the tolerance does not link") {
    const auto r = count_clusters(Population::scalar({0.25, 0.5}), 0.25);
    CHECK(r.total_count() == 2);
  }
  SUBCASE("Chebyshev distance uses the largest channel") {
    const std::vector<OpinionVec> ops{{0.1, 0.1, 0.1}, {0.1, 0.1, 0.3}};
    const auto r = count_clusters(Population::from_opinions(ops), 0.1);
    CHECK(r.total_count() == 2);
  }
  SUBCASE("small groups are minor") {
    std::vector<double> v(199, 0.3);
    v.push_back(0.9);
    const auto r = count_clusters(Population::scalar(v), 1e-3, 0.01);
    CHECK(r.total_count() == 2);
    CHECK(r.headline_count == 1);
    CHECK(r.minor_count() == 1);
    CHECK(r.centres[1][0] == 0.9);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(count_clusters(Population{}), InvalidInput);
    CHECK_THROWS_AS(count_clusters(Population::scalar({0.5}), 0.0), InvalidInput);
    CHECK_THROWS_AS(count_clusters(Population::scalar({0.5}), 1e-3, 0.5), InvalidInput);
  }
}

TEST_CASE("count_clusters matches the quadratic reference") {
  SplitMix64 g(20240601);
  for (int t = 0; t < 120; ++t) {
    const std::size_t dim = (t % 2 == 0) ? 1 : 3;
    const double tol = t % 3 == 0 ? 1e-3 : 0.05;
    const std::size_t n = 2 + g.below(99);
    const Population pop = clustered_population(g, n, dim, tol);
    const auto r = count_clusters(pop, tol, 0.0);
    const auto ref = brute_force_partition(pop, tol);
    REQUIRE(same_partition(r.labels, ref));
    REQUIRE(r.total_count() == std::set<std::size_t>(ref.begin(), ref.end()).size());
  }
}

TEST_CASE("count_clusters result structure") {
  SplitMix64 g(5);
  for (int t = 0; t < 50; ++t) {
    const Population pop = clustered_population(g, 2 + g.below(300), 3, 0.02);
    const auto r = count_clusters(pop, 0.02, 0.05);
    REQUIRE(r.labels.size() == pop.size());
    REQUIRE(std::accumulate(r.masses.begin(), r.masses.end(), 0.0) == doctest::Approx(1.0));
    REQUIRE(std::is_sorted(r.masses.begin(), r.masses.end(), std::greater<>()));
    for (std::size_t k = 0; k < r.total_count(); ++k) {
      REQUIRE((k < r.headline_count) == (r.masses[k] >= 0.05));
    }
    // Centres are member means.
    std::vector<OpinionVec> sums(r.total_count(), OpinionVec(3, 0.0));
    std::vector<int> counts(r.total_count(), 0);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      for (int m = 0; m < 3; ++m) sums[r.labels[i]][m] += pop[i][m];
      ++counts[r.labels[i]];
    }
    for (std::size_t k = 0; k < r.total_count(); ++k) {
      for (int m = 0; m < 3; ++m) REQUIRE(r.centres[k][m] == doctest::Approx(sums[k][m] / counts[k]));
    }
  }
}

TEST_CASE("count_clusters is invariant under agent permutation") {
  SplitMix64 g(8);
  for (int t = 0; t < 30; ++t) {
    const Population pop = clustered_population(g, 50 + g.below(100), 3, 0.01);
    std::vector<std::size_t> perm(pop.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[g.below(i + 1)]);
    std::vector<OpinionVec> shuffled;
    for (std::size_t i : perm) shuffled.push_back(pop.opinion(i));
    const auto a = count_clusters(pop, 0.01, 0.02);
    const auto b = count_clusters(Population::from_opinions(shuffled), 0.01, 0.02);
    REQUIRE(a.total_count() == b.total_count());
    REQUIRE(a.headline_count == b.headline_count);
    REQUIRE(a.masses == b.masses);
    for (std::size_t i = 0; i < perm.size(); ++i) REQUIRE(a.labels[perm[i]] == b.labels[i]);
  }
}

TEST_CASE("clusters_from_labels accepts sparse ids") {
  const auto pop = Population::scalar({0.1, 0.3, 0.5, 0.7});
  const std::vector<int> labels{42, 7, 42, 42};
  const auto r = clusters_from_labels(pop, labels);
  CHECK(r.total_count() == 2);
  CHECK(r.labels == std::vector<int>{0, 1, 0, 0});
  CHECK(r.centres[0][0] == doctest::Approx(13.0 / 30.0));
  CHECK(r.masses[1] == doctest::Approx(0.25));
}

TEST_CASE("schedule rounds and validation") {
  CHECK(ScheduleParams::rounds_to_unit_epsilon(0.1, 0.01) == 91);
  CHECK(ScheduleParams::rounds_to_unit_epsilon(1.0, 0.01) == 1);
  ScheduleParams s;
  CHECK_NOTHROW(s.validate());
  s.max_rounds = 92;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
  s = ScheduleParams{};
  s.target_c = 0;
  CHECK_THROWS_AS(s.validate(), InvalidInput);
}

TEST_CASE("schedule_epsilon exits at once when already at target") {
  const double tones[] = {0.2, 0.8};
  const Population img = make_bands(Geometry{8, 4}, tones, 1);
  ScheduleParams s;
  ModelParams p;
  const auto r = schedule_epsilon(img, s, p);
  CHECK(r.rounds.size() == 1);
  CHECK(r.reached_target);
  CHECK_FALSE(r.overshoot);
  CHECK(r.epsilon_final == s.epsilon_0);
  CHECK(r.image == img);
}

TEST_CASE("schedule_epsilon merges two tones only once epsilon exceeds the gap") {
  const double tones[] = {0.1, 0.9};
  const Population img = make_bands(Geometry{6, 4}, tones, 1);
  ScheduleParams s;
  s.target_c = 1;
  ModelParams p;
  const auto r = schedule_epsilon(img, s, p);
  const double gap = 0.9 - 0.1;
  REQUIRE(r.rounds.size() >= 2);
  CHECK(r.reached_target);
  CHECK(r.clusters.headline_count == 1);
  CHECK(r.epsilon_final > gap);
  const auto& before = r.rounds[r.rounds.size() - 2];
  CHECK(before.epsilon <= gap);
  CHECK(before.headline_count == 2);
  for (std::size_t k = 0; k + 1 < r.rounds.size(); ++k) {
    CHECK(r.rounds[k].sweeps == 1);
    CHECK(r.rounds[k + 1].epsilon > r.rounds[k].epsilon);
  }
  CHECK(r.clusters.centres[0][0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("schedule_epsilon on three tones depends on the middle band's mass") {
  // Columns 0.1 | 0.5 | 0.9; both gaps are 0.4, so all merging starts at
  // the first round with epsilon > 0.4.
  const auto bands = [](int l, int m, int r) {
    std::vector<double> v;
    for (int row = 0; row < 8; ++row) {
      for (int c = 0; c < l + m + r; ++c) v.push_back(c < l ? 0.1 : c < l + m ? 0.5 : 0.9);
    }
    return Population(Geometry{l + m + r, 8}, 1, std::move(v));
  };
  ScheduleParams s;
  ModelParams p;
  const auto narrow = schedule_epsilon(bands(30, 10, 30), s, p);
  CHECK(narrow.reached_target);
  CHECK(narrow.clusters.headline_count == 2);
  CHECK(narrow.epsilon_final > 0.4);
  CHECK(narrow.rounds[narrow.rounds.size() - 2].headline_count == 3);
  // Equal masses: the middle band pulls both sides to the mean in one round.
  const auto thirds = schedule_epsilon(bands(16, 16, 16), s, p);
  CHECK(thirds.overshoot);
  CHECK(thirds.clusters.headline_count == 1);
  CHECK(thirds.clusters.centres[0][0] == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("schedule_epsilon counts never increase") {
  SplitMix64 g(77);
  for (int t = 0; t < 4; ++t) {
    SyntheticSpec spec;
    spec.width = 24;
    spec.height = 20;
    spec.dim = 1;
    spec.noise_sigma = 0.08;
    spec.seed = g.next();
    const auto img = make_two_region(spec);
    ScheduleParams s;
    s.epsilon_0 = 0.05;
    s.delta_epsilon = 0.05;
    s.max_rounds = ScheduleParams::rounds_to_unit_epsilon(s.epsilon_0, s.delta_epsilon);
    ModelParams p;
    p.seed = g.next();
    const auto r = schedule_epsilon(img.image, s, p);
    for (std::size_t k = 0; k + 1 < r.rounds.size(); ++k) {
      REQUIRE(r.rounds[k + 1].headline_count <= r.rounds[k].headline_count);
    }
    CHECK(r.clusters.headline_count <= 2);
  }
}

TEST_CASE("schedule_epsilon is deterministic") {
  const SyntheticSpec spec{"disc", 20, 16, 0.2, 0.8, 0.05, Shape::disc, 3, 9};
  const auto img = make_two_region(spec);
  ScheduleParams s;
  ModelParams p;
  p.rule = UpdateRule::neighbour;
  const auto a = schedule_epsilon(img.image, s, p);
  const auto b = schedule_epsilon(img.image, s, p);
  CHECK(a.image == b.image);
  CHECK(a.clusters.labels == b.clusters.labels);
  CHECK(a.total_sweeps() == b.total_sweeps());
}
