#include "dwseg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "dwseg/error.hpp"
#include "dwseg/model.hpp"
#include "dwseg/rng.hpp"
#include "dwseg/union_find.hpp"

namespace dwseg {

namespace {

using CellKey = std::vector<std::int64_t>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (auto v : k) {
      h ^= static_cast<std::uint64_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct Cell {
  CellKey key;
  std::vector<std::size_t> members;
  OpinionVec lo, hi;  // bounding box of member opinions
};

double chebyshev(const double* a, const double* b, std::size_t dim) noexcept {
  double d = 0.0;
  for (std::size_t m = 0; m < dim; ++m) d = std::max(d, std::abs(a[m] - b[m]));
  return d;
}

bool boxes_may_link(const Cell& a, const Cell& b, double tol) noexcept {
  for (std::size_t m = 0; m < a.lo.size(); ++m) {
    const double gap = std::max(a.lo[m] - b.hi[m], b.lo[m] - a.hi[m]);
    if (gap >= tol) return false;
  }
  return true;
}

bool is_solid(const Cell& cell, UnionFind& uf) {
  const std::size_t root = uf.find(cell.members.front());
  return std::all_of(cell.members.begin(), cell.members.end(),
                     [&](std::size_t x) { return uf.find(x) == root; });
}

// Links members inside one cell. Most members link to the first one directly;
// the rest fall back to pairwise checks.
void link_within(const Population& pop, const Cell& cell, double tol, UnionFind& uf) {
  const std::size_t dim = pop.dim();
  const std::size_t anchor = cell.members.front();
  std::vector<std::size_t> residual;
  for (std::size_t k = 1; k < cell.members.size(); ++k) {
    const std::size_t x = cell.members[k];
    if (chebyshev(pop[anchor].data(), pop[x].data(), dim) < tol) {
      uf.unite(anchor, x);
    } else {
      residual.push_back(x);
    }
  }
  for (std::size_t r : residual) {
    for (std::size_t x : cell.members) {
      if (x == r || uf.same(r, x)) continue;
      if (chebyshev(pop[r].data(), pop[x].data(), dim) < tol) uf.unite(r, x);
    }
  }
}

void link_across(const Population& pop, const Cell& a, const Cell& b, double tol,
                 UnionFind& uf) {
  if (!boxes_may_link(a, b, tol)) return;
  const std::size_t dim = pop.dim();
  if (is_solid(a, uf) && is_solid(b, uf)) {
    if (uf.same(a.members.front(), b.members.front())) return;
    for (std::size_t p : a.members) {
      for (std::size_t q : b.members) {
        if (chebyshev(pop[p].data(), pop[q].data(), dim) < tol) {
          uf.unite(p, q);
          return;
        }
      }
    }
    return;
  }
  for (std::size_t p : a.members) {
    for (std::size_t q : b.members) {
      if (uf.same(p, q)) continue;
      if (chebyshev(pop[p].data(), pop[q].data(), dim) < tol) uf.unite(p, q);
    }
  }
}

// Offsets in {-1,0,1}^dim that are lexicographically positive, so each
// unordered pair of neighbouring cells is visited once.
std::vector<CellKey> forward_offsets(std::size_t dim) {
  std::vector<CellKey> out;
  CellKey cur(dim, -1);
  while (true) {
    const auto first_nonzero =
        std::find_if(cur.begin(), cur.end(), [](std::int64_t v) { return v != 0; });
    if (first_nonzero != cur.end() && *first_nonzero > 0) out.push_back(cur);
    std::size_t m = dim;
    while (m > 0) {
      --m;
      if (cur[m] < 1) {
        ++cur[m];
        break;
      }
      cur[m] = -1;
      if (m == 0) return out;
    }
    if (dim == 0) return out;
  }
}

}  // namespace

ClusterResult clusters_from_labels(const Population& pop, std::span<const int> labels,
                                   double mass_floor) {
  require(!pop.empty(), "cannot cluster an empty population");
  require(labels.size() == pop.size(), "label count does not match population size");
  const std::size_t n = pop.size();
  const std::size_t dim = pop.dim();

  // Group by input label, remembering the first agent of each group for
  // deterministic tie-breaking.
  std::map<int, std::size_t> group_of;
  std::vector<OpinionVec> sums;
  std::vector<std::size_t> counts, first;
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = group_of.try_emplace(labels[i], sums.size());
    if (inserted) {
      sums.emplace_back(dim, 0.0);
      counts.push_back(0);
      first.push_back(i);
    }
    const std::size_t g = it->second;
    group[i] = g;
    const auto o = pop[i];
    for (std::size_t m = 0; m < dim; ++m) sums[g][m] += o[m];
    ++counts[g];
  }

  const std::size_t k = sums.size();
  std::vector<OpinionVec> centres(k);
  for (std::size_t g = 0; g < k; ++g) {
    centres[g] = sums[g];
    for (double& v : centres[g]) v /= static_cast<double>(counts[g]);
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    if (centres[a] != centres[b]) return centres[a] < centres[b];
    return first[a] < first[b];
  });

  ClusterResult out;
  std::vector<int> rank(k);
  out.centres.reserve(k);
  out.masses.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t g = order[r];
    rank[g] = static_cast<int>(r);
    out.centres.push_back(centres[g]);
    const double mass = static_cast<double>(counts[g]) / static_cast<double>(n);
    out.masses.push_back(mass);
    if (mass >= mass_floor) ++out.headline_count;
  }
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = rank[group[i]];
  return out;
}

ClusterResult count_clusters(const Population& pop, double merge_tol, double mass_floor) {
  require(!pop.empty(), "cannot count clusters of an empty population");
  require(std::isfinite(merge_tol) && merge_tol > 0.0, "merge_tol must be > 0");
  require(mass_floor >= 0.0 && mass_floor < 0.5, "mass_floor must lie in [0, 0.5)");

  const std::size_t n = pop.size();
  const std::size_t dim = pop.dim();

  std::vector<Cell> cells;
  std::unordered_map<CellKey, std::size_t, CellKeyHash> cell_of;
  CellKey key(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto o = pop[i];
    for (std::size_t m = 0; m < dim; ++m) {
      key[m] = static_cast<std::int64_t>(std::floor(o[m] / merge_tol));
    }
    auto [it, inserted] = cell_of.try_emplace(key, cells.size());
    if (inserted) cells.push_back(Cell{key, {}, OpinionVec(o.begin(), o.end()),
                                       OpinionVec(o.begin(), o.end())});
    Cell& cell = cells[it->second];
    cell.members.push_back(i);
    for (std::size_t m = 0; m < dim; ++m) {
      cell.lo[m] = std::min(cell.lo[m], o[m]);
      cell.hi[m] = std::max(cell.hi[m], o[m]);
    }
  }

  UnionFind uf(n);
  for (const Cell& cell : cells) link_within(pop, cell, merge_tol, uf);

  const auto offsets = forward_offsets(dim);
  CellKey probe(dim);
  for (const Cell& cell : cells) {
    for (const auto& off : offsets) {
      for (std::size_t m = 0; m < dim; ++m) probe[m] = cell.key[m] + off[m];
      const auto it = cell_of.find(probe);
      if (it == cell_of.end()) continue;
      link_across(pop, cell, cells[it->second], merge_tol, uf);
    }
  }

  std::vector<int> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = static_cast<int>(uf.find(i));
  return clusters_from_labels(pop, roots, mass_floor);
}

int ScheduleResult::total_sweeps() const noexcept {
  int total = 0;
  for (const auto& r : rounds) total += r.sweeps;
  return total;
}

int ScheduleParams::rounds_to_unit_epsilon(double epsilon_0, double delta_epsilon) {
  require(epsilon_0 > 0.0 && epsilon_0 <= 1.0, "epsilon_0 must lie in (0, 1]");
  require(delta_epsilon > 0.0, "delta_epsilon must be > 0");
  return static_cast<int>(std::floor((1.0 - epsilon_0) / delta_epsilon + 1e-9)) + 1;
}

void ScheduleParams::validate() const {
  require(target_c >= 1, "target cluster count must be >= 1");
  require(std::isfinite(epsilon_0) && epsilon_0 > 0.0 && epsilon_0 <= 1.0,
          "epsilon_0 must lie in (0, 1]");
  require(std::isfinite(delta_epsilon) && delta_epsilon > 0.0, "delta_epsilon must be > 0");
  require(max_rounds > 0, "max_rounds must be positive");
  require(epsilon_0 + max_rounds * delta_epsilon <= 1.0 + delta_epsilon + 1e-9,
          "epsilon_0 + max_rounds * delta_epsilon must not exceed 1 + delta_epsilon");
  require(std::isfinite(merge_tol) && merge_tol > 0.0, "merge_tol must be > 0");
  require(mass_floor >= 0.0 && mass_floor < 0.5, "mass_floor must lie in [0, 0.5)");
}

ScheduleResult schedule_epsilon(const Population& image, const ScheduleParams& sched,
                                const ModelParams& params) {
  sched.validate();
  params.validate();
  const auto target = static_cast<std::size_t>(sched.target_c);

  ScheduleResult result;
  result.image = image;
  std::optional<std::size_t> previous;
  for (int round = 0; round < sched.max_rounds; ++round) {
    ModelParams p = params;
    p.epsilon = std::min(1.0, sched.epsilon_0 + round * sched.delta_epsilon);
    p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(round));

    RunResult run = run_model(std::move(result.image), p);
    result.image = std::move(run.population);
    result.clusters = count_clusters(result.image, sched.merge_tol, sched.mass_floor);
    result.epsilon_final = p.epsilon;
    const std::size_t count = result.clusters.headline_count;
    result.rounds.push_back(RoundRecord{round, p.epsilon, run.sweeps_used, run.converged,
                                        count, result.clusters.total_count()});

    if (previous && count > *previous) {
      std::ostringstream msg;
      msg << "headline cluster count grew from " << *previous << " to " << count
          << " at round " << round << " (epsilon " << p.epsilon << ")";
      throw InvariantViolation(msg.str());
    }
    previous = count;

    if (count <= target) {
      result.reached_target = count == target;
      result.overshoot = count < target;
      return result;
    }
    if (p.epsilon >= 1.0) break;
  }
  // Target not reached: counts are non-increasing, so the last round holds
  // the smallest count above the target.
  return result;
}

}  // namespace dwseg
