#include "dwseg/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dwseg/error.hpp"
#include "dwseg/model.hpp"
#include "dwseg/rng.hpp"

namespace dwseg {

void SimParams::validate() const {
  require(agents >= 2, "simulation needs at least 2 agents");
  require(snapshot_every >= 1, "snapshot_every must be >= 1");
  ModelParams p;
  p.mu = mu;
  p.epsilon = epsilon;
  p.max_sweeps = max_sweeps;
  p.conv_tol = conv_tol;
  p.validate();
}

Trajectory simulate_population(const SimParams& params) {
  params.validate();
  SplitMix64 init(derive_seed(params.seed, 0));
  std::vector<double> x(static_cast<std::size_t>(params.agents));
  for (double& v : x) v = init.uniform();

  ModelParams mp;
  mp.mu = params.mu;
  mp.epsilon = params.epsilon;
  mp.conv_tol = params.conv_tol;
  mp.max_sweeps = params.max_sweeps;
  mp.seed = derive_seed(params.seed, 1);

  Trajectory traj;
  traj.params = params;
  traj.snapshots.push_back({0, x});

  Population pop = Population::scalar(std::move(x));
  SplitMix64 rng(mp.seed);
  int done = 0;
  while (done < mp.max_sweeps) {
    const double diff = sweep(pop, mp, rng);
    ++done;
    const bool last = diff <= mp.conv_tol || done == mp.max_sweeps;
    if (last || done % params.snapshot_every == 0) {
      const auto v = pop.values();
      traj.snapshots.push_back({done, std::vector<double>(v.begin(), v.end())});
    }
    if (diff <= mp.conv_tol) {
      traj.converged = true;
      break;
    }
  }
  traj.sweeps_used = done;
  return traj;
}

int expected_cluster_count(double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 1.0,
          "epsilon must lie in (0, 1]");
  return std::max(1, static_cast<int>(std::floor(1.0 / (2.0 * epsilon))));
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trajectory '" + path.string() + "'");
  out << "sweep,agent_index,opinion\n";
  char buf[32];
  for (const auto& snap : traj.snapshots) {
    for (std::size_t i = 0; i < snap.opinions.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", snap.opinions[i]);
      out << snap.sweep << ',' << i << ',' << buf << '\n';
    }
  }
  if (!out) throw IoError("failed writing trajectory '" + path.string() + "'");
}

}  // namespace dwseg
