#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dwseg/cluster.hpp"
#include "dwseg/opinion.hpp"

namespace dwseg {

struct SimParams {
  int agents = 1000;
  double epsilon = 0.2;
  double mu = 0.5;
  int max_sweeps = 10'000;
  int snapshot_every = 1;
  double conv_tol = 1e-6;
  std::uint64_t seed = 0x5EED;

  void validate() const;
};

struct Snapshot {
  int sweep = 0;  ///< 0 is the initial state
  std::vector<double> opinions;
};

struct Trajectory {
  SimParams params;
  std::vector<Snapshot> snapshots;  ///< strictly increasing sweep index; last is final
  bool converged = false;
  int sweeps_used = 0;

  const Snapshot& final_state() const { return snapshots.back(); }
};

/// Scalar opinions drawn uniformly on [0,1), evolved with the basic rule;
/// records the initial state, every snapshot_every-th sweep and the final one.
Trajectory simulate_population(const SimParams& params);

/// floor(1 / (2 epsilon)), at least 1.
int expected_cluster_count(double epsilon);

/// CSV with header "sweep,agent_index,opinion", one row per agent per snapshot.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace dwseg
