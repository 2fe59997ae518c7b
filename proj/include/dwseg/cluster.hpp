#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dwseg/opinion.hpp"
#include "dwseg/population.hpp"

namespace dwseg {

/// Colour centres found in a population.
///
/// Clusters are ordered by descending mass (ties: lexicographically smaller
/// centre first), so the headline clusters, those with mass >= the floor
/// used to build the result, occupy indices [0, headline_count). The
/// remaining clusters are "minor": still labelled, but not counted.
struct ClusterResult {
  std::vector<OpinionVec> centres;
  std::vector<int> labels;     ///< per agent, index into centres
  std::vector<double> masses;  ///< fraction of agents per cluster, sums to 1
  std::size_t headline_count = 0;

  std::size_t total_count() const noexcept { return centres.size(); }
  std::size_t minor_count() const noexcept { return centres.size() - headline_count; }
};

inline constexpr double kDefaultMergeTol = 1e-3;
inline constexpr double kDefaultMassFloor = 0.01;

/// Single-linkage grouping of opinions: two agents share a cluster when they
/// are joined by a chain of pairs whose Chebyshev distance is < merge_tol.
/// Centres are member means. Throws InvalidInput on an empty population,
/// merge_tol <= 0 or mass_floor outside [0, 0.5).
ClusterResult count_clusters(const Population& pop, double merge_tol = kDefaultMergeTol,
                             double mass_floor = kDefaultMassFloor);

/// Builds a ClusterResult from an arbitrary labelling (ids need not be dense).
/// Used by baselines that produce their own assignment.
ClusterResult clusters_from_labels(const Population& pop, std::span<const int> labels,
                                   double mass_floor = 0.0);

struct ScheduleParams {
  int target_c = 2;
  double epsilon_0 = 0.1;
  double delta_epsilon = 0.01;
  int max_rounds = 91;
  double merge_tol = kDefaultMergeTol;
  double mass_floor = kDefaultMassFloor;

  /// Largest round count keeping epsilon_0 + rounds * delta <= 1 + delta,
  /// i.e. the last round runs at epsilon <= 1.
  static int rounds_to_unit_epsilon(double epsilon_0, double delta_epsilon);
  void validate() const;
};

struct RoundRecord {
  int round = 0;
  double epsilon = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::size_t headline_count = 0;
  std::size_t total_count = 0;
};

struct ScheduleResult {
  Population image;
  ClusterResult clusters;
  double epsilon_final = 0.0;
  bool reached_target = false;  ///< headline count == target_c
  bool overshoot = false;       ///< count dropped below target_c in one step
  std::vector<RoundRecord> rounds;

  int total_sweeps() const noexcept;
};

/// Raises epsilon from epsilon_0 by delta_epsilon per round, each round
/// running the model on the previous round's converged image, and stops at
/// the first round whose headline count is <= target_c. params.epsilon is
/// ignored; params.seed is mixed with the round index. Throws
/// InvariantViolation if the headline count ever grows between rounds.
ScheduleResult schedule_epsilon(const Population& image, const ScheduleParams& sched,
                                const ModelParams& params);

}  // namespace dwseg
