#pragma once

#include "dwseg/opinion.hpp"
#include "dwseg/population.hpp"
#include "dwseg/rng.hpp"

namespace dwseg {

/// One sweep: N ordered pair draws (i, j), i != j, uniform with replacement.
/// Each draw applies the configured rule in place when the confidence gate
/// passes, so later draws see earlier updates. Returns the largest absolute
/// component change between the pre-sweep and post-sweep populations.
/// Throws InvalidInput when N < 2, or when a spatial rule is requested on a
/// population without geometry.
double sweep(Population& pop, const ModelParams& params, SplitMix64& rng);

struct RunResult {
  Population population;
  int sweeps_used = 0;
  bool converged = false;  ///< diff <= conv_tol was reached before max_sweeps
  double final_diff = 0.0;
};

/// Sweeps until the per-sweep diff drops to conv_tol or max_sweeps is spent.
/// The RNG is seeded from params.seed, so equal inputs give bitwise-equal
/// outputs.
RunResult run_model(Population pop, const ModelParams& params);

}  // namespace dwseg
