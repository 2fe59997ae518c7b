#include "dwseg/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dwseg/error.hpp"
#include "dwseg/spatial.hpp"

namespace dwseg {

namespace {

class Sweeper {
 public:
  Sweeper(const Population& pop, const ModelParams& params) : params_(params) {
    params.validate();
    require(pop.size() >= 2, "a population needs at least two agents to interact");
    if (params.rule != UpdateRule::basic) {
      require(pop.has_geometry(), std::string("the ") + std::string(to_string(params.rule)) +
                                      " rule needs pixel geometry");
    }
    if (params.rule == UpdateRule::distance) {
      normalizer_.emplace(pop.grid(), params.minkowski_k);
    }
    const std::size_t dim = pop.dim();
    eta_i_.resize(dim);
    eta_j_.resize(dim);
    out_i_.resize(dim);
    out_j_.resize(dim);
  }

  double run(Population& pop, SplitMix64& rng) {
    const auto values = pop.values();
    snapshot_.assign(values.begin(), values.end());
    const std::size_t n = pop.size();
    for (std::size_t draw = 0; draw < n; ++draw) {
      const std::size_t i = rng.below(n);
      std::size_t j = rng.below(n - 1);
      if (j >= i) ++j;
      interact(pop, i, j);
    }
    double diff = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      diff = std::max(diff, std::abs(values[k] - snapshot_[k]));
    }
    return diff;
  }

 private:
  void interact(Population& pop, std::size_t i, std::size_t j) {
    const std::size_t dim = pop.dim();
    double* xi = pop[i].data();
    double* xj = pop[j].data();
    const double eps = params_.epsilon;
    const double mu = params_.mu;
    switch (params_.rule) {
      case UpdateRule::basic:
        if (!detail::within_confidence(xi, xj, dim, eps)) return;
        detail::pair_step(xi, xj, dim, mu, 1.0, out_i_.data(), out_j_.data());
        break;
      case UpdateRule::distance: {
        if (!detail::within_confidence(xi, xj, dim, eps)) return;
        const double d = (*normalizer_)(pop.coord(i), pop.coord(j));
        detail::pair_step(xi, xj, dim, mu, 1.0 - d, out_i_.data(), out_j_.data());
        break;
      }
      case UpdateRule::neighbour:
        detail::neighbourhood_into(pop, i, eps, params_.connectivity, eta_i_.data());
        detail::neighbourhood_into(pop, j, eps, params_.connectivity, eta_j_.data());
        if (!detail::within_confidence(eta_i_.data(), eta_j_.data(), dim, eps)) return;
        detail::pair_step(eta_i_.data(), eta_j_.data(), dim, mu, 1.0, out_i_.data(),
                          out_j_.data());
        break;
    }
    for (std::size_t m = 0; m < dim; ++m) {
      xi[m] = detail::clamp01(out_i_[m]);
      xj[m] = detail::clamp01(out_j_[m]);
    }
  }

  const ModelParams& params_;
  std::optional<DistanceNormalizer> normalizer_;
  std::vector<double> snapshot_;
  std::vector<double> eta_i_, eta_j_, out_i_, out_j_;
};

}  // namespace

double sweep(Population& pop, const ModelParams& params, SplitMix64& rng) {
  Sweeper sweeper(pop, params);
  return sweeper.run(pop, rng);
}

RunResult run_model(Population pop, const ModelParams& params) {
  Sweeper sweeper(pop, params);
  SplitMix64 rng(params.seed);
  RunResult result;
  while (result.sweeps_used < params.max_sweeps) {
    result.final_diff = sweeper.run(pop, rng);
    ++result.sweeps_used;
    if (result.final_diff <= params.conv_tol) {
      result.converged = true;
      break;
    }
  }
  result.population = std::move(pop);
  return result;
}

}  // namespace dwseg
