#include "dwseg/opinion.hpp"

#include <cmath>

#include "dwseg/error.hpp"

namespace dwseg {

std::string_view to_string(UpdateRule rule) noexcept {
  switch (rule) {
    case UpdateRule::basic: return "basic";
    case UpdateRule::distance: return "distance";
    case UpdateRule::neighbour: return "neighbour";
  }
  return "unknown";
}

UpdateRule parse_update_rule(std::string_view name) {
  if (name == "basic") return UpdateRule::basic;
  if (name == "distance") return UpdateRule::distance;
  if (name == "neighbour") return UpdateRule::neighbour;
  throw InvalidInput("unknown update rule '" + std::string(name) +
                     "' (expected basic, distance or neighbour)");
}

void ModelParams::validate() const {
  require(std::isfinite(mu) && mu > 0.0 && mu <= 0.5, "mu must lie in (0, 0.5]");
  require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 1.0,
          "epsilon must lie in (0, 1]");
  require(std::isfinite(minkowski_k) && minkowski_k > 1.0, "minkowski k must be > 1");
  require(connectivity == 4 || connectivity == 8, "connectivity must be 4 or 8");
  require(std::isfinite(conv_tol) && conv_tol > 0.0, "convergence tolerance must be > 0");
  require(max_sweeps > 0, "max_sweeps must be positive");
}

bool within_confidence(std::span<const double> a, std::span<const double> b, double epsilon) {
  require(a.size() == b.size(), "opinion dimension mismatch");
  require(!a.empty(), "opinions must have at least one component");
  return detail::within_confidence(a.data(), b.data(), a.size(), epsilon);
}

std::pair<OpinionVec, OpinionVec> basic_update(std::span<const double> a,
                                               std::span<const double> b, double mu) {
  require(a.size() == b.size(), "opinion dimension mismatch");
  OpinionVec na(a.size()), nb(b.size());
  detail::pair_step(a.data(), b.data(), a.size(), mu, 1.0, na.data(), nb.data());
  for (std::size_t m = 0; m < na.size(); ++m) {
    na[m] = detail::clamp01(na[m]);
    nb[m] = detail::clamp01(nb[m]);
  }
  return {std::move(na), std::move(nb)};
}

}  // namespace dwseg
