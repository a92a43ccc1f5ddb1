#pragma once

#include <vector>

#include "netmoments/graph.hpp"
#include "netmoments/rng.hpp"

namespace netmoments::test {

inline WeightedNetwork random_network(Rng& rng, std::size_t n,
                                      Bounds bounds = {}) {
  std::vector<double> upper(WeightedNetwork::upper_size(n));
  for (auto& w : upper) w = uniform_real(rng, bounds.w_min, bounds.w_max);
  return WeightedNetwork::from_upper_triangle(n, upper, bounds);
}

}  // namespace netmoments::test
